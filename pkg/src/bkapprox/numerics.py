"""Polynomial and quadrature machinery under the standard normal weight.

Everything here works in the *probabilists'* convention: Hermite polynomials
are orthogonal with respect to ``exp(-z**2 / 2)`` and Gauss-Hermite rules
approximate ``E[f(Z)]`` for ``Z ~ N(0, 1)`` with weights summing to one.

The partial-moment operators turn a polynomial ``W`` into a pair
``(K(W), h(W))`` such that, for every real ``a``::

    E[1{Z >= a} W(Z)] = phi(a) * K(W)(a) + h(W) * Phi(-a)

which is what makes the swaption formula closed-form once the payoff is
replaced by an interpolating polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

MAX_HERMITE_DEGREE = 64
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget without converging."""


class BracketError(ValueError):
    """A root-finding bracket does not enclose a sign change."""


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial, constant term first.

    Trailing exact zeros are stripped on construction, so the zero
    polynomial is stored as ``(0.0,)``.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        c = [float(v) for v in self.coeffs]
        if not c:
            raise ValueError("a polynomial needs at least one coefficient")
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def zero(cls) -> Polynomial:
        return cls((0.0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc if acc.ndim else float(acc)

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return Polynomial(tuple(a))

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return Polynomial(tuple(np.convolve(self.coeffs, other.coeffs)))
        return Polynomial(tuple(float(other) * c for c in self.coeffs))

    __rmul__ = __mul__

    def derivative(self) -> Polynomial:
        if self.degree == 0:
            return Polynomial.zero()
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a 1-D quadrature rule."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have the same length")

    def __len__(self) -> int:
        return self.nodes.size

    def expect(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class PartialMomentDecomposition:
    reduced: Polynomial
    tail_coefficient: float


# --------------------------------------------------------------------------
# Hermite polynomials and Gauss-Hermite rules
# --------------------------------------------------------------------------

def hermite_polynomial(n: int) -> Polynomial:
    """Probabilists' Hermite polynomial ``He_n`` in monomial coefficients."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    prev, cur = np.zeros(1), np.array([1.0])
    for k in range(n):
        nxt = np.zeros(k + 2)
        nxt[1:] = cur
        nxt[: prev.size] -= k * prev
        prev, cur = cur, nxt
    return Polynomial(tuple(cur))


def _orthonormal_hermite(n: int, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(He_n / sqrt(n!), He_{n-1} / sqrt((n-1)!))`` evaluated at ``z``.

    The normalised recurrence keeps magnitudes moderate for n up to 64.
    """
    prev = np.zeros_like(z)
    cur = np.ones_like(z)
    for k in range(n):
        prev, cur = cur, (z * cur - math.sqrt(k) * prev) / math.sqrt(k + 1)
    return cur, prev


def _refine_roots(n: int, lo: np.ndarray, hi: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """Safeguarded Newton for the n roots of He_n, one per bracket.

    Every bracket is known to hold exactly one sign change; a Newton step that
    leaves its bracket is replaced by bisection.
    """
    f_lo, _ = _orthonormal_hermite(n, lo)
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f, g_prev = _orthonormal_hermite(n, x)
        df = math.sqrt(n) * g_prev
        same = np.sign(f) == np.sign(f_lo)
        lo = np.where(same, x, lo)
        f_lo = np.where(same, f, f_lo)
        hi = np.where(same, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(df != 0.0, f / df, np.inf)
        newton = x - step
        inside = (newton > lo) & (newton < hi)
        x_new = np.where(inside, newton, 0.5 * (lo + hi))
        done = (np.abs(x_new - x) <= 4e-16 * np.maximum(1.0, np.abs(x))) | (f == 0.0)
        x = np.where(f == 0.0, x, x_new)
        if np.all(done):
            return x
    raise ConvergenceError(f"Hermite zeros of degree {n} did not converge in {max_iter} iterations")


@lru_cache(maxsize=None)
def _hermite_zeros_cached(n: int) -> tuple[float, ...]:
    if n == 1:
        return (0.0,)
    inner = np.array(_hermite_zeros_cached(n - 1))
    bound = math.sqrt(4.0 * n + 2.0) + 1.0
    edges = np.concatenate(([-bound], inner, [bound]))
    roots = _refine_roots(n, edges[:-1].copy(), edges[1:].copy())
    roots = 0.5 * (roots - roots[::-1])  # exact symmetry
    return tuple(float(r) for r in roots)


def hermite_zeros(n: int) -> np.ndarray:
    """Ascending zeros of ``He_n``.

    Zeros of consecutive degrees interlace, so the zeros of ``He_{n-1}``
    bracket those of ``He_n`` and each one is polished by safeguarded Newton.
    """
    if not 1 <= n <= MAX_HERMITE_DEGREE:
        raise ValueError(f"Hermite degree must lie in [1, {MAX_HERMITE_DEGREE}], got {n}")
    return np.array(_hermite_zeros_cached(n))


@lru_cache(maxsize=None)
def gauss_hermite_rule(n: int) -> QuadratureRule:
    """n-point probabilists' Gauss-Hermite rule; weights sum to one.

    ``w_k = 1 / (n * q_{n-1}(h_k)**2)`` with ``q`` the orthonormal Hermite
    polynomials, i.e. ``n! / (n**2 He_{n-1}(h_k)**2)``.
    """
    nodes = hermite_zeros(n)
    _, q_prev = _orthonormal_hermite(n, nodes)
    weights = 1.0 / (n * q_prev**2)
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(nodes, weights)


# --------------------------------------------------------------------------
# Interpolation and partial moments
# --------------------------------------------------------------------------

def lagrange_on_hermite_nodes(values: Sequence[float], n: int | None = None) -> Polynomial:
    """Interpolate ``values`` given at the zeros of ``He_n``.

    Newton divided differences, expanded into monomial coefficients.
    """
    y = np.asarray(values, dtype=float)
    if n is None:
        n = y.size
    if n < 1:
        raise ValueError("interpolation needs at least one node")
    if y.size != n:
        raise ValueError(f"expected {n} values, got {y.size}")
    x = hermite_zeros(n)
    dd = y.copy()
    for j in range(1, n):
        dd[j:] = (dd[j:] - dd[j - 1 : -1]) / (x[j:] - x[: n - j])
    coeffs = np.array([dd[-1]])
    for j in range(n - 2, -1, -1):
        # coeffs <- coeffs * (z - x_j) + dd_j
        shifted = np.concatenate(([0.0], coeffs))
        shifted[:-1] -= x[j] * coeffs
        shifted[0] += dd[j]
        coeffs = shifted
    return Polynomial(tuple(coeffs))


def partial_moment_decompose(W: Polynomial) -> PartialMomentDecomposition:
    """Run ``u_k = (k + 2) u_{k+2} + w_{k+1}`` down from ``k = n - 1`` to ``-1``."""
    w = W.coeffs
    n = len(w) - 1
    u = [0.0] * (n + 3)  # u[k + 1] holds u_k, for k = -1 .. n + 1
    for k in range(n - 1, -2, -1):
        u[k + 1] = (k + 2) * u[k + 3] + w[k + 1]
    reduced = Polynomial(tuple(u[1 : n + 1])) if n > 0 else Polynomial.zero()
    return PartialMomentDecomposition(reduced, u[0])


def normal_pdf(x):
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI


def normal_cdf(x):
    return ndtr(x)


def gaussian_tail_expectation(W: Polynomial, a: float, side: int = 1) -> float:
    """``E[side * 1{side*Z >= side*a} * W(Z)]`` for standard normal ``Z``.

    ``side`` is +1 for the upper tail and -1 for the (negated) lower tail.
    ``a`` may be infinite.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    pm = partial_moment_decompose(W)
    if math.isinf(a):
        density_term = 0.0
    else:
        density_term = float(normal_pdf(a)) * pm.reduced(a)
    return density_term + side * pm.tail_coefficient * float(normal_cdf(-side * a))


# --------------------------------------------------------------------------
# Scalar utilities
# --------------------------------------------------------------------------

def solve_bracketed_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of ``f`` on ``[lo, hi]`` by Brent's method (bisection-safeguarded)."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or f_lo * f_hi > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")
    try:
        return brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc


@lru_cache(maxsize=32)
def _legendre_reference(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def legendre_rule(lo: float, hi: float, n: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped onto ``[lo, hi]``."""
    x, w = _legendre_reference(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def integrate_time(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    nodes: int = 64,
    panels: int | None = None,
) -> float:
    """Gauss-Legendre quadrature of a vectorised ``f`` over ``[lo, hi]``.

    A single panel is used unless the integrand's end-point magnitudes differ
    by more than 1e6, in which case the interval is split into 8 panels.
    """
    if lo > hi:
        raise ValueError(f"lower limit {lo} exceeds upper limit {hi}")
    if lo == hi:
        return 0.0
    if panels is None:
        ends = np.abs(np.asarray(f(np.array([lo, hi])), dtype=float))
        small, big = ends.min(), ends.max()
        panels = 8 if big > 0.0 and (small == 0.0 or big / small > 1e6) else 1
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t, w = legendre_rule(a, b, nodes)
        total += float(np.dot(w, f(t)))
    return total
