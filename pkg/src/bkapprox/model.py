"""Black-Karasinski model: parameters, drift integral, OU kernels and KL bases.

The log short rate follows ``d ln r = (a(t) - b ln r) dt + sigma dW`` with a
piecewise-constant ``a``. Writing ``r_{u+t} = rbar_{u,t} * exp(sigma X_t)``
splits the rate into a deterministic zero-volatility part and an
Ornstein-Uhlenbeck deviation ``X`` started at zero, whose covariance and
Karhunen-Loeve eigen-system are available in closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np

from .numerics import ConvergenceError

KernelKind = Literal["ou", "bridge"]


@dataclass(frozen=True)
class ModelParams:
    """Black-Karasinski parameters.

    Attributes
    ----------
    sigma : float
        Volatility of the log short rate, per sqrt(year).
    b : float
        Mean-reversion speed, per year.
    r0 : float
        Initial short rate.
    drift : tuple of (knot_time, level)
        Piecewise-constant ``a(t)``; level ``i`` applies on
        ``[t_i, t_{i+1})`` and the last level extends to infinity.
    """

    sigma: float
    b: float
    r0: float
    drift: tuple[tuple[float, float], ...] = field(default=((0.0, 0.0),))

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not self.r0 > 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")
        drift = tuple((float(t), float(level)) for t, level in self.drift)
        if not drift or drift[0][0] != 0.0:
            raise ValueError("drift knots must start at t=0")
        times = [t for t, _ in drift]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("drift knot times must be strictly increasing")
        object.__setattr__(self, "drift", drift)

    @classmethod
    def with_mean_level(cls, sigma: float, b: float, r0: float, mean_level: float) -> ModelParams:
        """Constant drift ``a = b ln(mean_level)``: rates revert to ``mean_level``."""
        return cls(sigma, b, r0, ((0.0, b * math.log(mean_level)),))

    @property
    def knot_times(self) -> np.ndarray:
        return np.array([t for t, _ in self.drift])

    @property
    def levels(self) -> np.ndarray:
        return np.array([level for _, level in self.drift])

    def replace(self, **changes) -> ModelParams:
        data = {"sigma": self.sigma, "b": self.b, "r0": self.r0, "drift": self.drift}
        data.update(changes)
        return ModelParams(**data)

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "b": self.b,
            "r0": self.r0,
            "a": [{"t": t, "level": level} for t, level in self.drift],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ModelParams:
        unknown = set(data) - {"sigma", "b", "r0", "a"}
        if unknown:
            raise ValueError(f"unknown model keys: {sorted(unknown)}")
        missing = {"sigma", "b", "r0", "a"} - set(data)
        if missing:
            raise ValueError(f"missing model keys: {sorted(missing)}")
        drift = tuple((float(seg["t"]), float(seg["level"])) for seg in data["a"])
        return cls(float(data["sigma"]), float(data["b"]), float(data["r0"]), drift)


def load_model(path: str | Path) -> ModelParams:
    """Read ``{sigma, b, r0, a: [{t, level}]}`` from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        return ModelParams.from_dict(json.load(fh))


def save_model(params: ModelParams, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=2) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# Drift integral and zero-volatility rate
# --------------------------------------------------------------------------

def drift_integral(params: ModelParams, u: float, v):
    """``A(u, u+v) = int_u^{u+v} exp(-b (u+v-s)) a(s) ds``, vectorised in ``v``."""
    v = np.asarray(v, dtype=float)
    b = params.b
    end = u + v
    knots = params.knot_times
    levels = params.levels
    upper = np.append(knots[1:], np.inf)
    total = np.zeros_like(end)
    for t1, t2, level in zip(knots, upper, levels):
        lo = np.maximum(u, t1)
        hi = np.minimum(end, t2)
        active = hi > lo
        seg = (level / b) * (np.exp(-b * (end - hi)) - np.exp(-b * (end - lo)))
        total = total + np.where(active, seg, 0.0)
    return total if total.ndim else float(total)


def log_rbar(params: ModelParams, r_u, u: float, v):
    """``ln rbar_{u,v}``; broadcasts ``r_u`` against ``v``."""
    v = np.asarray(v, dtype=float)
    return np.exp(-params.b * v) * np.log(r_u) + drift_integral(params, u, v)


def rbar(params: ModelParams, r_u, u: float, v):
    """Short rate at ``u + v`` in the absence of volatility, given ``r_u``."""
    out = np.exp(log_rbar(params, r_u, u, v))
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# Covariance kernels
# --------------------------------------------------------------------------

def ou_covariance(b: float, s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return (np.exp(-b * np.abs(t - s)) - np.exp(-b * (t + s))) / (2.0 * b)


def ou_variance(b: float, s):
    s = np.asarray(s, dtype=float)
    return -np.expm1(-2.0 * b * s) / (2.0 * b)


def bridge_covariance(b: float, T: float, s, t):
    return ou_covariance(b, s, t) - ou_covariance(b, s, T) * ou_covariance(b, t, T) / ou_variance(b, T)


def bridge_variance(b: float, T: float, s):
    """Variance of the OU bridge pinned at ``T``.

    Closed form ``V(s) * (1 - exp(-2b(T-s)) (1 - exp(-2bs)) / (1 - exp(-2bT)))``,
    equal to ``V(s) - K(s,T)**2 / V(T)``.
    """
    s = np.asarray(s, dtype=float)
    ratio = np.exp(-2.0 * b * (T - s)) * np.expm1(-2.0 * b * s) / np.expm1(-2.0 * b * T)
    return ou_variance(b, s) * (1.0 - ratio)


@dataclass(frozen=True)
class Kernel:
    b: float
    horizon: float
    kind: KernelKind = "ou"

    def __call__(self, s, t):
        if self.kind == "ou":
            return ou_covariance(self.b, s, t)
        return bridge_covariance(self.b, self.horizon, s, t)

    def variance(self, s):
        if self.kind == "ou":
            return ou_variance(self.b, s)
        return bridge_variance(self.b, self.horizon, s)


# --------------------------------------------------------------------------
# Karhunen-Loeve bases
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KLBasis:
    """Truncated KL eigen-system ``sqrt(lambda_n) f_n(t)``, ``f_n = c_n sin(omega_n t)``."""

    kind: KernelKind
    b: float
    interval_length: float
    omegas: np.ndarray
    lambdas: np.ndarray
    norm_constants: np.ndarray

    def __post_init__(self) -> None:
        for name in ("omegas", "lambdas", "norm_constants"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def truncation(self) -> int:
        return self.omegas.size

    def eigenfunctions(self, t) -> np.ndarray:
        """Array of shape ``(truncation,) + shape(t)``."""
        t = np.asarray(t, dtype=float)
        shape = (-1,) + (1,) * t.ndim
        return self.norm_constants.reshape(shape) * np.sin(self.omegas.reshape(shape) * t)

    def scaled_eigenfunctions(self, t) -> np.ndarray:
        """``sqrt(lambda_n) f_n(t)``, the loadings on the standard normals."""
        t = np.asarray(t, dtype=float)
        shape = (-1,) + (1,) * t.ndim
        return np.sqrt(self.lambdas).reshape(shape) * self.eigenfunctions(t)

    def process_variance(self, t):
        """Variance of the full (untruncated) process at ``t``."""
        if self.kind == "ou":
            return ou_variance(self.b, t)
        return bridge_variance(self.b, self.interval_length, t)


def kl_eigenfunction_value(basis: KLBasis, n: int, t: float) -> float:
    if not 0 <= n < basis.truncation:
        raise IndexError(f"eigenfunction index {n} outside [0, {basis.truncation})")
    return float(basis.norm_constants[n] * math.sin(basis.omegas[n] * t))


def _ou_frequencies(b: float, tau: float, terms: int) -> np.ndarray:
    """Roots of ``omega cot(omega tau) = -b``, one per ``((n+1/2)pi/tau, (n+1)pi/tau)``.

    Solved as ``g(w) = w cos(w tau) + b sin(w tau) = 0``, which has no poles.
    Vectorised bisection down to ~1e-13 relative width, then one Newton step
    kept only if it stays inside the bracket.
    """
    n = np.arange(terms)
    lo = (n + 0.5) * math.pi / tau
    hi = (n + 1.0) * math.pi / tau

    def g(w):
        return w * np.cos(w * tau) + b * np.sin(w * tau)

    g_lo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        left = np.sign(g_mid) == np.sign(g_lo)
        lo = np.where(left, mid, lo)
        g_lo = np.where(left, g_mid, g_lo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 1e-13 * hi):
            break
    else:
        raise ConvergenceError("OU eigenfrequency bisection did not converge")
    w = 0.5 * (lo + hi)
    dg = (1.0 + b * tau) * np.cos(w * tau) - w * tau * np.sin(w * tau)
    polished = w - g(w) / dg
    ok = (polished > lo - 1e-15 * hi) & (polished < hi + 1e-15 * hi)
    return np.where(ok, polished, w)


@lru_cache(maxsize=4096)
def ou_kl_basis(b: float, tau: float, terms: int = 1) -> KLBasis:
    """KL basis of the OU process ``dX = -b X dt + dW``, ``X_0 = 0``, on ``[0, tau]``."""
    if not (b > 0 and tau > 0 and terms >= 1):
        raise ValueError(f"need b > 0, tau > 0, terms >= 1; got {b}, {tau}, {terms}")
    omegas = _ou_frequencies(b, tau, terms)
    lambdas = 1.0 / (b * b + omegas * omegas)
    norms = np.sqrt(2.0 / (tau + b * lambdas))
    return KLBasis("ou", b, tau, omegas, lambdas, norms)


@lru_cache(maxsize=4096)
def bridge_kl_basis(b: float, T: float, terms: int = 5) -> KLBasis:
    """KL basis of the OU bridge on ``[0, T]`` pinned to zero at both ends."""
    if not (b >= 0 and T > 0 and terms >= 1):
        raise ValueError(f"need b >= 0, T > 0, terms >= 1; got {b}, {T}, {terms}")
    n = np.arange(1, terms + 1)
    omegas = n * math.pi / T
    lambdas = T * T / (b * b * T * T + (n * math.pi) ** 2)
    norms = np.full(terms, math.sqrt(2.0 / T))
    return KLBasis("bridge", b, T, omegas, lambdas, norms)
