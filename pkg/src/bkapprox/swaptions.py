"""European swaptions by Hermite interpolation of the conditional payoff.

Conditioning on the terminal OU value ``X_T = sqrt(V(T)) z``:

* the discount factor ``E[beta(T) | X_T]`` comes from the KL expansion of the
  OU bridge (only the first bridge coordinate for the fast variant),
* every bond in the swap is a fast bond price at ``r_T = rbar_{0,T} exp(sigma X_T)``,

so ``f(z) = beta(z) * (1 - C(z))`` with ``C = B(T, T+N delta) + S * annuity``.
``f`` is sampled at the ``k`` Hermite zeros, replaced by its interpolant and
integrated over the exercise region in closed form with the partial-moment
operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .bonds import (
    DEFAULT_GH_POINTS,
    _kl_discount,
    fast_bond_prices,
    time_nodes_for,
)
from .model import (
    ModelParams,
    bridge_kl_basis,
    log_rbar,
    ou_covariance,
    ou_variance,
)
from .numerics import (
    BracketError,
    Polynomial,
    gauss_hermite_rule,
    hermite_zeros,
    lagrange_on_hermite_nodes,
    legendre_rule,
    normal_cdf,
    normal_pdf,
    partial_moment_decompose,
    solve_bracketed_root,
)

Side = Literal["payer", "receiver"]
DEFAULT_KMN = 5
MAX_BRIDGE_TERMS = 3


class ImpliedVolError(ValueError):
    """Price lies outside the Black no-arbitrage bounds."""


@dataclass(frozen=True)
class SwaptionSpec:
    """European swaption on a swap with ``payments`` fixed coupons every ``period`` years."""

    expiry: float
    period: float
    payments: int
    strike: float
    side: Side = "payer"

    def __post_init__(self) -> None:
        if not self.expiry > 0:
            raise ValueError(f"expiry must be positive, got {self.expiry}")
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if self.payments < 1:
            raise ValueError(f"payments must be >= 1, got {self.payments}")
        if self.strike < 0:
            raise ValueError(f"strike must be non-negative, got {self.strike}")
        if self.side not in ("payer", "receiver"):
            raise ValueError(f"side must be 'payer' or 'receiver', got {self.side!r}")

    @property
    def omega(self) -> int:
        return 1 if self.side == "payer" else -1

    @property
    def tenor(self) -> float:
        return self.payments * self.period

    @property
    def payment_offsets(self) -> np.ndarray:
        return self.period * np.arange(1, self.payments + 1)

    def with_strike(self, strike: float) -> SwaptionSpec:
        return SwaptionSpec(self.expiry, self.period, self.payments, strike, self.side)

    def with_side(self, side: Side) -> SwaptionSpec:
        return SwaptionSpec(self.expiry, self.period, self.payments, self.strike, side)


@dataclass(frozen=True)
class SwapAlgebra:
    annuity: float
    terminal_bond: float
    coupon_sum: float
    forward_rate: float


@dataclass(frozen=True)
class ExerciseBoundary:
    """Where the interpolated payoff changes sign, in standardised units.

    ``payoff_sign`` is 0 when a sign change exists among the nodes, otherwise
    -1 (payoff negative at every node) or +1 (non-negative at every node); in
    the one-signed cases ``z0`` is +inf or -inf respectively.
    """

    z0: float
    x0: float
    bracket: tuple[float, float] | None
    nodes: np.ndarray = field(repr=False)
    node_values: np.ndarray = field(repr=False)
    interpolant: Polynomial = field(repr=False)
    payoff_sign: int = 0

    def is_deep_otm(self, omega: int) -> bool:
        return self.payoff_sign == -omega

    def is_deep_itm(self, omega: int) -> bool:
        return self.payoff_sign == omega


@dataclass(frozen=True)
class SwaptionResult:
    price: float
    boundary: ExerciseBoundary
    k: int
    m: int
    n: int

    @property
    def regime(self) -> str:
        if self.boundary.payoff_sign == 0:
            return "interior"
        return "deep_itm" if self.price != 0.0 else "deep_otm"


# --------------------------------------------------------------------------
# Conditional discount factor
# --------------------------------------------------------------------------

def _conditional_discount(params: ModelParams, T: float, x, terms: int, gh_points: int) -> np.ndarray:
    b, sigma = params.b, params.sigma
    basis = bridge_kl_basis(b, float(T), terms)
    t, tw = legendre_rule(0.0, T, time_nodes_for(params, T))
    VT = float(ou_variance(b, T))
    tilt = ou_covariance(b, t, T) / VT
    retained = np.sum(basis.scaled_eigenfunctions(t) ** 2, axis=0)
    residual = np.maximum(basis.process_variance(t) - retained, 0.0)
    x = np.asarray(x, dtype=float)
    base = log_rbar(params, params.r0, 0.0, t) + 0.5 * sigma**2 * residual + sigma * tilt * x[..., None]
    return _kl_discount(base, tw, basis.scaled_eigenfunctions(t), sigma, gauss_hermite_rule(gh_points))


def conditional_discount_full(params: ModelParams, T: float, x, m: int = 2, gh_points: int = 10):
    """``E[exp(-int_0^T r ds) | X_T = x]`` keeping ``m`` bridge KL terms."""
    if not 1 <= m <= MAX_BRIDGE_TERMS:
        raise ValueError(f"bridge truncation m={m} outside [1, {MAX_BRIDGE_TERMS}]")
    out = _conditional_discount(params, T, x, m, gh_points)
    return out if np.ndim(out) else float(out)


def conditional_discount_fast(params: ModelParams, T: float, x, m: int = DEFAULT_KMN):
    """First bridge coordinate only, integrated with an ``m``-point Hermite rule."""
    if m < 1:
        raise ValueError("m must be at least 1")
    out = _conditional_discount(params, T, x, 1, m)
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# Swap algebra
# --------------------------------------------------------------------------

def _coupon_sums(params: ModelParams, r_T, spec: SwaptionSpec, gh_points: int):
    """Annuity and terminal bond at expiry, vectorised over ``r_T``."""
    r_T = np.asarray(r_T, dtype=float)
    bonds = np.stack(
        [fast_bond_prices(params, r_T, spec.expiry, float(off), gh_points) for off in spec.payment_offsets]
    )
    annuity = spec.period * bonds.sum(axis=0)
    return annuity, bonds[-1]


def swap_algebra_at_expiry(
    params: ModelParams, r_T: float, spec: SwaptionSpec, gh_points: int = DEFAULT_KMN
) -> SwapAlgebra:
    annuity, terminal = _coupon_sums(params, r_T, spec, gh_points)
    annuity, terminal = float(annuity), float(terminal)
    return SwapAlgebra(
        annuity=annuity,
        terminal_bond=terminal,
        coupon_sum=terminal + spec.strike * annuity,
        forward_rate=(1.0 - terminal) / annuity,
    )


def forward_swap_rate(
    params: ModelParams, expiry: float, period: float, payments: int, gh_points: int = DEFAULT_GH_POINTS
) -> tuple[float, float]:
    """Time-0 forward swap rate and annuity from fast bond prices."""
    mats = expiry + period * np.arange(0, payments + 1)
    bonds = np.array([float(fast_bond_prices(params, params.r0, 0.0, float(m), gh_points)) for m in mats])
    annuity = period * bonds[1:].sum()
    return (bonds[0] - bonds[-1]) / annuity, annuity


# --------------------------------------------------------------------------
# Exercise boundary and price
# --------------------------------------------------------------------------

def payoff_at_nodes(params: ModelParams, spec: SwaptionSpec, z, m: int = DEFAULT_KMN, n: int = DEFAULT_KMN):
    """``f(z) = beta_m(x) (1 - C_n(x))`` at standardised points ``x = sqrt(V(T)) z``."""
    T = spec.expiry
    x = math.sqrt(float(ou_variance(params.b, T))) * np.asarray(z, dtype=float)
    r_T = np.exp(log_rbar(params, params.r0, 0.0, T) + params.sigma * x)
    annuity, terminal = _coupon_sums(params, r_T, spec, n)
    coupon_sum = terminal + spec.strike * annuity
    return conditional_discount_fast(params, T, x, m) * (1.0 - coupon_sum)


def locate_exercise_boundary(
    params: ModelParams, spec: SwaptionSpec, m: int = DEFAULT_KMN, n: int = DEFAULT_KMN, k: int = DEFAULT_KMN
) -> ExerciseBoundary:
    """Bracket the payoff's sign change on the ``k`` Hermite zeros and solve the interpolant.

    The bracket comes from the raw node values ``f(h_l) < 0 <= f(h_{l+1})``;
    the root of the interpolant inside it is found by Brent's method.
    """
    if k < 2:
        raise ValueError("interpolation degree k must be at least 2")
    nodes = hermite_zeros(k)
    values = np.asarray(payoff_at_nodes(params, spec, nodes, m, n))
    interp = lagrange_on_hermite_nodes(values, k)
    scale = math.sqrt(float(ou_variance(params.b, spec.expiry)))

    def boundary(z0, bracket, sign):
        return ExerciseBoundary(z0, scale * z0, bracket, nodes, values, interp, sign)

    if np.all(values < 0.0):
        return boundary(math.inf, None, -1)
    if values[0] >= 0.0:
        return boundary(-math.inf, None, 1)
    crossings = np.flatnonzero((values[:-1] < 0.0) & (values[1:] >= 0.0))
    l = int(crossings[0])
    lo, hi = float(nodes[l]), float(nodes[l + 1])
    if values[l + 1] == 0.0:
        root = hi
    else:
        try:
            root = solve_bracketed_root(interp, lo, hi, tol=1e-13)
        except BracketError as exc:  # interpolant equals node values, so unreachable in exact arithmetic
            raise RuntimeError(f"interpolant lost its sign change on [{lo}, {hi}]") from exc
    return boundary(root, (lo, hi), 0)


def swaption_price_details(
    params: ModelParams, spec: SwaptionSpec, m: int = DEFAULT_KMN, n: int = DEFAULT_KMN, k: int = DEFAULT_KMN
) -> SwaptionResult:
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    bnd = locate_exercise_boundary(params, spec, m, n, k)
    omega = spec.omega
    pm = partial_moment_decompose(bnd.interpolant)
    if bnd.is_deep_otm(omega):
        price = 0.0
    elif bnd.is_deep_itm(omega):
        price = omega * pm.tail_coefficient
    else:
        z = bnd.z0
        price = float(normal_pdf(z)) * pm.reduced(z) + omega * pm.tail_coefficient * float(normal_cdf(-omega * z))
    return SwaptionResult(float(price), bnd, k, m, n)


def swaption_price(
    params: ModelParams, spec: SwaptionSpec, m: int = DEFAULT_KMN, n: int = DEFAULT_KMN, k: int = DEFAULT_KMN
) -> float:
    """Approximate swaption value at time 0 per unit notional."""
    return swaption_price_details(params, spec, m, n, k).price


# --------------------------------------------------------------------------
# Black conversion
# --------------------------------------------------------------------------

def _omega(side) -> int:
    if side in ("payer", 1):
        return 1
    if side in ("receiver", -1):
        return -1
    raise ValueError(f"unknown side {side!r}")


def black_swaption_price(forward: float, strike: float, annuity: float, T: float, vol: float, side="payer") -> float:
    """Black (lognormal) swaption value."""
    w = _omega(side)
    sd = vol * math.sqrt(T)
    if sd == 0.0:
        return annuity * max(w * (forward - strike), 0.0)
    d1 = (math.log(forward / strike) + 0.5 * sd * sd) / sd
    d2 = d1 - sd
    return annuity * w * (forward * float(normal_cdf(w * d1)) - strike * float(normal_cdf(w * d2)))


def implied_vol(price: float, forward: float, strike: float, annuity: float, T: float, side="payer") -> float:
    """Black volatility reproducing ``price``; raises :class:`ImpliedVolError` outside the bounds."""
    w = _omega(side)
    lower = annuity * max(w * (forward - strike), 0.0)
    upper = annuity * (forward if w == 1 else strike)
    if not lower - 1e-15 <= price < upper:
        raise ImpliedVolError(f"price {price} outside no-arbitrage bounds [{lower}, {upper})")
    if price <= lower:
        return 0.0
    hi = 1.0
    while black_swaption_price(forward, strike, annuity, T, hi, w) < price:
        hi *= 2.0
        if hi > 1e3:
            raise ImpliedVolError(f"no volatility below {hi} reproduces price {price}")
    return solve_bracketed_root(
        lambda v: black_swaption_price(forward, strike, annuity, T, v, w) - price, 0.0, hi, tol=1e-13
    )


def parity_disparity(
    params: ModelParams,
    spec_atm: SwaptionSpec,
    m: int = DEFAULT_KMN,
    n: int = DEFAULT_KMN,
    k: int = DEFAULT_KMN,
    forward: float | None = None,
    annuity: float | None = None,
) -> float:
    """Payer minus receiver implied vol at the same strike.

    Both prices are converted with the same ``(forward, annuity)``; by default
    the strike itself is used as forward and the annuity comes from fast bonds.
    """
    if forward is None:
        forward = spec_atm.strike
    if annuity is None:
        _, annuity = forward_swap_rate(params, spec_atm.expiry, spec_atm.period, spec_atm.payments)
    vols = []
    for side in ("payer", "receiver"):
        price = swaption_price(params, spec_atm.with_side(side), m, n, k)
        vols.append(implied_vol(price, forward, spec_atm.strike, annuity, spec_atm.expiry, side))
    return vols[0] - vols[1]
