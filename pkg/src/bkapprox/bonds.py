"""Zero-coupon bond prices from the KL expansion of the log-rate deviation.

Conditional on ``r_T``, the rate path over ``[T, T+tau]`` is
``rbar_{T,t} * exp(sigma X_t)``. Keeping ``n+1`` KL terms of ``X`` and folding
the discarded variance into a deterministic factor ``G`` gives::

    I_n(z) = int_0^tau rbar_{T,t} G_n(t) F_n(t, z) dt
    B_n    = E[exp(-I_n(Z_0, ..., Z_n))]

evaluated by tensor Gauss-Hermite quadrature. The fast variant keeps only the
leading term and a single 1-D rule.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import KLBasis, ModelParams, log_rbar, ou_kl_basis
from .numerics import QuadratureRule, gauss_hermite_rule, legendre_rule

DEFAULT_GH_POINTS = 20
RECOMMENDED_GH_POINTS = 5
DEFAULT_TIME_NODES = 64
MAX_FULL_TRUNCATION = 3
MAX_TENSOR_POINTS = 2_000_000


class QuadratureBudgetError(ValueError):
    """Requested tensor quadrature is larger than the configured budget."""


@dataclass(frozen=True)
class BondQuote:
    start: float
    maturity: float
    price: float

    def __post_init__(self) -> None:
        if not self.price > 0:
            raise ValueError(f"bond price must be positive, got {self.price}")

    @property
    def tau(self) -> float:
        return self.maturity - self.start

    @property
    def ytm(self) -> float:
        return yield_from_price(self.price, self.tau)


def yield_from_price(price: float, tau: float) -> float:
    """Continuously compounded yield ``-ln(price) / tau``."""
    if not price > 0:
        raise ValueError(f"price must be positive, got {price}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return -math.log(price) / tau


def time_nodes_for(params: ModelParams, tau: float, nodes: int | None = None) -> int:
    if nodes is not None:
        return nodes
    return 2 * DEFAULT_TIME_NODES if tau * params.sigma**2 > 5.0 else DEFAULT_TIME_NODES


def integrand_F(basis: KLBasis, sigma: float, t, z) -> np.ndarray:
    """``exp(sigma * sum_k sqrt(lambda_k) f_k(t) z_k)``."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != basis.truncation:
        raise ValueError(f"need {basis.truncation} coordinates, got {z.shape[-1]}")
    load = basis.scaled_eigenfunctions(t)  # (terms, nt)
    return np.exp(sigma * np.tensordot(z, load, axes=(-1, 0)))


def variance_correction_G(basis: KLBasis, sigma: float, t):
    """``exp(sigma^2/2 * (process variance - retained KL variance))``."""
    t = np.asarray(t, dtype=float)
    retained = np.sum(basis.scaled_eigenfunctions(t) ** 2, axis=0)
    residual = np.maximum(basis.process_variance(t) - retained, 0.0)
    out = np.exp(0.5 * sigma**2 * residual)
    return out if out.ndim else float(out)


def _kl_discount(
    log_base: np.ndarray,
    t_weights: np.ndarray,
    loadings: np.ndarray,
    sigma: float,
    rule: QuadratureRule,
) -> np.ndarray:
    """Tensor-quadrature of ``exp(-int exp(log_base + sigma * z.loadings) dt)``.

    ``log_base`` has shape ``(..., nt)`` and already contains ``ln G`` plus any
    deterministic tilt; ``loadings`` has shape ``(d, nt)``. Returns shape ``(...)``.
    """
    d = loadings.shape[0]
    q = len(rule)
    if q**d > MAX_TENSOR_POINTS:
        raise QuadratureBudgetError(f"{q}^{d} quadrature points exceed budget {MAX_TENSOR_POINTS}")
    if d == 1:
        grid = rule.nodes[:, None]
        weights = rule.weights
    else:
        grid = np.array(list(itertools.product(rule.nodes, repeat=d)))
        weights = np.prod(np.array(list(itertools.product(rule.weights, repeat=d))), axis=1)
    shocks = sigma * (grid @ loadings)  # (Q, nt)
    expo = np.exp(log_base[..., None, :] + shocks)  # (..., Q, nt)
    integral = expo @ t_weights
    return np.exp(-integral) @ weights


def _bond_prices(
    params: ModelParams,
    r_T,
    T: float,
    tau: float,
    terms: int,
    rule: QuadratureRule,
    time_nodes: int | None = None,
) -> np.ndarray:
    basis = ou_kl_basis(params.b, float(tau), terms)
    t, tw = legendre_rule(0.0, tau, time_nodes_for(params, tau, time_nodes))
    log_g = np.log(variance_correction_G(basis, params.sigma, t))
    log_r = np.log(np.asarray(r_T, dtype=float))
    base = np.exp(-params.b * t) * log_r[..., None] + log_rbar(params, 1.0, T, t) + log_g
    return _kl_discount(base, tw, basis.scaled_eigenfunctions(t), params.sigma, rule)


def rate_integral_I(
    params: ModelParams,
    r_T: float,
    T: float,
    tau: float,
    basis: KLBasis,
    z,
    time_nodes: int | None = None,
):
    """``int_0^tau rbar_{T,t} G(t) F(t, z) dt``; ``z`` may carry leading batch axes."""
    t, tw = legendre_rule(0.0, tau, time_nodes_for(params, tau, time_nodes))
    integrand = (
        np.exp(log_rbar(params, r_T, T, t))
        * variance_correction_G(basis, params.sigma, t)
        * integrand_F(basis, params.sigma, t, z)
    )
    out = integrand @ tw
    return out if np.ndim(out) else float(out)


def fast_bond_prices(
    params: ModelParams,
    r_T,
    T: float,
    tau: float,
    gh_points: int = DEFAULT_GH_POINTS,
    time_nodes: int | None = None,
) -> np.ndarray:
    """Vectorised fast bond prices ``B(T, T+tau)`` over an array of ``r_T``."""
    if tau == 0:
        return np.ones_like(np.asarray(r_T, dtype=float))
    return _bond_prices(params, r_T, T, tau, 1, gauss_hermite_rule(gh_points), time_nodes)


def bond_price_fast(
    params: ModelParams,
    r_T: float,
    T: float,
    tau: float,
    gh_points: int = DEFAULT_GH_POINTS,
    time_nodes: int | None = None,
) -> BondQuote:
    """Leading KL term only, integrated with a ``gh_points`` Gauss-Hermite rule.

    Strictly decreasing in ``r_T``, tending to 1 as ``r_T -> 0``.
    """
    if gh_points < 1:
        raise ValueError("gh_points must be at least 1")
    price = float(fast_bond_prices(params, r_T, T, tau, gh_points, time_nodes))
    return BondQuote(T, T + tau, price)


def bond_price_full(
    params: ModelParams,
    r_T: float,
    T: float,
    tau: float,
    n: int = 1,
    gh_points: int = DEFAULT_GH_POINTS,
    time_nodes: int | None = None,
) -> BondQuote:
    """KL terms ``0..n`` integrated by a tensor ``gh_points**(n+1)`` rule.

    ``n = 0`` coincides with :func:`bond_price_fast`.
    """
    if not 0 <= n <= MAX_FULL_TRUNCATION:
        raise QuadratureBudgetError(f"truncation n={n} outside [0, {MAX_FULL_TRUNCATION}]")
    rule = gauss_hermite_rule(gh_points)
    price = float(_bond_prices(params, r_T, T, tau, n + 1, rule, time_nodes))
    return BondQuote(T, T + tau, price)


def deterministic_bond_price(params: ModelParams, r_T: float, T: float, tau: float) -> float:
    """``exp(-int_0^tau rbar_{T,t} dt)``, the zero-volatility limit."""
    t, tw = legendre_rule(0.0, tau, 2 * DEFAULT_TIME_NODES)
    return math.exp(-float(np.exp(log_rbar(params, r_T, T, t)) @ tw))
