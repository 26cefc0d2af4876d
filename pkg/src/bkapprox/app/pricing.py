"""Single-instrument pricing with diagnostics, shared by the API and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal

from ..bonds import DEFAULT_GH_POINTS, bond_price_fast, bond_price_full, time_nodes_for
from ..model import ModelParams
from ..oracles.lattice import LatticeConfig, LatticeOracle
from ..oracles.montecarlo import McConfig, mc_bond_price
from ..swaptions import (
    DEFAULT_KMN,
    ImpliedVolError,
    SwaptionSpec,
    forward_swap_rate,
    implied_vol,
    swaption_price_details,
)

Method = Literal["fast", "full", "mc", "lattice"]


@dataclass(frozen=True)
class BondRequest:
    start: float
    tau: float
    r_start: float | None = None


@dataclass(frozen=True)
class SwaptionRequest:
    expiry: float
    period: float
    payments: int
    side: Literal["payer", "receiver"] = "payer"
    strike: float | None = None
    moneyness: float | None = None

    def __post_init__(self) -> None:
        if (self.strike is None) == (self.moneyness is None):
            raise ValueError("give exactly one of strike or moneyness")


@dataclass
class PriceResult:
    price: float
    yield_: float | None = None
    implied_vol: float | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"price": self.price}
        if self.yield_ is not None:
            out["yield"] = self.yield_
        if self.implied_vol is not None or "forward" in self.diagnostics:
            out["implied_vol"] = self.implied_vol
        out["diagnostics"] = self.diagnostics
        return out


def price_bond(
    params: ModelParams,
    req: BondRequest,
    method: Method = "fast",
    gh_points: int = DEFAULT_GH_POINTS,
    n: int = 1,
    mc: McConfig | None = None,
    lattice: LatticeConfig | None = None,
) -> PriceResult:
    r = params.r0 if req.r_start is None else req.r_start
    diag: dict[str, Any] = {"method": method}
    if method == "fast":
        price = bond_price_fast(params, r, req.start, req.tau, gh_points).price
        diag.update(gh_points=gh_points, time_nodes=time_nodes_for(params, req.tau))
    elif method == "full":
        price = bond_price_full(params, r, req.start, req.tau, n, gh_points).price
        diag.update(gh_points=gh_points, truncation=n, quadrature_points=gh_points ** (n + 1))
    elif method == "mc":
        cfg = mc or McConfig()
        est = mc_bond_price(params, req.start, req.tau, cfg, r)
        price = est.mean
        diag.update(stderr=est.stderr, paths=cfg.paths, steps_per_year=cfg.steps_per_year, seed=cfg.seed)
    elif method == "lattice":
        if req.r_start is not None and req.r_start != params.r0:
            raise ValueError("lattice bond pricing starts from r0; r_start is not supported")
        cfg = lattice or LatticeConfig()
        oracle = LatticeOracle.build(params, req.start + req.tau, cfg)
        price = oracle.bond_price(req.start, req.tau)
        diag.update(steps_per_year=int(round(1.0 / oracle.coarse.dt)), extrapolated=True)
        if req.start > 0:
            diag["note"] = "forward bond price B(0,T+tau)/B(0,T)"
    else:
        raise ValueError(f"unknown bond method {method!r}")
    return PriceResult(price, -math.log(price) / req.tau if req.tau > 0 else None, diagnostics=diag)


def price_swaption(
    params: ModelParams,
    req: SwaptionRequest,
    method: Method = "fast",
    k: int = DEFAULT_KMN,
    m: int = DEFAULT_KMN,
    n: int = DEFAULT_KMN,
    forward_source: Literal["lattice", "fast"] = "lattice",
    lattice: LatticeConfig | None = None,
) -> PriceResult:
    """Approximate (``fast``) or lattice price, with implied vol against the chosen forward."""
    if method not in ("fast", "lattice"):
        raise ValueError(f"swaption method must be 'fast' or 'lattice', got {method!r}")
    oracle = None
    if method == "lattice" or forward_source == "lattice":
        oracle = LatticeOracle.build(params, req.expiry + req.period * req.payments, lattice or LatticeConfig())
    if forward_source == "lattice":
        forward, annuity = oracle.forward_swap_rate(req.expiry, req.period, req.payments)
    else:
        forward, annuity = forward_swap_rate(params, req.expiry, req.period, req.payments)
    strike = req.strike if req.strike is not None else req.moneyness * forward
    spec = SwaptionSpec(req.expiry, req.period, req.payments, strike, req.side)
    diag: dict[str, Any] = {"method": method, "forward": forward, "annuity": annuity, "strike": strike,
                            "forward_source": forward_source}
    if method == "fast":
        res = swaption_price_details(params, spec, m, n, k)
        bnd = res.boundary
        price = res.price
        diag.update(
            k=k, m=m, n=n, regime=res.regime,
            boundary_z=None if math.isinf(bnd.z0) else bnd.z0,
            boundary_x=None if math.isinf(bnd.x0) else bnd.x0,
            bracket=list(bnd.bracket) if bnd.bracket else None,
            node_values=[float(v) for v in bnd.node_values],
        )
    else:
        price = oracle.swaption_price(spec)
        diag.update(parity_gap=oracle.parity_gap(spec))
    try:
        vol = implied_vol(price, forward, strike, annuity, spec.expiry, spec.side)
    except ImpliedVolError as exc:
        vol = None
        diag["implied_vol_error"] = str(exc)
    return PriceResult(price, implied_vol=vol, diagnostics=diag)
