"""Two-stage calibration: drift bootstrap from zero yields, then (sigma, b) from swaption vols.

Stage 1 fits a piecewise-constant ``a(t)`` with one segment per bond quote,
solving each level so the fast bond approximation reproduces the quoted
yield. Stage 2 runs Nelder-Mead over ``(sigma, b)`` inside a box, repeating
stage 1 at every trial point so the curve is always matched exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from ..bonds import DEFAULT_GH_POINTS, bond_price_fast
from ..model import ModelParams
from ..numerics import BracketError, solve_bracketed_root
from ..swaptions import DEFAULT_KMN, ImpliedVolError, Side, SwaptionSpec, forward_swap_rate, implied_vol, swaption_price

SIGMA_BOUNDS = (0.01, 2.0)
B_BOUNDS = (0.001, 1.0)
YIELD_TOLERANCE = 1e-10
_PENALTY = 1e6


@dataclass(frozen=True)
class BondYieldQuote:
    """Continuously compounded zero yield for maturity ``maturity``."""

    maturity: float
    yield_: float

    def __post_init__(self) -> None:
        if not self.maturity > 0:
            raise ValueError(f"maturity must be positive, got {self.maturity}")

    @property
    def label(self) -> str:
        return f"bond {self.maturity:g}y"


@dataclass(frozen=True)
class SwaptionVolQuote:
    """Black vol of a swaption with an absolute strike."""

    expiry: float
    period: float
    payments: int
    strike: float
    vol: float
    side: Side = "payer"

    def spec(self) -> SwaptionSpec:
        return SwaptionSpec(self.expiry, self.period, self.payments, self.strike, self.side)

    @property
    def label(self) -> str:
        return f"{self.side} {self.expiry:g}y x {self.period * self.payments:g}y K={self.strike:.6g}"


@dataclass
class CalibrationResult:
    params: ModelParams
    residuals: list[dict]
    objective: float
    iterations: int
    converged: bool
    message: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "residuals": self.residuals,
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "message": self.message,
        }


@dataclass(frozen=True)
class CalibrationSettings:
    gh_points: int = DEFAULT_GH_POINTS
    k: int = DEFAULT_KMN
    m: int = DEFAULT_KMN
    n: int = DEFAULT_KMN
    max_iterations: int = 200
    xatol: float = 1e-6
    fatol: float = 1e-16
    initial: tuple[float, float] = field(default=(0.4, 0.3))


# --------------------------------------------------------------------------
# Stage 1
# --------------------------------------------------------------------------

def _level_bracket(fn, guess: float) -> tuple[float, float]:
    width = 0.5
    for _ in range(40):
        lo, hi = guess - width, guess + width
        if fn(lo) * fn(hi) <= 0:
            return lo, hi
        width *= 2.0
    raise BracketError(f"no sign change for drift level around {guess}")


def bootstrap_drift(
    sigma: float,
    b: float,
    r0: float,
    bonds: Sequence[BondYieldQuote],
    gh_points: int = DEFAULT_GH_POINTS,
) -> ModelParams:
    """Piecewise-constant ``a(t)`` matching each quoted yield to :data:`YIELD_TOLERANCE`.

    Segment ``i`` spans ``[T_{i-1}, T_i)``; the last level extends beyond the
    longest maturity. Raises :class:`~bkapprox.numerics.BracketError` or
    ``ArithmeticError`` when a level cannot be found.
    """
    quotes = sorted(bonds, key=lambda q: q.maturity)
    mats = [q.maturity for q in quotes]
    if len(set(mats)) != len(mats):
        raise ValueError("bond quotes must have distinct maturities")
    knots = [0.0] + mats[:-1]
    levels: list[float] = []
    guess = b * math.log(quotes[0].yield_) if quotes[0].yield_ > 0 else 0.0
    for i, quote in enumerate(quotes):

        def mismatch(level: float) -> float:
            drift = tuple(zip(knots[: i + 1], levels + [level]))
            p = ModelParams(sigma, b, r0, drift)
            return bond_price_fast(p, r0, 0.0, quote.maturity, gh_points).ytm - quote.yield_

        lo, hi = _level_bracket(mismatch, guess)
        level = solve_bracketed_root(mismatch, lo, hi, tol=1e-15)
        err = abs(mismatch(level))
        if err > YIELD_TOLERANCE:
            raise ArithmeticError(f"{quote.label}: yield mismatch {err:.2e} after bootstrap")
        levels.append(level)
        guess = level
    return ModelParams(sigma, b, r0, tuple(zip(knots, levels)))


# --------------------------------------------------------------------------
# Stage 2
# --------------------------------------------------------------------------

def model_vol(params: ModelParams, quote: SwaptionVolQuote, settings: CalibrationSettings) -> float:
    """Black vol of the approximate price against the fast-bond forward and annuity."""
    forward, annuity = forward_swap_rate(params, quote.expiry, quote.period, quote.payments, settings.gh_points)
    price = swaption_price(params, quote.spec(), settings.m, settings.n, settings.k)
    return implied_vol(price, forward, quote.strike, annuity, quote.expiry, quote.side)


def _residuals(
    params: ModelParams,
    bonds: Sequence[BondYieldQuote],
    swaptions: Sequence[SwaptionVolQuote],
    settings: CalibrationSettings,
) -> list[dict]:
    out = []
    for q in bonds:
        y = bond_price_fast(params, params.r0, 0.0, q.maturity, settings.gh_points).ytm
        out.append({"instrument": q.label, "kind": "bond", "market": q.yield_, "model": y, "residual": y - q.yield_})
    for q in swaptions:
        try:
            v = model_vol(params, q, settings)
        except (ImpliedVolError, ArithmeticError, ValueError):
            v = None
        out.append({
            "instrument": q.label, "kind": "swaption", "market": q.vol, "model": v,
            "residual": None if v is None else v - q.vol,
        })
    return out


def _objective(residuals: list[dict], kind: str) -> float:
    total = 0.0
    for r in residuals:
        if r["kind"] != kind:
            continue
        if r["residual"] is None:
            return math.inf
        total += r["residual"] ** 2
    return total


def calibrate(
    r0: float,
    bonds: Sequence[BondYieldQuote],
    swaptions: Sequence[SwaptionVolQuote] = (),
    settings: CalibrationSettings | None = None,
) -> CalibrationResult:
    """Fit ``a(t)`` to ``bonds`` and ``(sigma, b)`` to ``swaptions``.

    With no swaption quotes, stage 2 is skipped and ``settings.initial`` gives
    ``(sigma, b)``. Failures never raise: the best iterate is returned with
    ``converged=False`` and the reason in ``message``.
    """
    s = settings or CalibrationSettings()
    started = time.perf_counter()
    if not bonds:
        raise ValueError("at least one bond quote is required for the drift bootstrap")
    sigma0, b0 = s.initial

    def fit(sigma: float, b: float) -> ModelParams:
        return bootstrap_drift(sigma, b, r0, bonds, s.gh_points)

    def finish(params, converged, iterations, message):
        res = _residuals(params, bonds, swaptions, s)
        kind = "swaption" if swaptions else "bond"
        return CalibrationResult(
            params, res, _objective(res, kind), iterations, converged, message,
            round(time.perf_counter() - started, 3),
        )

    if not swaptions:
        try:
            return finish(fit(sigma0, b0), True, 0, "stage 2 skipped: no swaption quotes")
        except (ArithmeticError, ValueError) as exc:
            fallback = ModelParams(sigma0, b0, r0)
            return finish(fallback, False, 0, f"drift bootstrap failed: {exc}")

    best: dict = {"value": math.inf, "params": None}

    def loss(x: np.ndarray) -> float:
        sigma, b = float(x[0]), float(x[1])
        if not (SIGMA_BOUNDS[0] < sigma <= SIGMA_BOUNDS[1] and B_BOUNDS[0] < b <= B_BOUNDS[1]):
            return _PENALTY
        try:
            params = fit(sigma, b)
            value = 0.0
            for q in swaptions:
                value += (model_vol(params, q, s) - q.vol) ** 2
        except (ArithmeticError, ValueError):
            return _PENALTY
        if value < best["value"]:
            best.update(value=value, params=params)
        return value

    eps = 1e-9
    try:
        opt = minimize(
            loss,
            np.array([sigma0, b0]),
            method="Nelder-Mead",
            bounds=[(SIGMA_BOUNDS[0] + eps, SIGMA_BOUNDS[1]), (B_BOUNDS[0] + eps, B_BOUNDS[1])],
            options={"maxiter": s.max_iterations, "xatol": s.xatol, "fatol": s.fatol},
        )
        converged, iterations, message = bool(opt.success), int(opt.nit), str(opt.message)
    except Exception as exc:  # keep the best iterate whatever the optimiser did
        converged, iterations, message = False, 0, f"optimiser failed: {exc}"
    if best["params"] is None:
        return finish(ModelParams(sigma0, b0, r0), False, iterations, message or "no feasible point")
    return finish(best["params"], converged, iterations, message)


def synthetic_quotes(
    params: ModelParams,
    maturities: Sequence[float],
    swaptions: Sequence[tuple[float, float, int, float, Side]],
    settings: CalibrationSettings | None = None,
) -> tuple[list[BondYieldQuote], list[SwaptionVolQuote]]:
    """Quotes generated by the model itself.

    ``swaptions`` holds ``(expiry, period, payments, moneyness, side)``; the
    strike is ``moneyness`` times the fast-bond forward swap rate.
    """
    s = settings or CalibrationSettings()
    bonds = [
        BondYieldQuote(float(t), bond_price_fast(params, params.r0, 0.0, float(t), s.gh_points).ytm)
        for t in maturities
    ]
    vols = []
    for expiry, period, payments, moneyness, side in swaptions:
        forward, _ = forward_swap_rate(params, expiry, period, payments, s.gh_points)
        quote = SwaptionVolQuote(expiry, period, payments, moneyness * forward, 0.0, side)
        vols.append(SwaptionVolQuote(expiry, period, payments, quote.strike, model_vol(params, quote, s), side))
    return bonds, vols
