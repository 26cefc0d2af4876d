"""Trinomial lattice on the OU deviation, used as the exact benchmark for bonds and swaptions.

The tree lives on ``y = sigma * X`` with a uniform step ``dt``. Each node's
three branches reproduce the exact one-step OU mean ``y e^{-b dt}`` and
variance ``sigma^2 V(dt)``; nodes beyond ``jmax`` switch to the inward
branching pattern so probabilities stay in ``[0, 1]``. The short rate at node
``(i, j)`` is ``exp(ln rbar_{0,t_i} + j dy)``, so the tree needs no fitting.

Each edge is discounted with the average of its two end-node rates, which
factorises into a half-step discount on either slice and keeps the error
second order in ``dt``. Swaption payoffs are cell-averaged in the one cell
where they kink, in a way that leaves tree put-call parity exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..model import ModelParams, log_rbar, ou_variance
from ..swaptions import SwaptionSpec

# Inner edge of the region where mean-reverting branching keeps all probabilities valid.
_SWITCH_THRESHOLD = 0.184


class OffGridWarning(UserWarning):
    """A requested date was snapped to the nearest lattice step."""


@dataclass(frozen=True)
class LatticeConfig:
    """Tree resolution.

    ``steps_per_year`` is doubled until the tree has at least ``min_steps``
    steps, so short horizons still get a fine grid; doubling keeps every date
    that was on the original grid.
    """

    steps_per_year: int = 64
    width_multiplier: float = 1.0
    min_steps: int = 512

    def __post_init__(self) -> None:
        if self.steps_per_year < 1:
            raise ValueError("steps_per_year must be at least 1")
        if not self.width_multiplier > 0:
            raise ValueError("width_multiplier must be positive")
        if self.min_steps < 0:
            raise ValueError("min_steps must be non-negative")

    def steps_per_year_for(self, horizon: float) -> int:
        spy = self.steps_per_year
        while spy * horizon < self.min_steps - 1e-9:
            spy *= 2
        return spy


@dataclass(frozen=True)
class Lattice:
    """Built tree with Arrow-Debreu prices on every slice.

    Attributes
    ----------
    dt, dy : float
        Time step and node spacing (in ``sigma * X`` units).
    jmax : int
        Largest node index; slice ``i`` spans ``-min(i, jmax) .. min(i, jmax)``.
    centre : ndarray of int
        Middle-branch target index for every ``j`` in ``-jmax .. jmax``.
    p_up, p_mid, p_down : ndarray
        Branch probabilities for the same ``j`` range.
    state_prices : tuple of ndarray
        ``Q_i[j]``: value at time 0 of 1 paid at node ``(i, j)``.
    """

    params: ModelParams
    config: LatticeConfig
    steps: int
    dt: float
    dy: float
    jmax: int
    centre: np.ndarray = field(repr=False)
    p_up: np.ndarray = field(repr=False)
    p_mid: np.ndarray = field(repr=False)
    p_down: np.ndarray = field(repr=False)
    state_prices: tuple = field(repr=False)

    @property
    def horizon(self) -> float:
        return self.steps * self.dt

    def width(self, i: int) -> int:
        return min(i, self.jmax)

    def nodes(self, i: int) -> np.ndarray:
        w = self.width(i)
        return np.arange(-w, w + 1)

    def short_rates(self, i: int) -> np.ndarray:
        t = i * self.dt
        return np.exp(log_rbar(self.params, self.params.r0, 0.0, t) + self.nodes(i) * self.dy)

    def step_index(self, t: float) -> int:
        """Slice index for time ``t``, snapping off-grid dates with a warning."""
        raw = t / self.dt
        i = int(round(raw))
        if abs(raw - i) > 1e-9:
            warnings.warn(f"t={t} is off the lattice grid; using t={i * self.dt}", OffGridWarning, stacklevel=3)
        if not 0 <= i <= self.steps:
            raise ValueError(f"t={t} outside lattice horizon [0, {self.horizon}]")
        return i

    def half_discount(self, i: int) -> np.ndarray:
        return np.exp(-0.5 * self.dt * self.short_rates(i))

    def rollback(self, values: np.ndarray, i: int) -> np.ndarray:
        """Discounted expectation at slice ``i`` of ``values`` given on slice ``i + 1``."""
        w_next = self.width(i + 1)
        j = self.nodes(i)
        c = self.centre[j + self.jmax] + w_next
        v = values * self.half_discount(i + 1)
        cont = (
            self.p_up[j + self.jmax] * v[c + 1]
            + self.p_mid[j + self.jmax] * v[c]
            + self.p_down[j + self.jmax] * v[c - 1]
        )
        return self.half_discount(i) * cont


def _branching(jmax: int, decay: float, var_ratio: float):
    j = np.arange(-jmax, jmax + 1)
    centre = j.copy()
    centre[0], centre[-1] = -jmax + 1, jmax - 1
    eta = j * decay - centre
    p_up = 0.5 * (var_ratio + eta * eta + eta)
    p_mid = 1.0 - var_ratio - eta * eta
    p_down = 0.5 * (var_ratio + eta * eta - eta)
    return centre, p_up, p_mid, p_down


def lattice_build(params: ModelParams, horizon: float, config: LatticeConfig | None = None) -> Lattice:
    """Build the tree out to ``horizon`` and run the forward Arrow-Debreu pass."""
    cfg = config or LatticeConfig()
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    spy = cfg.steps_per_year_for(horizon)
    steps = int(math.ceil(horizon * spy - 1e-9))
    dt = 1.0 / spy
    step_var = params.sigma**2 * float(ou_variance(params.b, dt))
    dy = cfg.width_multiplier * math.sqrt(3.0 * step_var)
    decay = math.exp(-params.b * dt)
    jmax = max(1, int(math.ceil(_SWITCH_THRESHOLD / (1.0 - decay))))
    centre, p_up, p_mid, p_down = _branching(jmax, decay, step_var / dy**2)
    probs = np.stack([p_up, p_mid, p_down])
    if np.any(probs < -1e-14) or np.any(probs > 1 + 1e-14):
        raise ValueError(
            f"branch probabilities leave [0, 1] for width_multiplier={cfg.width_multiplier}; "
            "use a value closer to 1"
        )
    for arr in (centre, p_up, p_mid, p_down):
        arr.setflags(write=False)

    lat = Lattice(params, cfg, steps, dt, dy, jmax, centre, p_up, p_mid, p_down, ())
    q = np.ones(1)
    slices = [q]
    for i in range(steps):
        j = lat.nodes(i)
        w_next = lat.width(i + 1)
        c = centre[j + jmax] + w_next
        flow = q * lat.half_discount(i)
        size = 2 * w_next + 1
        q = (
            np.bincount(c + 1, flow * p_up[j + jmax], minlength=size)
            + np.bincount(c, flow * p_mid[j + jmax], minlength=size)
            + np.bincount(c - 1, flow * p_down[j + jmax], minlength=size)
        ) * lat.half_discount(i + 1)
        q.setflags(write=False)
        slices.append(q)
    object.__setattr__(lat, "state_prices", tuple(slices))
    return lat


def lattice_zero_curve(lattice: Lattice, maturities) -> np.ndarray:
    """Time-0 zero-coupon prices ``B(0, t)``."""
    return np.array([lattice.state_prices[lattice.step_index(float(t))].sum() for t in np.atleast_1d(maturities)])


def lattice_bond_price(lattice: Lattice, T: float, tau: float) -> float:
    """``B(0, tau)`` when ``T = 0``; otherwise the forward price ``B(0, T+tau) / B(0, T)``."""
    if T < 0 or tau < 0:
        raise ValueError("T and tau must be non-negative")
    start, end = lattice_zero_curve(lattice, [T, T + tau])
    return float(end / start)


def lattice_bond_slice(lattice: Lattice, T: float, tau: float) -> np.ndarray:
    """Node values of ``B(T, T+tau)`` on the slice at ``T``."""
    i_start, i_end = lattice.step_index(T), lattice.step_index(T + tau)
    values = np.ones(2 * lattice.width(i_end) + 1)
    for i in range(i_end - 1, i_start - 1, -1):
        values = lattice.rollback(values, i)
    return values


def _coupon_slices(lattice: Lattice, spec: SwaptionSpec) -> tuple[np.ndarray, np.ndarray]:
    """Annuity and terminal-bond node values on the expiry slice, from one backward sweep each."""
    i_exp = lattice.step_index(spec.expiry)
    pay_steps = {lattice.step_index(spec.expiry + off) for off in spec.payment_offsets}
    i_end = max(pay_steps)
    annuity = np.zeros(2 * lattice.width(i_end) + 1)
    terminal = np.ones_like(annuity)
    for i in range(i_end, i_exp, -1):
        if i in pay_steps:
            annuity = annuity + spec.period
        annuity = lattice.rollback(annuity, i - 1)
        terminal = lattice.rollback(terminal, i - 1)
    return annuity, terminal


def _positive_part_mean(g0, g1):
    """Mean of ``max(g, 0)`` for ``g`` linear from ``g0`` to ``g1`` over a unit interval."""
    lo, hi = np.minimum(g0, g1), np.maximum(g0, g1)
    span = np.where(hi > lo, hi - lo, 1.0)
    mixed = hi * hi / (2.0 * span)
    return np.where(lo >= 0.0, 0.5 * (g0 + g1), np.where(hi <= 0.0, 0.0, mixed))


def smoothed_exercise_value(g: np.ndarray, omega: int) -> np.ndarray:
    """``(omega g)^+`` per node, cell-averaged where ``g`` changes sign within a node's cell.

    ``g`` is interpolated linearly between nodes and averaged over
    ``[j - 1/2, j + 1/2]``. In those kink cells half the gap between the node
    value and the cell mean is added back with sign ``omega``, so the payer
    and receiver values still differ by exactly ``g``.
    """
    g = np.asarray(g, dtype=float)
    out = np.maximum(omega * g, 0.0)
    if g.size < 3:
        return out
    mid_lo = 0.5 * (g[1:-1] + g[:-2])
    mid_hi = 0.5 * (g[1:-1] + g[2:])
    inner = g[1:-1]
    kink = (np.minimum(mid_lo, mid_hi) < 0.0) & (np.maximum(mid_lo, mid_hi) > 0.0)
    kink |= (np.sign(mid_lo) * np.sign(inner) < 0) | (np.sign(mid_hi) * np.sign(inner) < 0)
    if not kink.any():
        return out
    w = omega * inner
    cell = 0.5 * (_positive_part_mean(w, omega * mid_lo) + _positive_part_mean(w, omega * mid_hi))
    cell_mean = 0.5 * (0.5 * (inner + mid_lo) + 0.5 * (inner + mid_hi))
    smoothed = cell + 0.5 * omega * (inner - cell_mean)
    out[1:-1] = np.where(kink, smoothed, out[1:-1])
    return out


def lattice_swaption_price(lattice: Lattice, spec: SwaptionSpec) -> float:
    """Exercise value ``(omega (1 - C))^+`` on the expiry slice weighted by its state prices."""
    annuity, terminal = _coupon_slices(lattice, spec)
    coupon_sum = terminal + spec.strike * annuity
    payoff = smoothed_exercise_value(1.0 - coupon_sum, spec.omega)
    return float(lattice.state_prices[lattice.step_index(spec.expiry)] @ payoff)


def lattice_forward_swap_rate(lattice: Lattice, expiry: float, period: float, payments: int) -> tuple[float, float]:
    """``(forward swap rate, annuity)`` at time 0 from the tree's zero curve."""
    mats = expiry + period * np.arange(payments + 1)
    bonds = lattice_zero_curve(lattice, mats)
    annuity = period * bonds[1:].sum()
    return float((bonds[0] - bonds[-1]) / annuity), float(annuity)


def lattice_parity_gap(lattice: Lattice, spec: SwaptionSpec) -> float:
    """``payer - receiver - (B(0,T) - B(0,T+N delta) - S A_0)`` on the same tree; zero up to rounding."""
    payer = lattice_swaption_price(lattice, spec.with_side("payer"))
    receiver = lattice_swaption_price(lattice, spec.with_side("receiver"))
    mats = spec.expiry + spec.period * np.arange(spec.payments + 1)
    bonds = lattice_zero_curve(lattice, mats)
    annuity = spec.period * bonds[1:].sum()
    return payer - receiver - (bonds[0] - bonds[-1] - spec.strike * annuity)


@dataclass(frozen=True)
class LatticeOracle:
    """Richardson combination ``2 V(fine) - V(coarse)`` of two trees with step ratio 2.

    Tree option prices carry a monotone first-order error in ``dt``; the
    combination removes it. Every identity that holds on each tree (such as
    parity) still holds for the combination, since it is linear.
    With ``extrapolate=False`` only the coarse tree is used.
    """

    coarse: Lattice
    fine: Lattice | None = None

    @classmethod
    def build(
        cls, params: ModelParams, horizon: float, config: LatticeConfig | None = None, extrapolate: bool = True
    ) -> LatticeOracle:
        cfg = config or LatticeConfig()
        spy = cfg.steps_per_year_for(horizon)
        coarse = lattice_build(params, horizon, LatticeConfig(spy, cfg.width_multiplier, 0))
        if not extrapolate:
            return cls(coarse)
        fine_cfg = LatticeConfig(2 * spy, cfg.width_multiplier, 0)
        return cls(coarse, lattice_build(params, horizon, fine_cfg))

    def _combine(self, fn):
        coarse = fn(self.coarse)
        if self.fine is None:
            return coarse
        return 2.0 * fn(self.fine) - coarse

    def zero_curve(self, maturities) -> np.ndarray:
        return self._combine(lambda lat: lattice_zero_curve(lat, maturities))

    def bond_price(self, T: float, tau: float) -> float:
        start, end = self.zero_curve([T, T + tau])
        return float(end / start)

    def swaption_price(self, spec: SwaptionSpec) -> float:
        return float(self._combine(lambda lat: lattice_swaption_price(lat, spec)))

    def forward_swap_rate(self, expiry: float, period: float, payments: int) -> tuple[float, float]:
        mats = expiry + period * np.arange(payments + 1)
        bonds = self.zero_curve(mats)
        annuity = period * bonds[1:].sum()
        return float((bonds[0] - bonds[-1]) / annuity), float(annuity)

    def parity_gap(self, spec: SwaptionSpec) -> float:
        return float(self._combine(lambda lat: lattice_parity_gap(lat, spec)))
