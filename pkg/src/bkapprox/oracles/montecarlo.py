"""Monte Carlo benchmark for zero-coupon bonds and conditional discount factors.

``X`` is simulated with its exact Gaussian transition on a grid that contains
every requested maturity, the short rate is ``rbar_{u,t} exp(sigma X_t)`` and
``int r dt`` uses the trapezoid rule. One simulation serves all maturities;
the same normals are reused for every parameter set in a batch, which makes
differences between rows far less noisy than the rows themselves.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..model import ModelParams, log_rbar, ou_variance

# Normals per chunk are (pairs, steps); this caps that block at ~32 MB.
_CHUNK_DRAWS = 4_000_000


@dataclass(frozen=True)
class McConfig:
    """Simulation settings; ``seed`` is recorded in every table that uses it."""

    paths: int = 1_000_000
    steps_per_year: int = 64
    seed: int = 20240607
    antithetic: bool = True

    def __post_init__(self) -> None:
        if self.paths < 2:
            raise ValueError("paths must be at least 2")
        if self.antithetic and self.paths % 2:
            raise ValueError("paths must be even with antithetic sampling")
        if self.steps_per_year < 4:
            raise ValueError("steps_per_year must be at least 4")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    paths: int
    valid: bool = True

    def yield_for(self, tau: float) -> float:
        return -math.log(self.mean) / tau


class _Accumulator:
    """Running mean and sum of squared deviations, merged chunk by chunk."""

    def __init__(self, shape):
        self.n = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def add(self, samples: np.ndarray) -> None:
        k = samples.shape[0]
        if k == 0:
            return
        mean = samples.mean(axis=0)
        m2 = ((samples - mean) ** 2).sum(axis=0)
        total = self.n + k
        delta = mean - self.mean
        self.mean = self.mean + delta * (k / total)
        self.m2 = self.m2 + m2 + delta * delta * (self.n * k / total)
        self.n = total

    def stderr(self) -> np.ndarray:
        if self.n < 2:
            return np.full_like(self.mean, np.nan)
        return np.sqrt(self.m2 / (self.n - 1) / self.n)


def time_grid(horizon: float, steps_per_year: int, extra: Sequence[float] = ()) -> np.ndarray:
    """Uniform grid ``k / steps_per_year`` merged with the ``extra`` dates."""
    n = int(math.ceil(horizon * steps_per_year - 1e-9))
    base = np.minimum(np.arange(n + 1) / steps_per_year, horizon)
    grid = np.union1d(base, np.asarray(list(extra) + [horizon], dtype=float))
    keep = np.concatenate([[True], np.diff(grid) > 1e-12])
    return grid[keep]


def _chunk_sizes(samples: int, steps: int) -> list[int]:
    per = max(1, _CHUNK_DRAWS // max(steps, 1))
    return [min(per, samples - s) for s in range(0, samples, per)]


def _ou_paths(b: float, dts: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Exact OU recursion from ``X_0 = 0``; ``normals`` is (steps, paths), output (steps+1, paths)."""
    decay = np.exp(-b * dts)
    scale = np.sqrt(ou_variance(b, dts))
    x = np.zeros((normals.shape[0] + 1, normals.shape[1]))
    for i in range(normals.shape[0]):
        np.multiply(x[i], decay[i], out=x[i + 1])
        x[i + 1] += scale[i] * normals[i]
    return x


def simulate_ou(b: float, times: Sequence[float], paths: int, seed: int) -> np.ndarray:
    """Exact OU samples at ``times`` (increasing, starting after 0); shape (paths, len(times))."""
    times = np.asarray(times, dtype=float)
    dts = np.diff(np.concatenate([[0.0], times]))
    if np.any(dts <= 0):
        raise ValueError("times must be strictly increasing and positive")
    z = np.random.default_rng(seed).standard_normal((len(times), paths))
    return _ou_paths(b, dts, z)[1:].T


def _trapezoid_weights(grid: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Column ``m`` integrates over ``grid[0 .. idx[m]]`` by the trapezoid rule."""
    dts = np.diff(grid)
    w = np.zeros((len(grid), len(idx)))
    for m, end in enumerate(idx):
        w[:end, m] += 0.5 * dts[:end]
        w[1 : end + 1, m] += 0.5 * dts[:end]
    return w


def _normal_chunks(cfg: McConfig, steps: int) -> Iterator[np.ndarray]:
    """Normals of shape (steps, pairs) per chunk from independent spawned substreams."""
    draws = cfg.paths // 2 if cfg.antithetic else cfg.paths
    sizes = _chunk_sizes(draws, steps)
    streams = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    for size, ss in zip(sizes, streams):
        yield np.random.default_rng(ss).standard_normal((steps, size))


def mc_bond_curves(
    param_sets: Sequence[ModelParams],
    maturities: Sequence[float],
    cfg: McConfig | None = None,
    start: float = 0.0,
    r_start: Sequence[float] | None = None,
) -> list[list[McEstimate]]:
    """``B(start, start + tau)`` for every parameter set and every ``tau`` in ``maturities``.

    All parameter sets share the same normals. ``r_start`` gives the short rate
    at ``start`` per set (defaults to each set's ``r0``).
    """
    cfg = cfg or McConfig()
    mats = np.asarray(maturities, dtype=float)
    if np.any(mats <= 0):
        raise ValueError("maturities must be positive")
    grid = time_grid(float(mats.max()), cfg.steps_per_year, mats)
    idx = np.searchsorted(grid, mats - 1e-12)
    weights = _trapezoid_weights(grid, idx)
    dts = np.diff(grid)
    rates = list(r_start) if r_start is not None else [p.r0 for p in param_sets]

    # Integrand for each set is rbar(t) * exp(sigma X_t); fold rbar into the weights.
    groups: dict[tuple[float, float], list[int]] = defaultdict(list)
    for s, p in enumerate(param_sets):
        groups[(p.b, p.sigma)].append(s)
    folded = {
        key: np.concatenate(
            [weights * np.exp(log_rbar(param_sets[s], rates[s], start, grid))[:, None] for s in members], axis=1
        )
        for key, members in groups.items()
    }
    accs = {key: _Accumulator(folded[key].shape[1]) for key in groups}

    for z in _normal_chunks(cfg, len(dts)):
        x_by_b: dict[float, np.ndarray] = {}
        for (b, sigma), w in folded.items():
            if b not in x_by_b:
                x_by_b[b] = _ou_paths(b, dts, z).T  # (pairs, steps+1)
            growth = np.exp(sigma * x_by_b[b])
            disc = np.exp(-(growth @ w))
            if cfg.antithetic:
                disc = 0.5 * (disc + np.exp(-(np.reciprocal(growth) @ w)))
            accs[(b, sigma)].add(disc)

    out: list[list[McEstimate]] = [[] for _ in param_sets]
    for key, members in groups.items():
        acc = accs[key]
        mean, err = acc.mean.reshape(len(members), -1), acc.stderr().reshape(len(members), -1)
        for row, s in enumerate(members):
            out[s] = [McEstimate(float(m), float(e), cfg.paths) for m, e in zip(mean[row], err[row])]
    return out


def mc_bond_price(
    params: ModelParams, T: float, tau: float, cfg: McConfig | None = None, r_T: float | None = None
) -> McEstimate:
    """``B(T, T+tau)`` given the short rate ``r_T`` at ``T`` (default ``params.r0``)."""
    r = params.r0 if r_T is None else r_T
    return mc_bond_curves([params], [tau], cfg, start=T, r_start=[r])[0][0]


def mc_conditional_discount(
    params: ModelParams, T: float, x_bins: Sequence[float], cfg: McConfig | None = None
) -> list[McEstimate]:
    """``E[exp(-int_0^T r dt) | X_T in bin]`` for consecutive bin edges ``x_bins``.

    Antithetic partners land in mirrored bins, so every path is binned on its
    own. Bins with fewer than two paths are returned with ``valid=False``.
    """
    cfg = cfg or McConfig()
    edges = np.asarray(x_bins, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("x_bins must be at least two increasing edges")
    grid = time_grid(T, cfg.steps_per_year)
    dts = np.diff(grid)
    weights = _trapezoid_weights(grid, np.array([len(grid) - 1]))[:, 0]
    weights = weights * np.exp(log_rbar(params, params.r0, 0.0, grid))
    nbins = edges.size - 1
    count = np.zeros(nbins)
    total = np.zeros(nbins)
    total_sq = np.zeros(nbins)
    for z in _normal_chunks(cfg, len(dts)):
        x = _ou_paths(params.b, dts, z).T
        signs = (1.0, -1.0) if cfg.antithetic else (1.0,)
        for sgn in signs:
            disc = np.exp(-(np.exp(sgn * params.sigma * x) @ weights))
            which = np.searchsorted(edges, sgn * x[:, -1], side="right") - 1
            inside = (which >= 0) & (which < nbins)
            count += np.bincount(which[inside], minlength=nbins)
            total += np.bincount(which[inside], disc[inside], minlength=nbins)
            total_sq += np.bincount(which[inside], disc[inside] ** 2, minlength=nbins)
    out = []
    for n, s, s2 in zip(count, total, total_sq):
        if n < 2:
            out.append(McEstimate(float("nan"), float("nan"), int(n), valid=False))
            continue
        mean = s / n
        var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
        out.append(McEstimate(float(mean), math.sqrt(var / n), int(n)))
    return out
