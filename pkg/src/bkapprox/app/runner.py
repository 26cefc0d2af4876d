"""Dispatch of a validated :class:`RunConfig` to the table, pricing and calibration code."""

from __future__ import annotations

import csv
import io
import json
from typing import Any

from ..model import ModelParams
from ..service.schemas import RunConfig, Task
from .calibration import BondYieldQuote, CalibrationSettings, SwaptionVolQuote, calibrate
from .output import Table
from .pricing import BondRequest, SwaptionRequest, price_bond, price_swaption
from .tables import (
    TableSettings,
    run_bond_table,
    run_compare_table5,
    run_parity_table,
    run_swaption_table,
    with_overrides,
)


def table_settings(config: RunConfig) -> TableSettings:
    return with_overrides(TableSettings(), **config.overrides.model_dump())


def _grid_models(config: RunConfig) -> list[ModelParams] | None:
    if config.grid.models is not None:
        return [m.to_params() for m in config.grid.models]
    model = config.resolved_model()
    return [model] if model is not None else None


def _run_table(config: RunConfig) -> Table:
    s = table_settings(config)
    g = config.grid
    params = _grid_models(config)
    grid_kw = {k: v for k, v in (("expiries", g.expiries), ("tenors", g.tenors)) if v is not None}
    if config.task == Task.BOND_TABLE:
        kw = {"maturities": g.maturities} if g.maturities is not None else {}
        return run_bond_table(s, params, **kw)
    if config.task == Task.SWAPTION_TABLE:
        return run_swaption_table(s, params, g.kind, **grid_kw)
    if config.task == Task.PARITY_TABLE:
        return run_parity_table(s, params, **grid_kw)
    return run_compare_table5(s)


def _run_price(config: RunConfig) -> dict[str, Any]:
    params = config.resolved_model()
    s = table_settings(config)
    method = config.resolved_method()
    inst = config.instrument
    if inst.type == "bond":
        res = price_bond(
            params, BondRequest(inst.start, inst.tau, inst.r_start), method,
            gh_points=s.gh_points, n=config.full_terms, mc=s.mc, lattice=s.lattice,
        )
    else:
        req = SwaptionRequest(inst.expiry, inst.period, inst.payments, inst.side, inst.strike, inst.moneyness)
        res = price_swaption(
            params, req, method, k=s.k, m=s.m, n=s.n,
            forward_source=s.forward_source, lattice=s.lattice,
        )
    out = res.to_dict()
    out["instrument"] = inst.model_dump()
    out["model"] = params.to_dict()
    return out


def _run_calibration(config: RunConfig) -> dict[str, Any]:
    c = config.calibration
    s = table_settings(config)
    settings = CalibrationSettings(
        gh_points=s.gh_points, k=s.k, m=s.m, n=s.n,
        max_iterations=c.max_iterations, initial=(c.initial_sigma, c.initial_b),
    )
    bonds = [BondYieldQuote(q.maturity, q.yield_) for q in c.bonds]
    vols = [SwaptionVolQuote(q.expiry, q.period, q.payments, q.strike, q.vol, q.side) for q in c.swaptions]
    return calibrate(c.r0, bonds, vols, settings).to_dict()


def execute(config: RunConfig) -> dict[str, Any]:
    """Run ``config`` and return a JSON-ready payload ``{task, kind, body}``."""
    if config.task in (Task.BOND_TABLE, Task.SWAPTION_TABLE, Task.PARITY_TABLE, Task.COMPARE_TABLE5):
        return {"task": config.task.value, "kind": "table", "body": _run_table(config).to_dict()}
    if config.task == Task.CALIBRATE:
        return {"task": config.task.value, "kind": "calibration", "body": _run_calibration(config)}
    return {"task": config.task.value, "kind": "price", "body": _run_price(config)}


def _flatten(data: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(data, dict):
        items: list[tuple[str, Any]] = []
        for k, v in data.items():
            items += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return items
    if isinstance(data, list) and data and isinstance(data[0], dict):
        items = []
        for i, v in enumerate(data):
            items += _flatten(v, f"{prefix}[{i}]")
        return items
    if isinstance(data, list):
        return [(prefix, json.dumps(data))]
    return [(prefix, data)]


def render(payload: dict[str, Any], fmt: str) -> str:
    """CSV or JSON text for a payload from :func:`execute`.

    Tables keep their own CSV layout; other results become ``key,value`` rows.
    """
    if fmt == "json":
        return json.dumps(payload["body"], indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}; use csv or json")
    if payload["kind"] == "table":
        return Table.from_dict(payload["body"]).to_csv()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in _flatten(payload["body"]):
        writer.writerow([key, "" if value is None else value])
    return buf.getvalue()

