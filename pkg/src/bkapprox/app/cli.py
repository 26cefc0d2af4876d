"""``bk`` command line client.

Each subcommand builds a run configuration and either posts it to the service
at ``--server`` or validates and runs it in-process with the same schema.
Output goes to ``--out`` (or stdout) as CSV or JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click
import httpx

MODEL_KEYS = {"sigma", "b", "r0", "a"}


class ServiceError(click.ClickException):
    exit_code = 2


def _read_config(path: str | None) -> dict[str, Any]:
    """A run configuration, or a bare model file which becomes ``{"model": ...}``."""
    if path is None:
        return {}
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise click.FileError(str(p), hint=exc.strerror or str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise click.BadParameter(f"{p}: invalid JSON ({exc})", param_hint="--config") from exc
    if not isinstance(data, dict):
        raise click.BadParameter(f"{p}: expected a JSON object", param_hint="--config")
    if "sigma" in data and set(data) <= MODEL_KEYS:
        data = {"model": data}
    model_file = data.get("model_file")
    if model_file is not None:
        # Inline the model so a remote server never needs local file access.
        mp = Path(model_file)
        mp = mp if mp.is_absolute() else p.parent / mp
        try:
            data["model"] = json.loads(mp.read_text(encoding="utf-8"))
        except OSError as exc:
            raise click.FileError(str(mp), hint=exc.strerror or str(exc)) from exc
        del data["model_file"]
    return data


def _post(config: dict[str, Any], server: str | None) -> dict[str, Any]:
    """Run remotely when ``server`` is given, else validate and execute in this process."""
    if server:
        try:
            resp = httpx.post(server.rstrip("/") + "/run", json=config, timeout=None)
        except httpx.HTTPError as exc:
            raise click.ClickException(f"cannot reach {server}: {exc}") from exc
        if resp.status_code != 200:
            raise ServiceError(_remote_error(resp))
        return resp.json()

    from pydantic import ValidationError

    from ..service.schemas import RunConfig
    from .runner import execute

    try:
        run_config = RunConfig.model_validate(config)
    except ValidationError as exc:
        raise ServiceError(_format_detail(exc.errors())) from exc
    try:
        return execute(run_config)
    except (ValueError, ArithmeticError) as exc:
        raise ServiceError(str(exc)) from exc


def _format_detail(detail: list[dict]) -> str:
    lines = []
    for err in detail:
        loc = ".".join(str(x) for x in err.get("loc", ()) if x != "body")
        lines.append(f"{loc or 'config'}: {err.get('msg')}")
    return "invalid configuration\n  " + "\n  ".join(lines)


def _remote_error(resp: httpx.Response) -> str:
    try:
        detail = resp.json().get("detail")
    except ValueError:
        return f"HTTP {resp.status_code}: {resp.text}"
    return _format_detail(detail) if isinstance(detail, list) else str(detail)


def _write(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise click.FileError(out, hint=exc.strerror or str(exc)) from exc


def _common(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Run configuration or model JSON."),
        click.option("--out", type=click.Path(dir_okay=False), help="Output file (default stdout)."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), help="Output format."),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Monte Carlo seed."),
        click.option("--gh-points", type=int, help="Gauss-Hermite points for bond prices."),
        click.option("--k", type=int, help="Interpolation nodes for the exercise boundary."),
        click.option("--m", type=int, help="Bridge KL terms for conditional discounts."),
        click.option("--n", type=int, help="Gauss-Hermite points for conditional discounts."),
        click.option("--paths", type=int, help="Monte Carlo paths."),
        click.option("--steps", type=int, help="Monte Carlo steps per year."),
        click.option("--lattice-steps", type=int, help="Lattice steps per year (coarse level)."),
        click.option("--server", envvar="BK_SERVER", help="Service URL; runs in-process when omitted."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _run(task: str, opts: dict[str, Any], extra: dict[str, Any] | None = None) -> None:
    from .runner import render

    config = _read_config(opts.pop("config_path"))
    if config.get("task") not in (None, task):
        raise click.BadParameter(f"config task {config['task']!r} does not match command {task!r}", param_hint="--config")
    config["task"] = task
    for key, value in (extra or {}).items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key] = {**config[key], **value}
        elif value is not None:
            config[key] = value
    overrides = config.setdefault("overrides", {})
    for key in ("seed", "gh_points", "k", "m", "n", "paths", "steps", "lattice_steps"):
        if opts.get(key) is not None:
            overrides[key] = opts[key]
    output = config.setdefault("output", {})
    fmt = opts.get("fmt") or output.get("format", "csv")
    out = opts.get("out") or output.get("path")
    payload = _post(config, opts.get("server"))
    _write(render(payload, fmt), out)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Black-Karasinski bond and swaption approximations with Monte Carlo and lattice benchmarks."""


@main.command("bond-table")
@_common
def bond_table(**opts) -> None:
    """Approximate vs Monte Carlo zero-coupon yields."""
    _run("bond-table", opts)


@main.command("swaption-table")
@click.option("--kind", type=click.Choice(["moneyness", "atm"]), help="Strike sweep or ATM grid.")
@_common
def swaption_table(kind, **opts) -> None:
    """Approximate vs lattice implied vols."""
    _run("swaption-table", opts, {"grid": {"kind": kind}} if kind else None)


@main.command("parity-table")
@_common
def parity_table(**opts) -> None:
    """Payer minus receiver ATM implied vol."""
    _run("parity-table", opts)


@main.command("compare-table5")
@_common
def compare_table5(**opts) -> None:
    """High-volatility bond yields against Monte Carlo, with fixed reference columns."""
    _run("compare-table5", opts)


def _instrument_options(fn):
    options = [
        click.option("--instrument", type=click.Choice(["bond", "swaption"]), help="Instrument type."),
        click.option("--start", type=float, help="Bond start time T."),
        click.option("--tau", type=float, help="Bond time to maturity from start."),
        click.option("--r-start", type=float, help="Short rate at the bond start (fast/full/mc)."),
        click.option("--expiry", type=float, help="Swaption expiry."),
        click.option("--payments", type=int, help="Number of swap payments."),
        click.option("--period", type=float, help="Payment period in years."),
        click.option("--strike", type=float, help="Absolute strike."),
        click.option("--moneyness", type=float, help="Strike over forward swap rate."),
        click.option("--side", type=click.Choice(["payer", "receiver"]), help="Swaption side."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


_INSTRUMENT_KEYS = ("start", "tau", "r_start", "expiry", "payments", "period", "strike", "moneyness", "side")


def _instrument(opts: dict[str, Any]) -> dict[str, Any] | None:
    kind = opts.pop("instrument")
    fields = {k: opts.pop(k) for k in _INSTRUMENT_KEYS}
    fields = {k: v for k, v in fields.items() if v is not None}
    if kind is None:
        if fields:
            raise click.UsageError("--instrument is required with instrument options")
        return None
    return {"type": kind, **fields}


def _pricing_command(task: str, method_choice: bool):
    def command(**opts) -> None:
        inst = _instrument(opts)
        extra = {"instrument": inst}
        if method_choice:
            extra["method"] = opts.pop("method")
            extra["full_terms"] = opts.pop("full_terms")
        _run(task, opts, extra)

    return command


price = main.command("price", help="Price one bond or swaption with diagnostics.")(
    click.option("--method", type=click.Choice(["fast", "full", "mc", "lattice"]), help="Pricing method.")(
        click.option("--full-terms", type=click.IntRange(0, 3), help="KL terms beyond the first for method full.")(
            _instrument_options(_common(_pricing_command("price", True)))
        )
    )
)
mc = main.command("mc", help="Monte Carlo bond price.")(_instrument_options(_common(_pricing_command("mc", False))))
lattice = main.command("lattice", help="Lattice bond or swaption price.")(
    _instrument_options(_common(_pricing_command("lattice", False)))
)


@main.command("calibrate")
@click.option("--quotes", type=click.Path(dir_okay=False), help="JSON calibration section (r0, bonds, swaptions).")
@_common
def calibrate(quotes, **opts) -> None:
    """Bootstrap a(t) from zero yields and fit (sigma, b) to swaption vols."""
    extra = None
    if quotes:
        try:
            extra = {"calibration": json.loads(Path(quotes).read_text(encoding="utf-8"))}
        except OSError as exc:
            raise click.FileError(quotes, hint=exc.strerror or str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise click.BadParameter(f"{quotes}: invalid JSON ({exc})", param_hint="--quotes") from exc
    _run("calibrate", opts, extra)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("bkapprox.service.api:app", host=host, port=port)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
