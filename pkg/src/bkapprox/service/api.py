"""FastAPI application; every endpoint validates a :class:`RunConfig` and runs it in-process."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..app.runner import execute
from .schemas import PRICING_TASKS, TABLE_TASKS, RunConfig, Task

app = FastAPI(title="bkapprox", version=__version__)


def _run(config: RunConfig) -> dict:
    try:
        return execute(config)
    except (ValueError, ArithmeticError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _expect(config: RunConfig, allowed: set[Task]) -> None:
    if config.task not in allowed:
        names = ", ".join(sorted(t.value for t in allowed))
        raise HTTPException(status_code=422, detail=f"task {config.task.value!r} not served here; expected {names}")


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/run")
def run(config: RunConfig) -> dict:
    """Any task; the payload is ``{task, kind, body}``."""
    return _run(config)


@app.post("/tables")
def tables(config: RunConfig) -> dict:
    _expect(config, TABLE_TASKS)
    return _run(config)


@app.post("/price")
def price(config: RunConfig) -> dict:
    _expect(config, PRICING_TASKS)
    return _run(config)


@app.post("/calibrate")
def calibrate(config: RunConfig) -> dict:
    _expect(config, {Task.CALIBRATE})
    return _run(config)
