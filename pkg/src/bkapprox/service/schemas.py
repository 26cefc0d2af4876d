"""Request models for the pricing service; unknown keys are rejected everywhere."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..model import ModelParams, load_model


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Task(str, Enum):
    BOND_TABLE = "bond-table"
    SWAPTION_TABLE = "swaption-table"
    PARITY_TABLE = "parity-table"
    COMPARE_TABLE5 = "compare-table5"
    PRICE = "price"
    MC = "mc"
    LATTICE = "lattice"
    CALIBRATE = "calibrate"


TABLE_TASKS = {Task.BOND_TABLE, Task.SWAPTION_TABLE, Task.PARITY_TABLE, Task.COMPARE_TABLE5}
PRICING_TASKS = {Task.PRICE, Task.MC, Task.LATTICE}


class DriftSegment(Strict):
    t: float = Field(ge=0)
    level: float


class ModelSchema(Strict):
    sigma: float = Field(gt=0)
    b: float = Field(gt=0)
    r0: float = Field(gt=0)
    a: list[DriftSegment] = Field(default_factory=lambda: [DriftSegment(t=0.0, level=0.0)], min_length=1)

    def to_params(self) -> ModelParams:
        return ModelParams.from_dict(self.model_dump())

    @classmethod
    def from_params(cls, params: ModelParams) -> ModelSchema:
        return cls.model_validate(params.to_dict())


class OutputSpec(Strict):
    path: str | None = None
    format: Literal["csv", "json"] = "csv"


class Overrides(Strict):
    """Numerical settings; omitted fields keep their defaults."""

    gh_points: int | None = Field(None, ge=1, le=200)
    k: int | None = Field(None, ge=1, le=40)
    m: int | None = Field(None, ge=1, le=40)
    n: int | None = Field(None, ge=1, le=40)
    seed: int | None = Field(None, ge=0, lt=2**64)
    paths: int | None = Field(None, ge=2)
    steps: int | None = Field(None, ge=4)
    lattice_steps: int | None = Field(None, ge=4)
    antithetic: bool | None = None
    extrapolate: bool | None = None
    forward_source: Literal["lattice", "fast"] | None = None
    mean_level: float | None = Field(None, gt=0)
    period: float | None = Field(None, gt=0)


class BondInstrument(Strict):
    type: Literal["bond"] = "bond"
    start: float = Field(0.0, ge=0)
    tau: float = Field(gt=0)
    r_start: float | None = Field(None, gt=0)


class SwaptionInstrument(Strict):
    type: Literal["swaption"] = "swaption"
    expiry: float = Field(gt=0)
    period: float = Field(1.0, gt=0)
    payments: int = Field(ge=1)
    side: Literal["payer", "receiver"] = "payer"
    strike: float | None = Field(None, ge=0)
    moneyness: float | None = Field(None, gt=0)

    @model_validator(mode="after")
    def _one_strike(self) -> SwaptionInstrument:
        if (self.strike is None) == (self.moneyness is None):
            raise ValueError("give exactly one of strike or moneyness")
        return self


Instrument = Annotated[Union[BondInstrument, SwaptionInstrument], Field(discriminator="type")]


class BondQuoteSchema(Strict):
    maturity: float = Field(gt=0)
    yield_: float = Field(alias="yield")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class SwaptionQuoteSchema(Strict):
    expiry: float = Field(gt=0)
    period: float = Field(1.0, gt=0)
    payments: int = Field(ge=1)
    strike: float = Field(gt=0)
    vol: float = Field(gt=0)
    side: Literal["payer", "receiver"] = "payer"


class CalibrationSpec(Strict):
    r0: float = Field(gt=0)
    bonds: list[BondQuoteSchema] = Field(min_length=1)
    swaptions: list[SwaptionQuoteSchema] = Field(default_factory=list)
    initial_sigma: float = Field(0.4, gt=0.01, le=2.0)
    initial_b: float = Field(0.3, gt=0.001, le=1.0)
    max_iterations: int = Field(200, ge=1)


class GridSpec(Strict):
    """Restricts a table run; omitted fields use the published grid."""

    models: list[ModelSchema] | None = None
    maturities: list[float] | None = None
    expiries: list[float] | None = None
    tenors: list[float] | None = None
    kind: Literal["moneyness", "atm"] = "moneyness"


class RunConfig(Strict):
    """Everything one run needs. ``model`` and ``model_file`` are alternatives."""

    task: Task
    model: ModelSchema | None = None
    model_file: str | None = None
    output: OutputSpec = Field(default_factory=OutputSpec)
    overrides: Overrides = Field(default_factory=Overrides)
    grid: GridSpec = Field(default_factory=GridSpec)
    instrument: Instrument | None = None
    method: Literal["fast", "full", "mc", "lattice"] | None = None
    full_terms: int = Field(1, ge=0, le=3)
    calibration: CalibrationSpec | None = None

    @model_validator(mode="after")
    def _task_fields(self) -> RunConfig:
        if self.model is not None and self.model_file is not None:
            raise ValueError("give model or model_file, not both")
        if self.task in PRICING_TASKS:
            if self.model is None and self.model_file is None:
                raise ValueError(f"task {self.task.value!r} requires model or model_file")
            if self.instrument is None:
                raise ValueError(f"task {self.task.value!r} requires instrument")
            implied = {Task.MC: "mc", Task.LATTICE: "lattice"}.get(self.task)
            if implied and self.method not in (None, implied):
                raise ValueError(f"task {self.task.value!r} implies method {implied!r}, got {self.method!r}")
        if self.task == Task.CALIBRATE and self.calibration is None:
            raise ValueError("task 'calibrate' requires calibration")
        return self

    def resolved_method(self) -> str:
        return {Task.MC: "mc", Task.LATTICE: "lattice"}.get(self.task) or self.method or "fast"

    def resolved_model(self, base_dir: Path | None = None) -> ModelParams | None:
        if self.model is not None:
            return self.model.to_params()
        if self.model_file is not None:
            path = Path(self.model_file)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            try:
                return load_model(path)
            except OSError as exc:
                raise ValueError(f"cannot read model file {path}: {exc.strerror or exc}") from exc
        return None
