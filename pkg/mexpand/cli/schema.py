"""Declarative experiment documents; unknown keys are rejected."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

ExperimentKind = Literal[
    "converge",
    "strang-fix",
    "compat",
    "solve-coeffs",
    "reproduce",
    "brown",
    "falsify",
    "ode-demo",
]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NamedSpec(StrictModel):
    """A catalogue name with its parameter map, e.g. ``{"name": "gaussian", "params": {"sigma": 1}}``."""

    name: str
    params: dict[str, Any] = Field(default_factory=dict)


class KernelSpec(NamedSpec):
    pass


class SignalSpec(NamedSpec):
    pass


class DilationSpec(NamedSpec):
    name: str = "dyadic"


class CoefficientEntry(StrictModel):
    beta: list[int]
    value: Any


class OperatorSpec(StrictModel):
    kind: Literal["identity", "coeffs", "falsified"] = "identity"
    coeffs: list[CoefficientEntry] = Field(default_factory=list)
    N: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "coeffs" and not self.coeffs:
            raise ValueError("operator kind 'coeffs' needs coefficient entries")
        if self.kind == "falsified" and self.N is None:
            raise ValueError("operator kind 'falsified' needs the order N")
        return self


class ProfileSpec(StrictModel):
    kind: Literal["constant", "linear", "power"] = "constant"
    c: float = 1.0
    q: float = 1.0


class SchemeSpec(StrictModel):
    kind: Literal["point_mass", "mixture", "uniform"] = "point_mass"
    h: float | None = Field(default=None, gt=0)
    masses: list[tuple[float, float]] = Field(default_factory=list)
    lo: float | None = None
    hi: float | None = None
    profile: ProfileSpec = Field(default_factory=ProfileSpec)
    nodes: int | None = Field(default=None, ge=2)

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "point_mass" and self.h is None:
            raise ValueError("a point-mass scheme needs the radius h")
        if self.kind == "mixture" and not self.masses:
            raise ValueError("a mixture scheme needs (u, p) masses")
        if self.kind == "uniform" and (self.lo is None or self.hi is None):
            raise ValueError("a uniform scheme needs lo and hi")
        return self


class LevelSpec(StrictModel):
    j_min: int = 0
    j_max: int = 0

    @model_validator(mode="after")
    def _ordered(self):
        if self.j_max < self.j_min:
            raise ValueError("j_max must not be below j_min")
        return self

    @property
    def levels(self) -> list[int]:
        return list(range(self.j_min, self.j_max + 1))


class GridSpec(StrictModel):
    T: float | None = Field(default=None, gt=0)
    n: int | None = Field(default=None, ge=2)


class TruncationSpec(StrictModel):
    mode: Literal["support_exact", "radius"] | None = None
    R: float | None = Field(default=None, gt=0)
    tol: float | None = Field(default=None, gt=0)


class ExpectSpec(StrictModel):
    order_min: float | None = None
    order_max: float | None = None
    max_error: float | None = None
    order: int | None = None
    max_defect: float | None = None
    strict: bool | None = None
    b: list[Any] | None = None
    coeff_tol: float = 1e-12


class ExperimentConfig(StrictModel):
    kind: ExperimentKind
    dim: int = Field(default=1, ge=1, le=3)
    kernel: KernelSpec | None = None
    operator: OperatorSpec | None = None
    scheme: SchemeSpec | None = None
    signal: SignalSpec | None = None
    dilation: DilationSpec = Field(default_factory=DilationSpec)
    levels: LevelSpec = Field(default_factory=LevelSpec)
    p: float = Field(default=float("inf"), ge=1)
    grid: GridSpec = Field(default_factory=GridSpec)
    truncation: TruncationSpec = Field(default_factory=TruncationSpec)
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    options: dict[str, Any] = Field(default_factory=dict)
    expect: ExpectSpec = Field(default_factory=ExpectSpec)

    @field_serializer("p")
    def _serialize_p(self, p: float):
        return "inf" if p == float("inf") else p

    @model_validator(mode="after")
    def _check_experiment(self):
        if self.kind == "converge":
            if self.levels.j_max - self.levels.j_min < 2:
                raise ValueError("need ≥ 3 levels")
            if self.kernel is None or self.signal is None:
                raise ValueError("a convergence experiment needs a kernel and a signal")
        if self.kind in ("strang-fix", "compat") and self.kernel is None:
            raise ValueError(f"experiment '{self.kind}' needs a kernel")
        if self.kind in ("reproduce", "brown", "ode-demo") and self.signal is None:
            raise ValueError(f"experiment '{self.kind}' needs a signal")
        if self.kind == "falsify" and self.scheme is None:
            raise ValueError("experiment 'falsify' needs a scheme")
        return self
