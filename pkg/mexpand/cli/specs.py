"""Resolve declarative specs into library objects."""

from __future__ import annotations

from mexpand import dilation as dilations
from mexpand import signals
from mexpand.cli.schema import (
    DilationSpec,
    ExperimentConfig,
    GridSpec,
    KernelSpec,
    OperatorSpec,
    SchemeSpec,
    SignalSpec,
    TruncationSpec,
)
from mexpand.diffops import AveragingScheme, DiffOperator, RadiusProfile, falsified_operator
from mexpand.dilation import Dilation
from mexpand.exceptions import ConfigError
from mexpand.expand import EvaluationGrid, ExpansionPlan, TruncationPolicy
from mexpand.kernels import catalog
from mexpand.kernels.base import Kernel
from mexpand.utils import as_complex


def build_dilation(spec: DilationSpec, dim: int) -> Dilation:
    params = dict(spec.params)
    if spec.name in ("dyadic", "scalar"):
        params.setdefault("dim", dim)
    try:
        M = dilations.from_spec(spec.name, params)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid parameters for dilation '{spec.name}': {e!r}") from e
    if M.dim != dim:
        raise ConfigError(f"dilation '{spec.name}' has dimension {M.dim}, experiment has {dim}")
    return M


def build_signal(spec: SignalSpec, dim: int) -> signals.Signal:
    return signals.from_spec(spec.name, spec.params, dim)


def build_scheme(spec: SchemeSpec) -> AveragingScheme:
    profile = RadiusProfile(spec.profile.kind, spec.profile.c, spec.profile.q)
    if spec.kind == "point_mass":
        return AveragingScheme.point_mass(spec.h)
    if spec.kind == "mixture":
        return AveragingScheme.mixture(spec.masses, profile)
    return AveragingScheme.uniform(spec.lo, spec.hi, profile, spec.nodes)


def build_operator(spec: OperatorSpec | None, dim: int, scheme: AveragingScheme | None = None) -> DiffOperator:
    if spec is None or spec.kind == "identity":
        return DiffOperator.identity(dim)
    if spec.kind == "coeffs":
        return DiffOperator(dim, {tuple(e.beta): as_complex(e.value) for e in spec.coeffs})
    if scheme is None:
        raise ConfigError("a falsified operator needs a scheme")
    return falsified_operator(spec.N, scheme, dim)


def build_kernel(spec: KernelSpec, dim: int, operator: DiffOperator | None = None) -> Kernel:
    return catalog.from_spec(spec.name, spec.params, dim, operator)


def build_grid(spec: GridSpec, dim: int) -> EvaluationGrid:
    grid = EvaluationGrid.default(dim)
    updates = {k: v for k, v in (("T", spec.T), ("n", spec.n)) if v is not None}
    return grid.model_copy(update=updates) if updates else grid


def build_truncation(spec: TruncationSpec, kernel: Kernel) -> TruncationPolicy:
    policy = TruncationPolicy.for_kernel(kernel, spec.R, spec.tol)
    if spec.mode is not None and spec.mode != policy.mode:
        policy = policy.model_copy(update={"mode": spec.mode})
    return policy


class ResolvedExperiment:
    """All objects an experiment document refers to, built once."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        dim = config.dim
        self.dilation = build_dilation(config.dilation, dim)
        self.scheme = build_scheme(config.scheme) if config.scheme else None
        self.operator = build_operator(config.operator, dim, self.scheme)
        self.signal = build_signal(config.signal, dim) if config.signal else None
        self.kernel = build_kernel(config.kernel, dim, self.operator) if config.kernel else None
        self.grid = build_grid(config.grid, dim)
        self.trunc = build_truncation(config.truncation, self.kernel) if self.kernel else None

    def plan(self, j: int, falsified: bool = False) -> ExpansionPlan:
        if self.kernel is None:
            raise ConfigError("this experiment needs a kernel")
        if falsified:
            if self.scheme is None:
                raise ConfigError("falsified expansions need a scheme")
            return ExpansionPlan(self.kernel, self.dilation, j, self.trunc, self.grid, scheme=self.scheme)
        return ExpansionPlan(self.kernel, self.dilation, j, self.trunc, self.grid, operator=self.operator)
