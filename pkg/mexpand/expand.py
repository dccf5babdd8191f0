"""Differential, sampling and falsified expansions on dilated lattices.

Q_j(x) = Σ_k c_k φ(Mʲx + k), where the m^{±j/2} factors of φ_{jk} and of the
series cancel. Differential coefficients are c_k = L[f∘M⁻ʲ](-k); falsified
ones are expected ball averages E(f, M⁻ʲ(-k)).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from itertools import product
from math import ceil, log
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from mexpand.analysis.norms import lp_error
from mexpand.config import get_config
from mexpand.diffops import AveragingScheme, DiffOperator, falsified_operator
from mexpand.dilation import Dilation, power
from mexpand.exceptions import InvalidSpecError, PreconditionError
from mexpand.kernels.base import Kernel
from mexpand.kernels.splines import SplineComboKernel
from mexpand.numerics.points import as_points, restore
from mexpand.numerics.quadrature import adaptive_ball_average
from mexpand.signals import Signal, TransformedSignal

_SHELL_CAP = 256
_LATTICE_LIMIT = 50_000_000


def radius_for_tolerance(tol: float) -> tuple[float, float]:
    """Smallest R with log(R)/R ≤ tol, capped; returns (R, achieved bound)."""
    cap = float(get_config().analysis.truncation_cap)
    if tol >= 1.0 / np.e:
        return 3.0, log(3.0) / 3.0
    if log(cap) / cap > tol:
        return cap, log(cap) / cap
    R = brentq(lambda r: log(r) / r - tol, np.e, cap)
    return float(R), tol


class TruncationPolicy(BaseModel):
    """Which lattice indices enter a truncated expansion."""

    model_config = ConfigDict(frozen=True)

    mode: Literal["support_exact", "radius"] = "support_exact"
    R: float | None = Field(default=None, gt=0)
    tol: float = Field(default_factory=lambda: get_config().analysis.truncation_tol, gt=0)
    tail_estimate: float | None = None

    @classmethod
    def for_kernel(cls, kernel: Kernel, R: float | None = None, tol: float | None = None) -> TruncationPolicy:
        tol = get_config().analysis.truncation_tol if tol is None else tol
        if isinstance(kernel, SplineComboKernel) and R is None:
            return cls(mode="support_exact", tol=tol)
        return cls(mode="radius", R=R, tol=tol)


class EvaluationGrid(BaseModel):
    """Uniform grid over [-T, T]^d with n points per axis."""

    model_config = ConfigDict(frozen=True)

    T: float = Field(default=4.0, gt=0)
    n: int = Field(default=1024, ge=2)
    dim: int = Field(default=1, ge=1)

    @classmethod
    def default(cls, dim: int) -> EvaluationGrid:
        cfg = get_config().analysis
        n = cfg.grid_points_1d if dim == 1 else cfg.grid_points_2d
        return cls(T=cfg.grid_half_width, n=n, dim=dim)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.T, self.T, self.n)

    @property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.axis] * self.dim), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dim)

    @property
    def cell_volume(self) -> float:
        return (2.0 * self.T / (self.n - 1)) ** self.dim


@dataclass
class ExpansionResult:
    values: np.ndarray | complex
    tail_estimate: float = 0.0
    lattice_size: int = 0
    trunc: TruncationPolicy | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def value(self) -> complex:
        return complex(np.asarray(self.values).reshape(-1)[0])


@dataclass(frozen=True)
class ExpansionPlan:
    """Kernel, coefficient rule, dilation, level, truncation and grid for one expansion."""

    kernel: Kernel
    dilation: Dilation
    j: int
    trunc: TruncationPolicy
    grid: EvaluationGrid
    operator: DiffOperator | None = None
    scheme: AveragingScheme | None = None

    def __post_init__(self):
        if (self.operator is None) == (self.scheme is None):
            raise InvalidSpecError("an expansion plan needs exactly one of operator or scheme")
        dims = {self.kernel.dim, self.dilation.dim, self.grid.dim}
        if len(dims) != 1:
            raise InvalidSpecError(f"kernel, dilation and grid dimensions differ: {sorted(dims)}")

    def at_level(self, j: int) -> ExpansionPlan:
        return ExpansionPlan(self.kernel, self.dilation, j, self.trunc, self.grid, self.operator, self.scheme)

    def evaluate(self, f: Signal, x=None) -> ExpansionResult:
        x = self.grid.points if x is None else x
        if self.operator is not None:
            return differential_expansion(self.kernel, self.operator, f, self.dilation, self.j, x, self.trunc)
        return falsified_expansion(self.kernel, f, self.dilation, self.j, x, self.scheme, self.trunc)


def _lattice_box(radius: int, dim: int) -> np.ndarray:
    rng = range(-radius, radius + 1)
    return np.asarray(list(product(rng, repeat=dim)), dtype=np.int64).reshape(-1, dim)


def _shell(inner: int, outer: int, dim: int) -> np.ndarray:
    box = _lattice_box(outer, dim)
    return box[np.max(np.abs(box), axis=1) > inner]


def _synthesize(
    kernel: Kernel,
    M: Dilation,
    j: int,
    x,
    coefficients: Callable[[np.ndarray], np.ndarray],
    trunc: TruncationPolicy,
) -> ExpansionResult:
    """Σ_k coefficients(k)·φ(Mʲx + k) over the truncation set, in sorted k order."""
    pts, batch = as_points(x, kernel.dim)
    if len(pts) == 0:
        raise InvalidSpecError("the evaluation point set is empty")
    Y = pts @ power(M, j).T
    block = get_config().quadrature.block_pairs
    out = np.zeros(len(pts), dtype=complex)
    warnings: list[str] = []
    tail = 0.0

    if trunc.mode == "support_exact":
        if not isinstance(kernel, SplineComboKernel):
            raise InvalidSpecError("support_exact truncation needs a compactly supported kernel")
        rad = np.asarray(kernel.support_radius)
        lo = np.ceil(-Y - rad).astype(np.int64)
        hi = np.floor(-Y + rad).astype(np.int64)
        widths = int(np.max(hi - lo)) + 1
        offsets = _lattice_box(0, kernel.dim) if widths <= 0 else np.asarray(
            list(product(range(widths), repeat=kernel.dim)), dtype=np.int64
        )
        cand = lo[:, None, :] + offsets[None, :, :]
        valid = np.all(cand <= hi[:, None, :], axis=2)
        ks, inverse = np.unique(cand[valid], axis=0, return_inverse=True)
        coeff = np.asarray(coefficients(ks), dtype=complex).reshape(-1)
        coeff_full = np.zeros(valid.shape, dtype=complex)
        coeff_full[valid] = coeff[np.asarray(inverse).reshape(-1)]
        rows = max(1, block // max(len(offsets), 1))
        for s in range(0, len(pts), rows):
            args = Y[s : s + rows, None, :] + cand[s : s + rows]
            phi = kernel._phi(args.reshape(-1, kernel.dim)).reshape(args.shape[:2])
            out[s : s + rows] = np.sum(np.where(valid[s : s + rows], phi * coeff_full[s : s + rows], 0.0), axis=1)
        lattice_size = len(ks)
    else:
        R = trunc.R
        if R is None:
            R_tail, _ = radius_for_tolerance(trunc.tol)
            R = float(np.max(np.abs(Y))) + R_tail if len(pts) else R_tail
        R_int = int(ceil(R))
        if (2 * R_int + 1) ** kernel.dim > _LATTICE_LIMIT:
            raise PreconditionError(
                f"a radius-{R_int} lattice in dimension {kernel.dim} is too large; set R explicitly"
            )
        ks = _lattice_box(R_int, kernel.dim)
        coeff = np.asarray(coefficients(ks), dtype=complex).reshape(-1)
        keep = coeff != 0
        ks, coeff = ks[keep], coeff[keep]
        rows = max(1, block // max(len(ks), 1))
        for s in range(0, len(pts), rows):
            args = Y[s : s + rows, None, :] + ks[None, :, :]
            phi = kernel._phi(args.reshape(-1, kernel.dim)).reshape(args.shape[:2])
            out[s : s + rows] = phi @ coeff
        lattice_size = len(ks)

        shell = _shell(R_int, R_int + min(R_int, _SHELL_CAP), kernel.dim)
        shell_coeff = np.abs(np.asarray(coefficients(shell), dtype=complex).reshape(-1))
        if np.any(shell_coeff > 0) and len(pts):
            nearest = np.clip(-shell, Y.min(axis=0), Y.max(axis=0))
            tail = float(np.sum(shell_coeff * kernel.envelope(nearest + shell)))
        if tail > trunc.tol:
            msg = f"truncation tail estimate {tail:.3g} exceeds tolerance {trunc.tol:.3g} (R={R_int})"
            logger.warning(msg)
            warnings.append(msg)
        trunc = trunc.model_copy(update={"R": float(R_int)})

    logger.debug(f"level {j}: {lattice_size} lattice terms, {len(pts)} points")
    return ExpansionResult(
        values=restore(out, batch),
        tail_estimate=tail,
        lattice_size=lattice_size,
        trunc=trunc.model_copy(update={"tail_estimate": tail}),
        warnings=warnings,
    )


def differential_coefficients(L: DiffOperator, f: Signal, M: Dilation, j: int) -> Callable[[np.ndarray], np.ndarray]:
    """k ↦ L[f∘M⁻ʲ](-k) via the exact chain rule."""
    composed = TransformedSignal(f, power(M, -j))
    return lambda ks: np.asarray(L.apply(composed, -np.asarray(ks, dtype=float))).reshape(-1)


def differential_expansion(
    g: Kernel,
    L: DiffOperator,
    f: Signal,
    M: Dilation,
    j: int,
    x,
    trunc: TruncationPolicy | None = None,
) -> ExpansionResult:
    if L.order > f.max_derivative_order:
        raise InvalidSpecError(
            f"signal derivatives up to {f.max_derivative_order} cannot feed an operator of order {L.order}"
        )
    trunc = trunc or TruncationPolicy.for_kernel(g)
    return _synthesize(g, M, j, x, differential_coefficients(L, f, M, j), trunc)


def average_sample(f: Signal, M: Dilation, j: int, k, h: float):
    """Mean of f over the ball M⁻ʲB_h centered at M⁻ʲk.

    After the substitution t = M⁻ʲ(h s) this is the mean of f(M⁻ʲ(k + h s))
    over the unit ball s ∈ B₁.
    """
    if not h > 0:
        raise InvalidSpecError(f"averaging radius must be positive, got {h}")
    q = get_config().quadrature
    centers, batch = as_points(k, f.dim)
    A = power(M, -j)

    def integrand(nodes):
        pts = (centers[:, None, :] + h * nodes[None, :, :]) @ A.T
        return np.asarray(f.eval_value(pts.reshape(-1, f.dim))).reshape(len(centers), len(nodes))

    values = adaptive_ball_average(integrand, f.dim, q.average_tol, max_nodes=q.average_max_nodes)
    return restore(values, batch)


def expected_sample(f: Signal, M: Dilation, j: int, k, scheme: AveragingScheme):
    """E(f, M⁻ʲk) = ∫ w(u) Av_{h(u)}(f, M⁻ʲk) du on the scheme's nodes."""
    centers, batch = as_points(k, f.dim)
    out = np.zeros(len(centers), dtype=complex)
    for radius, weight in zip(scheme.radii, scheme.weights):
        if weight == 0:
            continue
        out += weight * np.asarray(average_sample(f, M, j, centers, float(radius))).reshape(-1)
    return restore(out, batch)


def falsified_coefficients(f: Signal, M: Dilation, j: int, scheme: AveragingScheme):
    return lambda ks: np.asarray(expected_sample(f, M, j, -np.asarray(ks, dtype=float), scheme)).reshape(-1)


def falsified_expansion(
    g: Kernel,
    f: Signal,
    M: Dilation,
    j: int,
    x,
    scheme: AveragingScheme,
    trunc: TruncationPolicy | None = None,
) -> ExpansionResult:
    trunc = trunc or TruncationPolicy.for_kernel(g)
    return _synthesize(g, M, j, x, falsified_coefficients(f, M, j, scheme), trunc)


def expansion_residual_norm(
    g: Kernel,
    f: Signal,
    M: Dilation,
    j: int,
    scheme: AveragingScheme,
    N: int,
    p: float,
    grid: EvaluationGrid,
    trunc: TruncationPolicy | None = None,
) -> float:
    """Grid Lₚ norm of Σ_k ε_j(-k)φ(Mʲ· + k), ε_j = E(f, M⁻ʲ·) - L f(M⁻ʲ·)."""
    L = falsified_operator(N, scheme, f.dim)
    expected = falsified_coefficients(f, M, j, scheme)
    exact = differential_coefficients(L, f, M, j)
    trunc = trunc or TruncationPolicy.for_kernel(g)
    result = _synthesize(g, M, j, grid.points, lambda ks: expected(ks) - exact(ks), trunc)
    values = np.asarray(result.values).reshape(-1)
    return lp_error(np.zeros_like(values), values, p, grid.cell_volume)
