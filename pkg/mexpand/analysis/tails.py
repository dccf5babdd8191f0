"""Fourier tail integrals, the Brown-type error bound and ball-moment sampling."""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.integrate import quad

from mexpand.analysis.compat import strict_compatibility
from mexpand.analysis.convergence import fit_order
from mexpand.config import get_config
from mexpand.diffops import DiffOperator, ball_moment, unit_ball_volume
from mexpand.dilation import Dilation, operator_norm, power
from mexpand.exceptions import CapabilityError, PreconditionError
from mexpand.expand import EvaluationGrid, TruncationPolicy, differential_expansion
from mexpand.kernels.base import Kernel
from mexpand.multiindex import MultiIndex, enumerate_multi_indices
from mexpand.signals import Signal

_ANGLES = 64
_MC_CHUNK = 1_000_000


class TailIntegralSpec(BaseModel):
    """∫ over {|M^{*-j}ξ| ≥ δ} (or its complement) of |ξ|^{qγ}|f̂(ξ)|^q."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: float = 0.0
    q: float = Field(default=1.0, ge=1.0)
    delta: float = Field(default=0.45, gt=0.0, lt=0.5)
    j: int = 0
    dilation: Dilation

    @field_validator("dilation")
    @classmethod
    def _square(cls, M: Dilation) -> Dilation:
        if M.dim > 2:
            raise CapabilityError("tail integrals are available for d ≤ 2")
        return M


class BrownRow(NamedTuple):
    j: int
    sup_error: float
    bound: float


class BrownReport(BaseModel):
    rows: list[BrownRow]
    constant: float
    margin: float
    passed: bool
    bound_slope: float | None = None


def _directions(dim: int) -> tuple[np.ndarray, float]:
    if dim == 1:
        return np.array([[1.0], [-1.0]]), 1.0
    angles = 2 * np.pi * np.arange(_ANGLES) / _ANGLES
    return np.stack([np.cos(angles), np.sin(angles)], axis=1), 2 * np.pi / _ANGLES


def tail_integral(f: Signal, spec: TailIntegralSpec, inner: bool = False) -> float:
    """I^Out (or I^In with `inner`) by radial quadrature of the closed-form f̂."""
    d = f.dim
    if spec.dilation.dim != d:
        raise PreconditionError(f"dilation dimension {spec.dilation.dim} differs from signal dimension {d}")
    upper = np.inf
    if f.spectrum_support is not None:
        upper = float(f.spectrum_support.outer_radius)
    elif not inner and spec.q * f.decay_exponent - spec.q * spec.gamma - d <= 0:
        raise PreconditionError(
            f"|xi|^{spec.q * spec.gamma:g} |f^|^{spec.q:g} is not integrable for decay exponent {f.decay_exponent:g}"
        )

    shrink = power(spec.dilation, -spec.j).T
    directions, weight = _directions(d)
    rel_tol = get_config().analysis.tail_rel_tol
    total = 0.0
    for theta in directions:
        r0 = spec.delta / np.linalg.norm(shrink @ theta)

        def radial(r, theta=theta):
            value = abs(complex(np.asarray(f.eval_ft(r * theta[None, :])).reshape(-1)[0]))
            return r ** (spec.q * spec.gamma + d - 1) * value**spec.q

        lo, hi = (0.0, min(r0, upper)) if inner else (r0, upper)
        if hi <= lo:
            continue
        value, _ = quad(radial, lo, hi, epsrel=rel_tol, epsabs=0.0, limit=200)
        total += weight * value
    return float(total)


def brown_check(
    g: Kernel,
    L: DiffOperator,
    f: Signal,
    M: Dilation,
    levels: Sequence[int],
    grid: EvaluationGrid | None = None,
    N: int = 1,
    delta: float = 0.45,
    trunc: TruncationPolicy | None = None,
    margin: float = 1.5,
) -> BrownReport:
    """Sup-norm errors against ‖M^{*-j}‖^N·I^Out per level, with C fit at the first level."""
    if not strict_compatibility(g, L, delta, 1e-9):
        raise PreconditionError(f"kernel {g.name} is not strictly compatible with {L.name} at delta={delta}")
    if f.spectrum_support is None and f.decay_exponent <= N + f.dim:
        raise PreconditionError(f"signal decay {f.decay_exponent:g} must exceed N + d = {N + f.dim}")
    grid = grid or EvaluationGrid.default(f.dim)
    exact = np.asarray(f.eval_value(grid.points)).reshape(-1)
    rows: list[BrownRow] = []
    for j in levels:
        approx = np.asarray(differential_expansion(g, L, f, M, j, grid.points, trunc).values).reshape(-1)
        sup_error = float(np.max(np.abs(approx - exact)))
        tail = tail_integral(f, TailIntegralSpec(gamma=N, q=1.0, delta=delta, j=j, dilation=M))
        bound = operator_norm(power(M, -j).T) ** N * tail
        rows.append(BrownRow(j, sup_error, bound))
        logger.info(f"level {j}: sup error {sup_error:.4e}, bound {bound:.4e}")

    first = rows[0] if rows else BrownRow(0, 0.0, 0.0)
    constant = first.sup_error / first.bound if first.bound > 0 else 0.0
    passed = all(r.sup_error <= margin * constant * r.bound + 1e-12 for r in rows)
    slope = None
    bounds = [r.bound for r in rows]
    if len(rows) >= 3 and all(b > 0 for b in bounds):
        slope, _ = fit_order([r.j for r in rows], bounds, M.lam, window=len(rows))
    return BrownReport(rows=rows, constant=constant, margin=margin, passed=passed, bound_slope=slope)


def _uniform_ball(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    direction = rng.standard_normal((n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * rng.random(n)[:, None] ** (1.0 / d)


def monte_carlo_ball_moments(betas: Sequence, d: int, n: int, seed: int) -> dict[MultiIndex, float]:
    """Seeded Monte Carlo estimates of ∫_{B₁} t^β dt for several β at once."""
    if seed is None:
        raise PreconditionError("Monte Carlo estimates require an explicit seed")
    betas = [MultiIndex.of(b) for b in betas]
    rng = np.random.default_rng(seed)
    sums = dict.fromkeys(betas, 0.0)
    done = 0
    while done < n:
        size = min(_MC_CHUNK, n - done)
        pts = _uniform_ball(rng, size, d)
        for beta in betas:
            sums[beta] += float(np.sum(beta.power(pts)))
        done += size
    volume = unit_ball_volume(d)
    return {beta: volume * s / n for beta, s in sums.items()}


def monte_carlo_ball_moment(beta, d: int, n: int, seed: int) -> float:
    return monte_carlo_ball_moments([beta], d, n, seed)[MultiIndex.of(beta)]


def ball_moment_check(d: int, max_total: int, n: int, seed: int) -> list[dict]:
    """Closed-form against Monte Carlo ball moments for every even β with [β] ≤ max_total."""
    betas = [b for b in enumerate_multi_indices(d, max_total) if b.is_even()]
    estimates = monte_carlo_ball_moments(betas, d, n, seed)
    rows = []
    for beta in betas:
        exact = ball_moment(beta, d)
        rows.append(
            {
                "beta": list(beta.components),
                "exact": exact,
                "monte_carlo": estimates[beta],
                "rel_error": abs(estimates[beta] - exact) / exact,
            }
        )
    return rows
