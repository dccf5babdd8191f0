"""Grid Lₚ errors, the periodized ℒₚ norm and synthesis stability."""

from __future__ import annotations

from itertools import product
from typing import NamedTuple

import numpy as np
from loguru import logger

from mexpand.config import get_config
from mexpand.exceptions import InvalidSpecError, LengthMismatchError, PreconditionError
from mexpand.kernels.base import Kernel
from mexpand.kernels.splines import SplineComboKernel


class PeriodizedNorm(NamedTuple):
    value: float
    diverged: bool


class StabilityReport(NamedTuple):
    ratio: float
    doubled_ratio: float
    trials: int


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise InvalidSpecError(f"norm index must lie in [1, inf], got {p}")
    return p


def lp_error(exact, approx, p: float, cell_volume: float) -> float:
    """(Σ|e_i|^p·cell_volume)^{1/p}, or max|e_i| for p = ∞."""
    p = _check_p(p)
    exact = np.asarray(exact).reshape(-1)
    approx = np.asarray(approx).reshape(-1)
    if exact.shape != approx.shape:
        raise LengthMismatchError(f"grids differ in size: {exact.size} vs {approx.size}")
    err = np.abs(exact - approx)
    if err.size == 0:
        return 0.0
    if np.isinf(p):
        return float(np.max(err))
    return float((np.sum(err**p) * cell_volume) ** (1.0 / p))


def _torus_grid(dim: int) -> np.ndarray:
    n = 256 if dim == 1 else 64
    axis = np.arange(n) / n
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, dim)


def _periodized(g: Kernel, p: float, R: int, pts: np.ndarray) -> float:
    shifts = np.asarray(list(product(range(-R, R + 1), repeat=g.dim)), dtype=float)
    block = max(1, get_config().quadrature.block_pairs // len(shifts))
    total = np.zeros(len(pts))
    for s in range(0, len(pts), block):
        args = pts[s : s + block, None, :] + shifts[None, :, :]
        values = g._phi(args.reshape(-1, g.dim)).reshape(args.shape[:2])
        total[s : s + block] = np.sum(np.abs(values), axis=1)
    if np.isinf(p):
        return float(np.max(total))
    return float(np.mean(total**p) ** (1.0 / p))


def periodized_lp_norm(g: Kernel, p: float, trunc_R: int) -> PeriodizedNorm:
    """‖Σ_k|φ(·+k)|‖_{Lₚ(𝕋^d)} with shifts |k|∞ ≤ trunc_R.

    The value is flagged as divergent when doubling trunc_R moves it by more
    than the configured relative threshold.
    """
    p = _check_p(p)
    if trunc_R < 1:
        raise InvalidSpecError(f"shift radius must be positive, got {trunc_R}")
    pts = _torus_grid(g.dim)
    value = _periodized(g, p, trunc_R, pts)
    doubled = _periodized(g, p, 2 * trunc_R, pts)
    threshold = get_config().analysis.divergence_threshold
    diverged = abs(doubled - value) > threshold * max(abs(value), 1e-300)
    if diverged:
        logger.warning(f"periodized norm of {g.name} grows from {value:.4g} to {doubled:.4g}")
    return PeriodizedNorm(value, bool(diverged))


def _synthesis_ratio(g: Kernel, p: float, length: int, rng: np.random.Generator, trials: int) -> float:
    if isinstance(g, SplineComboKernel):
        reach = np.asarray(g.support_radius)
    else:
        reach = np.full(g.dim, 8.0)
    step = 1.0 / 32.0
    axes = [np.arange(-(length - 1) - r, r + step, step) for r in reach]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, g.dim)
    ks = np.asarray(list(product(range(length), repeat=g.dim)), dtype=float)
    block = max(1, get_config().quadrature.block_pairs // len(ks))
    basis_rows = []
    for s in range(0, len(pts), block):
        args = pts[s : s + block, None, :] + ks[None, :, :]
        basis_rows.append(g._phi(args.reshape(-1, g.dim)).reshape(args.shape[:2]))
    basis = np.concatenate(basis_rows)
    worst = 0.0
    for _ in range(trials):
        a = rng.standard_normal(len(ks))
        values = basis @ a
        seq = float(np.max(np.abs(a))) if np.isinf(p) else float(np.sum(np.abs(a) ** p) ** (1.0 / p))
        worst = max(worst, lp_error(values, np.zeros_like(values), p, step**g.dim) / seq)
    return worst


def synthesis_stability(g: Kernel, p: float, seed: int, trials: int = 50, length: int = 16) -> StabilityReport:
    """Max of ‖Σa_kφ(·+k)‖ₚ / ‖a‖_{ℓp} over random a, at `length` and 2·`length` shifts per axis."""
    p = _check_p(p)
    if seed is None:
        raise PreconditionError("a seed is required for random coefficient vectors")
    rng = np.random.default_rng(seed)
    ratio = _synthesis_ratio(g, p, length, rng, trials)
    doubled = _synthesis_ratio(g, p, 2 * length, rng, trials)
    return StabilityReport(ratio, doubled, trials)
