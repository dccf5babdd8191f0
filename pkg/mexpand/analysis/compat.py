"""Strang-Fix order, compatibility defect and strict compatibility."""

from __future__ import annotations

from itertools import product
from math import ceil, comb, prod

import numpy as np
from loguru import logger

from mexpand.config import get_config
from mexpand.diffops import DiffOperator, unit_ball_volume
from mexpand.exceptions import InvalidSpecError
from mexpand.kernels.base import Kernel
from mexpand.multiindex import MultiIndex, enumerate_multi_indices
from mexpand.numerics.differentiation import ridders_derivative

_MAX_ORDER = 8


def _lattice_points(dim: int, radius: int) -> list[np.ndarray]:
    return [
        np.asarray(k, dtype=float)
        for k in product(range(-radius, radius + 1), repeat=dim)
        if any(k)
    ]


def strang_fix_order(g: Kernel, n_max: int, tol: float, radius: int | None = None) -> int:
    """Largest n ≤ n_max with |D^β φ̂(k)| ≤ tol for [β] < n and 0 < |k|∞ ≤ radius.

    The tolerance is widened by the rounding floor each derivative reports,
    which is zero for spline combinations and grows like h^{-[β]} otherwise.
    """
    if not 0 <= n_max <= _MAX_ORDER:
        raise InvalidSpecError(f"n_max must lie in [0, {_MAX_ORDER}], got {n_max}")
    radius = get_config().analysis.strang_fix_radius if radius is None else radius
    lattice = _lattice_points(g.dim, radius)
    for n in range(1, n_max + 1):
        for beta in enumerate_multi_indices(g.dim, n - 1):
            if beta.total != n - 1:
                continue
            for k in lattice:
                value, floor = g.phi_hat_derivative(beta, k)
                if abs(value) > tol + floor:
                    logger.debug(f"{g.name}: D^{beta} of the transform is {abs(value):.3g} at {k.tolist()}")
                    return n - 1
    return n_max


def _operator_derivative_at_origin(L: DiffOperator, alpha: MultiIndex) -> complex:
    """D^α of Σ conj(a_β)(-2πiξ)^β at ξ = 0."""
    return complex(np.conj(L.coefficient(alpha))) * (-2j * np.pi) ** alpha.total * alpha.factorial


def _product_derivative_at_origin(g: Kernel, L: DiffOperator, beta: MultiIndex) -> complex:
    origin = np.zeros(g.dim)
    total = 0.0j
    for gamma in product(*(range(b + 1) for b in beta)):
        rest = MultiIndex(tuple(b - c for b, c in zip(beta, gamma)))
        weight = prod(comb(b, c) for b, c in zip(beta, gamma))
        operator_part = _operator_derivative_at_origin(L, rest)
        if operator_part != 0.0:
            value, _ = g.phi_hat_derivative(gamma, origin)
            total += weight * value * operator_part
    return total


def compatibility_defect(g: Kernel, L: DiffOperator, n: int) -> float:
    """max over [β] < n of |D^β(1 - φ̂·φ̃̂)(0)|.

    Kernels with exact transform derivatives go through Leibniz against the
    polynomial φ̃̂; the rest use Ridders on the product.
    """
    if not 0 <= n <= _MAX_ORDER:
        raise InvalidSpecError(f"n must lie in [0, {_MAX_ORDER}], got {n}")
    if g.dim != L.dim:
        raise InvalidSpecError(f"kernel dimension {g.dim} differs from operator dimension {L.dim}")

    def defect(pts):
        return 1.0 - g._phi_hat(pts) * L.dist_ft(pts)

    origin = np.zeros(g.dim)
    worst = 0.0
    for beta in enumerate_multi_indices(g.dim, n - 1):
        if g.exact_transform_derivatives:
            value = float(beta.total == 0) - _product_derivative_at_origin(g, L, beta)
        else:
            value, _ = ridders_derivative(defect, origin, beta)
        worst = max(worst, abs(value))
    return worst


def ball_sample(dim: int, delta: float, count: int | None = None) -> np.ndarray:
    """Regular grid points of the open ball |ξ| < δ, about `count` of them."""
    count = count or get_config().analysis.compat_samples
    fill = unit_ball_volume(dim) / 2.0**dim
    per_axis = max(2, ceil((count / fill) ** (1.0 / dim)))
    axis = (np.arange(per_axis) + 0.5) / per_axis * 2.0 - 1.0
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, dim)
    return delta * pts[np.linalg.norm(pts, axis=1) < 1.0]


def strict_compatibility(g: Kernel, L: DiffOperator, delta: float, tol: float) -> bool:
    """conj(φ̂)·φ̃̂ = 1 near the origin and φ̂ = 0 near the other lattice points."""
    if not 0 < delta < 0.5:
        raise InvalidSpecError(f"delta must lie in (0, 1/2), got {delta}")
    ball = ball_sample(g.dim, delta)
    center = np.abs(np.conj(g._phi_hat(ball)) * L.dist_ft(ball) - 1.0)
    if np.max(center) > tol:
        logger.debug(f"{g.name}: product deviates from 1 by {np.max(center):.3g} near the origin")
        return False
    radius = get_config().analysis.strang_fix_radius
    for point in _lattice_points(g.dim, radius):
        off = np.abs(g._phi_hat(point[None, :] - ball))
        if np.max(off) > tol:
            logger.debug(f"{g.name}: transform reaches {np.max(off):.3g} near {point.tolist()}")
            return False
    return True
