"""Named built-in kernels, buildable from a parameter map."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from mexpand.diffops import DiffOperator, solve_example3, solve_example4
from mexpand.exceptions import InvalidSpecError
from mexpand.kernels.bandlimited import BandLimitedKernel, make_class_b, make_reciprocal_kernel
from mexpand.kernels.base import Box, Kernel
from mexpand.kernels.splines import SplineComboKernel, spline_decompose
from mexpand.utils import as_complex

KernelBuilder = Callable[..., Kernel]

_KERNELS: dict[str, KernelBuilder] = {}


def register_kernel(*names: str):
    def decorator(fn: KernelBuilder) -> KernelBuilder:
        for name in names:
            _KERNELS[name] = fn
        return fn

    return decorator


def available_kernels() -> list[str]:
    return sorted(_KERNELS)


def triangle(dim: int = 1) -> SplineComboKernel:
    """Tensor triangle B₂⊗…⊗B₂, Strang-Fix order 2."""
    return spline_decompose([(2, 1.0)], 2, dim=dim, name="triangle")


def bspline(order: int, dim: int = 1) -> SplineComboKernel:
    if order < 1:
        raise InvalidSpecError(f"B-spline order must be positive, got {order}")
    return spline_decompose([(order, 1.0)], order, dim=dim, name=f"bspline{order}")


def sinc(dim: int = 1) -> BandLimitedKernel:
    """φ̂ = 1 on [-1/2, 1/2]^d, the classical sampling kernel."""
    return make_class_b(1.0, Box.cube(0.5, dim), name="sinc")


def example3(b1: complex, b2: complex) -> SplineComboKernel:
    """φ̂ = sinc³ξ₁ sinc³ξ₂ (1 + b₁sin²πξ₁ + b₂sin²πξ₂) on ℝ²."""
    return spline_decompose(
        [((3, 3), 1.0), ((5, 3), complex(b1)), ((3, 5), complex(b2))],
        (3, 3),
        name="example3",
    )


def example4(b1: complex, b2: complex, b3: complex) -> SplineComboKernel:
    """φ̂ = sinc⁴ξ (1 + b₁sin πξ + b₂sin²πξ + b₃sin³πξ) on ℝ."""
    return spline_decompose(
        [(4, 1.0), (5, complex(b1)), (6, complex(b2)), (7, complex(b3))],
        4,
        name="example4",
    )


def gaussian_density(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda xi: np.exp(-alpha * np.sum(np.asarray(xi) ** 2, axis=-1)).astype(complex)


@register_kernel("triangle", "example2")
def _build_triangle(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    return triangle(dim)


@register_kernel("bspline")
def _build_bspline(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    return bspline(int(params.get("order", 2)), dim)


@register_kernel("sinc", "example1")
def _build_sinc(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    return sinc(dim)


@register_kernel("example3")
def _build_example3(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    if "b1" in params or "b2" in params:
        return example3(as_complex(params.get("b1", 0.5)), as_complex(params.get("b2", 0.5)))
    if operator is not None:
        a20, a02 = operator.coefficient((2, 0)), operator.coefficient((0, 2))
    else:
        a20, a02 = as_complex(params.get("a20", 0.0)), as_complex(params.get("a02", 0.0))
    return example3(*solve_example3(a20, a02))


@register_kernel("example4")
def _build_example4(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    if any(k in params for k in ("b1", "b2", "b3")):
        return example4(*(as_complex(params.get(k, 0.0)) for k in ("b1", "b2", "b3")))
    if operator is not None:
        a = [operator.coefficient((r,)) for r in (1, 2, 3)]
    else:
        a = [as_complex(params.get(k, 0.0)) for k in ("a1", "a2", "a3")]
    return example4(*solve_example4(*a))


@register_kernel("class_b")
def _build_class_b(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    box = _box_from(params, dim)
    density = params.get("density", "constant")
    if density == "constant":
        theta = as_complex(params.get("value", 1.0))
    elif density == "gaussian":
        theta = gaussian_density(float(params.get("alpha", 1.0)))
    else:
        raise InvalidSpecError(f"unknown class_b density '{density}'")
    return make_class_b(theta, box)


@register_kernel("reciprocal")
def _build_reciprocal(params: dict, dim: int, operator: DiffOperator | None) -> Kernel:
    if operator is None:
        raise InvalidSpecError("the reciprocal kernel needs an operator")
    return make_reciprocal_kernel(operator, _box_from(params, operator.dim))


def _box_from(params: dict, dim: int) -> Box:
    if "lower" in params or "upper" in params:
        return Box(tuple(params["lower"]), tuple(params["upper"]))
    return Box.cube(float(params.get("half_width", 0.5)), dim)


def from_spec(name: str, params: dict | None = None, dim: int = 1, operator: DiffOperator | None = None) -> Kernel:
    """Resolve a kernel by name, e.g. ``from_spec("example4", {"a2": 0.05})``."""
    try:
        builder = _KERNELS[name]
    except KeyError:
        raise InvalidSpecError(
            f"unknown kernel '{name}'", details={"available": available_kernels()}
        ) from None
    params = dict(params or {})
    try:
        return builder(params, dim, operator)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidSpecError(f"bad parameters for kernel '{name}': {e}") from e
