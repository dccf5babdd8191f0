from mexpand.kernels.bandlimited import BandLimitedKernel, make_class_b, make_reciprocal_kernel
from mexpand.kernels.base import Box, Kernel
from mexpand.kernels.catalog import available_kernels, bspline, example3, example4, from_spec, sinc, triangle
from mexpand.kernels.splines import SplineComboKernel, cardinal_bspline, spline_decompose

__all__ = [
    "BandLimitedKernel",
    "Box",
    "Kernel",
    "SplineComboKernel",
    "available_kernels",
    "bspline",
    "cardinal_bspline",
    "example3",
    "example4",
    "from_spec",
    "make_class_b",
    "make_reciprocal_kernel",
    "sinc",
    "spline_decompose",
    "triangle",
]
