from __future__ import annotations

from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from mexpand.exceptions import InvalidSpecError
from mexpand.multiindex import MultiIndex
from mexpand.numerics.box import Box
from mexpand.numerics.differentiation import richardson_derivative
from mexpand.numerics.points import as_points, restore

__all__ = ["Box", "Kernel"]


class Kernel(ABC):
    """A generator φ with paired evaluation of φ and its Fourier transform φ̂."""

    form: ClassVar[str]
    exact_transform_derivatives: ClassVar[bool] = False

    def __init__(self, dim: int, name: str):
        self.dim = dim
        self.name = name

    @abstractmethod
    def _phi(self, pts: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _phi_hat(self, pts: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _phi_derivative(self, beta: MultiIndex, pts: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def envelope(self, pts: np.ndarray) -> np.ndarray:
        """Upper bound for |φ| at the points, used by truncation estimates."""

    @abstractmethod
    def support_descriptor(self) -> dict: ...

    @abstractmethod
    def scaled(self, factor: complex) -> Kernel: ...

    @abstractmethod
    def to_json(self) -> dict: ...

    def eval_phi(self, x):
        pts, batch = as_points(x, self.dim)
        return restore(self._phi(pts), batch)

    def eval_phi_hat(self, xi):
        pts, batch = as_points(xi, self.dim)
        return restore(self._phi_hat(pts), batch)

    def eval_phi_derivative(self, beta, x):
        beta = MultiIndex.of(beta)
        if beta.dim != self.dim:
            raise InvalidSpecError(f"multi-index {beta} does not match dimension {self.dim}")
        pts, batch = as_points(x, self.dim)
        if beta.total == 0:
            return restore(self._phi(pts), batch)
        return restore(self._phi_derivative(beta, pts), batch)

    def phi_hat_derivative(self, beta, xi) -> tuple[complex, float]:
        """(D^β φ̂(ξ), rounding floor) at a single frequency."""
        return richardson_derivative(self._phi_hat, xi, beta)

    def apply_operator(self, L, x):
        """(Lφ)(x) = Σ a_β D^β φ(x)."""
        pts, batch = as_points(x, self.dim)
        out = np.zeros(len(pts), dtype=complex)
        for beta, coeff in L.items():
            out += coeff * (self._phi(pts) if beta.total == 0 else self._phi_derivative(beta, pts))
        return restore(out, batch)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, dim={self.dim})"
