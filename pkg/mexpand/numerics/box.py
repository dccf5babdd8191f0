from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mexpand.exceptions import InvalidSpecError


@dataclass(frozen=True)
class Box:
    """Axis-aligned parallelepiped [a₁,b₁]×…×[a_d,b_d]."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper) or not lower:
            raise InvalidSpecError("box bounds must have equal, positive length")
        if any(a >= b for a, b in zip(lower, upper)):
            raise InvalidSpecError(f"degenerate box: lower={lower}, upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, half_width: float, dim: int) -> Box:
        return cls((-half_width,) * dim, (half_width,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.lengths))

    @property
    def outer_radius(self) -> float:
        """Largest Euclidean norm of a point of the box."""
        corner = np.maximum(np.abs(self.lower), np.abs(self.upper))
        return float(np.linalg.norm(corner))

    def contains(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi)
        return np.all((xi >= np.asarray(self.lower)) & (xi <= np.asarray(self.upper)), axis=-1)

    def grid(self, per_axis: int) -> np.ndarray:
        axes = [np.linspace(a, b, per_axis) for a, b in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dim)

    def to_json(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}
