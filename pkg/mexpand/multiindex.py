"""Multi-indices and the multilinear chain rule."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import product

import numpy as np

from mexpand.exceptions import InvalidSpecError


@dataclass(frozen=True, order=True)
class MultiIndex:
    components: tuple[int, ...]

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if any(c < 0 for c in comps):
            raise InvalidSpecError(f"multi-index entries must be nonnegative: {comps}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, value: MultiIndex | Iterable[int] | int) -> MultiIndex:
        if isinstance(value, MultiIndex):
            return value
        if isinstance(value, (int, np.integer)):
            return cls((int(value),))
        return cls(tuple(value))

    @classmethod
    def zero(cls, dim: int) -> MultiIndex:
        return cls((0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def total(self) -> int:
        return sum(self.components)

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(c) for c in self.components)

    def is_even(self) -> bool:
        return all(c % 2 == 0 for c in self.components)

    def __iter__(self) -> Iterator[int]:
        return iter(self.components)

    def __getitem__(self, item: int) -> int:
        return self.components[item]

    def __add__(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex(tuple(a + b for a, b in zip(self, other)))

    def power(self, t) -> np.ndarray | complex:
        """Monomial t^β; `t` has shape (..., d)."""
        t = np.asarray(t)
        out = np.ones(t.shape[:-1], dtype=np.result_type(t.dtype, float))
        for axis, c in enumerate(self.components):
            if c:
                out = out * t[..., axis] ** c
        return out

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.components) + ")"


def enumerate_multi_indices(dim: int, max_total: int) -> list[MultiIndex]:
    """All β with [β] ≤ max_total, ordered by total degree then lexicographically."""
    if max_total < 0:
        return []
    found = [
        MultiIndex(c)
        for c in product(range(max_total + 1), repeat=dim)
        if sum(c) <= max_total
    ]
    return sorted(found, key=lambda b: (b.total, b.components))


def chain_rule_expansion(A, beta: MultiIndex) -> dict[MultiIndex, complex]:
    """Coefficients c_α with D^β(f∘A)(y) = Σ_α c_α (D^α f)(Ay).

    Multiplies out ∏_i (Σ_l A_li ∂_l)^{β_i}; every α has [α] = [β].
    """
    A = np.asarray(A, dtype=float)
    dim = A.shape[0]
    beta = MultiIndex.of(beta)
    if beta.dim != dim:
        raise InvalidSpecError(f"multi-index {beta} does not match dimension {dim}")
    terms: dict[tuple[int, ...], float] = {(0,) * dim: 1.0}
    for i, count in enumerate(beta):
        for _ in range(count):
            nxt: dict[tuple[int, ...], float] = {}
            for alpha, coeff in terms.items():
                for row in range(dim):
                    if A[row, i] == 0.0:
                        continue
                    raised = alpha[:row] + (alpha[row] + 1,) + alpha[row + 1 :]
                    nxt[raised] = nxt.get(raised, 0.0) + coeff * A[row, i]
            terms = nxt
    return {MultiIndex(alpha): c for alpha, c in sorted(terms.items()) if c != 0.0}
