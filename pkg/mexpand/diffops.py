"""Differential operators, averaging schemes and falsified-operator synthesis."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from math import gamma
from typing import Literal

import numpy as np

from mexpand.config import get_config
from mexpand.exceptions import CapabilityError, InvalidSpecError
from mexpand.multiindex import MultiIndex, enumerate_multi_indices
from mexpand.numerics.points import as_points, restore
from mexpand.numerics.quadrature import gauss_legendre
from mexpand.signals import TransformedSignal


class DiffOperator:
    """L = Σ_{[β]≤N} a_β D^β with a_𝟎 ≠ 0."""

    def __init__(self, dim: int, coeffs: Mapping, name: str = "operator"):
        self.dim = int(dim)
        self.name = name
        parsed: dict[MultiIndex, complex] = {}
        for key, value in coeffs.items():
            beta = MultiIndex.of(key)
            if beta.dim != self.dim:
                raise InvalidSpecError(f"multi-index {beta} does not match dimension {self.dim}")
            value = complex(value)
            if not np.isfinite(value.real) or not np.isfinite(value.imag):
                raise InvalidSpecError(f"coefficient a_{beta} is not finite")
            parsed[beta] = parsed.get(beta, 0.0) + value
        zero = MultiIndex.zero(self.dim)
        if parsed.get(zero, 0.0) == 0.0:
            raise InvalidSpecError("the zero-order coefficient a_0 must be nonzero")
        self._coeffs = {
            b: parsed[b]
            for b in sorted(parsed, key=lambda b: (b.total, b.components))
            if parsed[b] != 0.0
        }

    @classmethod
    def identity(cls, dim: int) -> DiffOperator:
        return cls(dim, {MultiIndex.zero(dim): 1.0}, name="identity")

    @property
    def order(self) -> int:
        return max(b.total for b in self._coeffs)

    def items(self) -> list[tuple[MultiIndex, complex]]:
        return list(self._coeffs.items())

    def coefficient(self, beta) -> complex:
        return self._coeffs.get(MultiIndex.of(beta), 0.0 + 0.0j)

    def symbol(self, xi) -> np.ndarray:
        """P(ξ) = Σ a_β (2πiξ)^β, the multiplier of L on the Fourier side."""
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for beta, a in self._coeffs.items():
            out = out + a * beta.power(2j * np.pi * xi)
        return out

    def dist_ft(self, xi) -> np.ndarray:
        """Σ conj(a_β)(-2πiξ)^β, the transform of φ̃ = Σ conj(a_β)(-1)^{[β]}D^βδ."""
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for beta, a in self._coeffs.items():
            out = out + np.conj(a) * beta.power(-2j * np.pi * xi)
        return out

    def apply(self, f, x):
        pts, batch = as_points(x, self.dim)
        out = np.zeros(len(pts), dtype=complex)
        for beta, a in self._coeffs.items():
            out += a * np.asarray(f.eval_derivative(beta, pts)).reshape(-1)
        return restore(out, batch)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "order": self.order,
            "coeffs": [
                {"beta": list(b.components), "value": a} for b, a in self._coeffs.items()
            ],
        }

    def __repr__(self) -> str:
        terms = ", ".join(f"{b}: {a:g}" for b, a in self._coeffs.items())
        return f"DiffOperator({self.name}; {terms})"


def dist_ft(L: DiffOperator, xi):
    pts, batch = as_points(xi, L.dim)
    return restore(L.dist_ft(pts), batch)


def apply(L: DiffOperator, f, x):
    return L.apply(f, x)


def ball_moment(beta, d: int) -> float:
    """∫_{B₁} t^β dt over the unit ball of ℝ^d."""
    beta = MultiIndex.of(beta)
    if beta.dim != d:
        raise InvalidSpecError(f"multi-index {beta} does not match dimension {d}")
    if not beta.is_even():
        return 0.0
    num = 1.0
    for b in beta:
        num *= gamma((b + 1) / 2.0)
    return num / gamma((beta.total + d) / 2.0 + 1.0)


def unit_ball_volume(d: int) -> float:
    return ball_moment(MultiIndex.zero(d), d)


@dataclass(frozen=True)
class RadiusProfile:
    """h(u): constant c, linear c·u or power c·u^q."""

    kind: Literal["constant", "linear", "power"] = "constant"
    c: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear", "power"):
            raise InvalidSpecError(f"unknown radius profile '{self.kind}'")
        if not self.c > 0:
            raise InvalidSpecError(f"radius scale must be positive, got {self.c}")

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return np.full(u.shape, self.c)
        if self.kind == "linear":
            return self.c * u
        return self.c * u**self.q

    def scaled(self, factor: float) -> RadiusProfile:
        return RadiusProfile(self.kind, self.c * factor, self.q)


@dataclass(frozen=True)
class AveragingScheme:
    """Random radius h(u) with u distributed according to the density w.

    Point-mass mixtures are stored exactly; continuous densities are
    discretized once with Gauss-Legendre nodes on their support, and the same
    nodes serve both the moments and the expected samples.
    """

    profile: RadiusProfile
    u_nodes: tuple[float, ...]
    u_weights: tuple[float, ...]
    kind: str = "mixture"
    support: tuple[float, float] | None = None
    moment_budget: int = 8

    def __post_init__(self):
        nodes = np.asarray(self.u_nodes, dtype=float)
        weights = np.asarray(self.u_weights, dtype=float)
        if nodes.shape != weights.shape or nodes.size == 0:
            raise InvalidSpecError("scheme nodes and weights must be non-empty and aligned")
        if np.any(weights < 0):
            raise InvalidSpecError("scheme weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-10:
            raise InvalidSpecError(f"scheme density must integrate to 1, got {weights.sum():.12g}")
        radii = self.profile(nodes)
        if np.any(~np.isfinite(radii)) or np.any(radii[weights > 0] <= 0):
            raise InvalidSpecError("radius profile must be positive and finite on the support")

    @classmethod
    def point_mass(cls, h: float, moment_budget: int = 8) -> AveragingScheme:
        return cls(RadiusProfile("constant", h), (1.0,), (1.0,), "point_mass", None, moment_budget)

    @classmethod
    def mixture(cls, masses, profile: RadiusProfile, moment_budget: int = 8) -> AveragingScheme:
        us = tuple(float(u) for u, _ in masses)
        ps = tuple(float(p) for _, p in masses)
        return cls(profile, us, ps, "mixture", None, moment_budget)

    @classmethod
    def density(
        cls,
        w: Callable[[np.ndarray], np.ndarray],
        lo: float,
        hi: float,
        profile: RadiusProfile,
        nodes: int | None = None,
        moment_budget: int = 8,
        kind: str = "density",
    ) -> AveragingScheme:
        if not lo < hi:
            raise InvalidSpecError(f"density support must satisfy lo < hi, got [{lo}, {hi}]")
        n = nodes or get_config().quadrature.scheme_nodes
        t, wt = gauss_legendre(n)
        u = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
        weights = 0.5 * (hi - lo) * wt * np.asarray(w(u), dtype=float)
        return cls(profile, tuple(u), tuple(weights), kind, (float(lo), float(hi)), moment_budget)

    @classmethod
    def uniform(cls, lo: float, hi: float, profile: RadiusProfile, nodes: int | None = None) -> AveragingScheme:
        return cls.density(
            lambda u: np.full(np.shape(u), 1.0 / (hi - lo)), lo, hi, profile, nodes, kind="uniform"
        )

    @property
    def radii(self) -> np.ndarray:
        return self.profile(np.asarray(self.u_nodes))

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.u_weights)

    def moment(self, k: int) -> float:
        """∫ w(u) h(u)^k du."""
        if k > self.moment_budget:
            raise CapabilityError(
                f"moment of order {k} exceeds the scheme budget {self.moment_budget}"
            )
        value = float(self.weights @ self.radii**k)
        if not np.isfinite(value):
            raise CapabilityError(f"moment of order {k} is not finite")
        return value

    def scaled(self, factor: float) -> AveragingScheme:
        return AveragingScheme(
            self.profile.scaled(factor),
            self.u_nodes,
            self.u_weights,
            self.kind,
            self.support,
            self.moment_budget,
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "profile": {"kind": self.profile.kind, "c": self.profile.c, "q": self.profile.q},
            "support": self.support,
            "nodes": len(self.u_nodes),
            "moments": [self.moment(k) for k in range(min(4, self.moment_budget) + 1)],
        }


def falsified_operator(N: int, scheme: AveragingScheme, d: int) -> DiffOperator:
    """Operator whose samples match expected ball averages up to the Taylor remainder.

    a_β = (1/β!)(∫_{B₁}t^β/V₁)∫w h^{[β]}; odd multi-indices vanish by symmetry.
    """
    if N < 0:
        raise InvalidSpecError(f"operator order must be nonnegative, got {N}")
    # finite (N+1)-th moment keeps the Taylor remainder integrable
    scheme.moment(N + 1)
    volume = unit_ball_volume(d)
    coeffs: dict[MultiIndex, complex] = {MultiIndex.zero(d): 1.0}
    for beta in enumerate_multi_indices(d, N):
        if beta.total == 0 or not beta.is_even():
            continue
        coeffs[beta] = ball_moment(beta, d) / volume * scheme.moment(beta.total) / beta.factorial
    return DiffOperator(d, coeffs, name=f"falsified(N={N})")


def solve_example3(a20: complex, a02: complex) -> tuple[complex, complex]:
    """Coefficients of the two-dimensional order-3 kernel compatible with L.

    Matches the ξ₁² and ξ₂² terms of φ̂·φ̃̂ at the origin for
    φ̂ = sinc³(ξ₁)sinc³(ξ₂)(1 + b₁sin²πξ₁ + b₂sin²πξ₂).
    """
    return 0.5 + 4.0 * np.conj(complex(a20)), 0.5 + 4.0 * np.conj(complex(a02))


def solve_example4(a1: complex, a2: complex, a3: complex) -> tuple[complex, complex, complex]:
    """Triangular system for the one-dimensional order-4 kernel."""
    c1, c2, c3 = (np.conj(complex(a)) for a in (a1, a2, a3))
    b1 = 2j * c1
    b2 = (2.0 + 12.0 * c2 + 6j * c1 * b1) / 3.0
    b3 = (5.0 * b1 + 4j * (3.0 * b2 - 2.0) * c1 + 24.0 * b1 * c2 - 48j * c3) / 6.0
    return complex(b1), complex(b2), complex(b3)


def taylor_identity_residual(f, A, x, t, N: int) -> float:
    """|Σ D^βf(Ax)(At)^β/β! - Σ D^β(f∘A)(x)t^β/β!| over [β] ≤ N."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    composed = TransformedSignal(f, A)
    Ax, At = A @ x, A @ t
    lhs = rhs = 0.0 + 0.0j
    for beta in enumerate_multi_indices(f.dim, N):
        lhs += complex(f.eval_derivative(beta, Ax[None, :])[0]) * complex(beta.power(At)) / beta.factorial
        rhs += complex(composed.eval_derivative(beta, x[None, :])[0]) * complex(beta.power(t)) / beta.factorial
    return abs(lhs - rhs)
