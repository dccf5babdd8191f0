"""Compactly supported kernels built from shifted centered cardinal B-splines.

B_m has Fourier transform sinc^m and support [-m/2, m/2]; a kernel is
φ(x) = Σ_t w_t ∏_a B_{m_a}(x_a - s_{t,a}) with half-integer shifts s_t.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial

import numpy as np

from mexpand.exceptions import CapabilityError, InvalidSpecError
from mexpand.kernels.base import Kernel
from mexpand.multiindex import MultiIndex
from mexpand.numerics.points import as_points, restore, sinc

Shift = tuple[Fraction, ...]


def cardinal_bspline(order: int, x) -> np.ndarray:
    """Centered cardinal B-spline of the given order by the Cox-de Boor recurrence."""
    if order < 1:
        raise InvalidSpecError(f"B-spline order must be positive, got {order}")
    y = np.asarray(x, dtype=float) + order / 2.0
    vals = [((y - i >= 0.0) & (y - i < 1.0)).astype(float) for i in range(order)]
    for k in range(2, order + 1):
        vals = [
            ((y - i) * vals[i] + (k - (y - i)) * vals[i + 1]) / (k - 1)
            for i in range(order - k + 1)
        ]
    return vals[0]


def cardinal_bspline_derivative(order: int, r: int, x) -> np.ndarray:
    """D^r B_m(x) = Σ_i (-1)^i C(r,i) B_{m-r}(x + r/2 - i), valid for r < m."""
    if r == 0:
        return cardinal_bspline(order, x)
    if r >= order:
        raise CapabilityError(
            f"B-spline of order {order} has no classical derivative of order {r}"
        )
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(r + 1):
        out += (-1) ** i * comb(r, i) * cardinal_bspline(order - r, x + r / 2.0 - i)
    return out


def sine_power_terms(n: int) -> list[tuple[Fraction, complex]]:
    """sin^n(πξ) = Σ w e^{-2πiξs}: returns the (s, w) pairs."""
    scale = (2j) ** (-n)
    return [
        (Fraction(n - 2 * r, 2), scale * comb(n, r) * (-1) ** (n - r)) for r in range(n + 1)
    ]


def sinc_power_taylor(m: int, center: float, order: int) -> np.ndarray:
    """Taylor coefficients of sinc(center + t)^m in t, up to t^order."""
    n = np.arange(order + 1)
    scale = np.pi**n / np.asarray([factorial(k) for k in n], dtype=float)
    if center == 0.0:
        # sin(πt)/(πt) = Σ (-1)^k (πt)^{2k} / (2k+1)!
        series = np.where(n % 2 == 0, (-1.0) ** (n // 2) * scale / (n + 1), 0.0)
    else:
        if float(center).is_integer():
            s, c = 0.0, (-1.0) ** int(center)
        else:
            s, c = np.sin(np.pi * center), np.cos(np.pi * center)
        sin_t = np.where(n % 2 == 1, (-1.0) ** ((n - 1) // 2) * scale, 0.0)
        cos_t = np.where(n % 2 == 0, (-1.0) ** (n // 2) * scale, 0.0)
        inverse = (-1.0 / center) ** n / (np.pi * center)
        series = np.convolve(c * sin_t + s * cos_t, inverse)[: order + 1]
    out = np.zeros(order + 1)
    out[0] = 1.0
    for _ in range(m):
        out = np.convolve(out, series)[: order + 1]
    return out


class SplineComboKernel(Kernel):
    form = "SplineCombo"
    exact_transform_derivatives = True

    def __init__(
        self,
        orders: tuple[int, ...],
        terms: list[tuple[Shift, complex]],
        name: str = "spline_combo",
        numerator: list[tuple[tuple[int, ...], complex]] | None = None,
    ):
        orders = tuple(int(m) for m in orders)
        super().__init__(len(orders), name)
        if any(m < 1 for m in orders):
            raise InvalidSpecError(f"spline orders must be positive: {orders}")
        merged: dict[Shift, complex] = {}
        for shift, weight in terms:
            shift = tuple(Fraction(s).limit_denominator(2) for s in shift)
            if len(shift) != self.dim:
                raise InvalidSpecError(f"shift {shift} does not match dimension {self.dim}")
            if any(s.denominator not in (1, 2) for s in shift):
                raise InvalidSpecError(f"shifts must be half-integers, got {shift}")
            merged[shift] = merged.get(shift, 0.0) + complex(weight)
        self.orders = orders
        self.terms: tuple[tuple[Shift, complex], ...] = tuple(
            (s, w) for s, w in sorted(merged.items()) if w != 0
        )
        self.numerator = numerator

    @property
    def support_radius(self) -> tuple[float, ...]:
        return tuple(
            m / 2.0 + max((abs(float(s[a])) for s, _ in self.terms), default=0.0)
            for a, m in enumerate(self.orders)
        )

    def _combine(self, pts: np.ndarray, factor) -> np.ndarray:
        out = np.zeros(len(pts), dtype=complex)
        for shift, weight in self.terms:
            prod = np.ones(len(pts))
            for a in range(self.dim):
                prod = prod * factor(a, pts[:, a] - float(shift[a]))
            out += weight * prod
        return out

    def _phi(self, pts):
        return self._combine(pts, lambda a, t: cardinal_bspline(self.orders[a], t))

    def _phi_derivative(self, beta, pts):
        return self._combine(
            pts, lambda a, t: cardinal_bspline_derivative(self.orders[a], beta[a], t)
        )

    def _phi_hat(self, pts):
        base = np.ones(len(pts))
        for a, m in enumerate(self.orders):
            base = base * sinc(pts[:, a]) ** m
        phase = np.zeros(len(pts), dtype=complex)
        for shift, weight in self.terms:
            s = np.asarray([float(v) for v in shift])
            phase += weight * np.exp(-2j * np.pi * pts @ s)
        return base * phase

    def phi_hat_derivative(self, beta, xi) -> tuple[complex, float]:
        """Exact D^β φ̂(ξ) by Leibniz over the sinc powers and the phase polynomial."""
        beta = MultiIndex.of(beta)
        if beta.dim != self.dim:
            raise InvalidSpecError(f"multi-index {beta} does not match dimension {self.dim}")
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if not self.terms:
            return 0.0j, 0.0
        taylor = [sinc_power_taylor(m, float(xi[a]), beta[a]) for a, m in enumerate(self.orders)]
        shifts = np.asarray([[float(v) for v in s] for s, _ in self.terms])
        weights = np.asarray([w for _, w in self.terms]) * np.exp(-2j * np.pi * shifts @ xi)
        total = 0.0j
        for gamma in product(*(range(b + 1) for b in beta)):
            sinc_part = 1.0
            phase_factor = np.ones(len(shifts), dtype=complex)
            for a, (b, g) in enumerate(zip(beta, gamma)):
                sinc_part *= comb(b, g) * factorial(g) * taylor[a][g]
                phase_factor *= (-2j * np.pi * shifts[:, a]) ** (b - g)
            if sinc_part != 0.0:
                total += sinc_part * complex(weights @ phase_factor)
        return total, 0.0

    def eval_symbolic_hat(self, xi):
        """Σ c ∏ sin^{p_a}(πξ_a)/(πξ_a)^{m_a} from the stored numerator."""
        if self.numerator is None:
            raise CapabilityError(f"kernel {self.name} was not built from a numerator")
        pts, batch = as_points(xi, self.dim)
        out = np.zeros(len(pts), dtype=complex)
        for powers, coeff in self.numerator:
            term = np.ones(len(pts))
            for a, (p, m) in enumerate(zip(powers, self.orders)):
                term = term * sinc(pts[:, a]) ** m * np.sin(np.pi * pts[:, a]) ** (p - m)
            out += coeff * term
        return restore(out, batch)

    def envelope(self, pts):
        inside = np.all(np.abs(pts) <= np.asarray(self.support_radius), axis=1)
        return np.where(inside, sum(abs(w) for _, w in self.terms), 0.0)

    def support_descriptor(self) -> dict:
        return {"support_radius": list(self.support_radius)}

    def scaled(self, factor: complex) -> SplineComboKernel:
        return SplineComboKernel(
            self.orders,
            [(s, factor * w) for s, w in self.terms],
            name=f"{self.name}*{factor}",
            numerator=None
            if self.numerator is None
            else [(p, factor * c) for p, c in self.numerator],
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "form": self.form,
            "orders": list(self.orders),
            "terms": [
                {"shift": [str(v) for v in s], "weight": w} for s, w in self.terms
            ],
            "support_radius": list(self.support_radius),
        }


def spline_decompose(
    numerator: list[tuple[int | tuple[int, ...], complex]],
    denom_power: int | tuple[int, ...],
    dim: int = 1,
    name: str = "spline_combo",
) -> SplineComboKernel:
    """Rewrite Σ c ∏ sin^{p_a}(πξ_a)/(πξ_a)^{m_a} as shifted B-spline terms."""
    orders = (
        tuple(int(m) for m in denom_power)
        if isinstance(denom_power, (tuple, list))
        else (int(denom_power),) * dim
    )
    dim = len(orders)
    normalized: list[tuple[tuple[int, ...], complex]] = []
    terms: list[tuple[Shift, complex]] = []
    for power, coeff in numerator:
        powers = (
            tuple(int(p) for p in power)
            if isinstance(power, (tuple, list))
            else (int(power),) * dim
        )
        if len(powers) != dim:
            raise InvalidSpecError(f"numerator powers {powers} do not match dimension {dim}")
        if any(p < m for p, m in zip(powers, orders)):
            raise InvalidSpecError(
                f"numerator power {powers} is below the denominator power {orders}"
            )
        normalized.append((powers, complex(coeff)))
        axis_terms = [sine_power_terms(p - m) for p, m in zip(powers, orders)]
        for combo in product(*axis_terms):
            shift = tuple(s for s, _ in combo)
            weight = complex(coeff)
            for _, w in combo:
                weight *= w
            terms.append((shift, weight))
    return SplineComboKernel(orders, terms, name=name, numerator=normalized)
