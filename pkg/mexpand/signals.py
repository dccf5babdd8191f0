"""Test signals with exact values, derivatives and Fourier transforms.

Convention: f̂(ξ) = ∫ f(x) e^{-2πi(x,ξ)} dx, so e^{-π|x|²} is self-dual.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable
from functools import lru_cache
from math import comb, factorial, inf

import numpy as np
from numpy.polynomial import hermite

from mexpand.exceptions import CapabilityError, InvalidSpecError
from mexpand.multiindex import MultiIndex, chain_rule_expansion
from mexpand.numerics.box import Box
from mexpand.numerics.points import as_points, restore

DEFAULT_MAX_ORDER = 6
_SERIES_TERMS = 30


def gaussian_derivative(sigma: float, r: int, t) -> np.ndarray:
    """D^r e^{-πt²/σ²} via physicists' Hermite polynomials."""
    s = np.sqrt(np.pi) / sigma
    y = s * np.asarray(t, dtype=float)
    coef = np.zeros(r + 1)
    coef[r] = 1.0
    return (-s) ** r * hermite.hermval(y, coef) * np.exp(-y * y)


def _series_derivative(r: int, z: np.ndarray, offset: int) -> np.ndarray:
    """D^r Σ_k (-1)^k z^{2k}/(2k+offset)! for the entire functions sin z/z and (1-cos z)/z²."""
    out = np.zeros_like(z)
    for k in range(_SERIES_TERMS):
        if 2 * k < r:
            continue
        coeff = (-1) ** k * factorial(2 * k) / factorial(2 * k - r) / factorial(2 * k + offset)
        out = out + coeff * z ** (2 * k - r)
    return out


def sinc_core_derivative(r: int, z) -> np.ndarray:
    """D^r (sin z / z)."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 2.0
    out = _series_derivative(r, np.where(small, z, 0.0), 1)
    zz = np.where(small, 1.0, z)
    tail = np.zeros_like(z)
    for i in range(r + 1):
        n = r - i
        tail = tail + comb(r, i) * np.sin(zz + i * np.pi / 2) * (-1) ** n * factorial(n) * zz ** (-1 - n)
    return np.where(small, out, tail)


def cosine_core_derivative(r: int, u) -> np.ndarray:
    """D^r ((1 - cos u) / u²)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 2.0
    out = _series_derivative(r, np.where(small, u, 0.0), 2)
    uu = np.where(small, 1.0, u)
    tail = np.zeros_like(u)
    for i in range(r + 1):
        n = r - i
        lead = 1.0 - np.cos(uu) if i == 0 else -np.cos(uu + i * np.pi / 2)
        tail = tail + comb(r, i) * lead * (-1) ** n * factorial(n + 1) * uu ** (-2 - n)
    return np.where(small, out, tail)


class Factor(ABC):
    """One-dimensional factor of a separable signal."""

    band: float | None = None

    @abstractmethod
    def value(self, t: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def derivative(self, r: int, t: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def ft(self, xi: np.ndarray) -> np.ndarray: ...


class GaussianFactor(Factor):
    def __init__(self, sigma: float):
        if not sigma > 0:
            raise InvalidSpecError(f"sigma must be positive, got {sigma}")
        self.sigma = float(sigma)

    def value(self, t):
        return np.exp(-np.pi * np.asarray(t) ** 2 / self.sigma**2)

    def derivative(self, r, t):
        return gaussian_derivative(self.sigma, r, t)

    def ft(self, xi):
        return self.sigma * np.exp(-np.pi * self.sigma**2 * np.asarray(xi) ** 2)


class ModulatedGaussianFactor(GaussianFactor):
    def __init__(self, sigma: float, omega: float):
        super().__init__(sigma)
        self.omega = float(omega)

    def _carrier(self, k, t):
        w = 2 * np.pi * self.omega
        return w**k * np.cos(w * np.asarray(t) + k * np.pi / 2)

    def value(self, t):
        return self._carrier(0, t) * super().value(t)

    def derivative(self, r, t):
        return sum(
            comb(r, k) * self._carrier(k, t) * gaussian_derivative(self.sigma, r - k, t)
            for k in range(r + 1)
        )

    def ft(self, xi):
        xi = np.asarray(xi)
        return 0.5 * (super().ft(xi - self.omega) + super().ft(xi + self.omega))


class PolyGaussianFactor(GaussianFactor):
    def __init__(self, power: int, sigma: float):
        super().__init__(sigma)
        if power < 0:
            raise InvalidSpecError(f"power must be nonnegative, got {power}")
        self.power = int(power)

    def value(self, t):
        return np.asarray(t) ** self.power * super().value(t)

    def derivative(self, r, t):
        t = np.asarray(t, dtype=float)
        m = self.power
        return sum(
            comb(r, i) * factorial(m) / factorial(m - i) * t ** (m - i)
            * gaussian_derivative(self.sigma, r - i, t)
            for i in range(min(r, m) + 1)
        )

    def ft(self, xi):
        # FT(t^m g) = (i/2π)^m ĝ^{(m)}, ĝ a Gaussian of width 1/σ
        m = self.power
        return (1j / (2 * np.pi)) ** m * self.sigma * gaussian_derivative(1.0 / self.sigma, m, xi)


class TriangleSpectrumFactor(Factor):
    """a·sinc²(at), whose transform is the triangle (1 - |ξ|/a)₊."""

    def __init__(self, a: float):
        if not a > 0:
            raise InvalidSpecError(f"band parameter must be positive, got {a}")
        self.a = float(a)
        self.band = self.a

    def value(self, t):
        return self.derivative(0, t)

    def derivative(self, r, t):
        w = 2 * np.pi * self.a
        return 2 * self.a * w**r * cosine_core_derivative(r, w * np.asarray(t, dtype=float))

    def ft(self, xi):
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(xi)) / self.a)


class BumpSpectrumFactor(Factor):
    """Raised-cosine spectrum cos²(πξ/2a) on |ξ| ≤ a."""

    def __init__(self, a: float):
        if not a > 0:
            raise InvalidSpecError(f"band parameter must be positive, got {a}")
        self.a = float(a)
        self.band = self.a

    def value(self, t):
        return self.derivative(0, t)

    def derivative(self, r, t):
        t = np.asarray(t, dtype=float)
        scale = (2 * np.pi * self.a) ** r
        y = 2 * self.a * t
        return scale * self.a * (
            sinc_core_derivative(r, np.pi * y)
            + 0.5 * sinc_core_derivative(r, np.pi * (y + 1))
            + 0.5 * sinc_core_derivative(r, np.pi * (y - 1))
        )

    def ft(self, xi):
        xi = np.asarray(xi)
        return np.where(np.abs(xi) <= self.a, np.cos(np.pi * xi / (2 * self.a)) ** 2, 0.0)


class Signal(ABC):
    """A function on ℝ^d with exact derivatives up to `max_derivative_order`."""

    def __init__(
        self,
        dim: int,
        family: str,
        params: dict | None = None,
        max_derivative_order: int = DEFAULT_MAX_ORDER,
        decay_exponent: float = inf,
        spectrum_support: Box | None = None,
    ):
        if dim < 1:
            raise InvalidSpecError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.family = family
        self.params = dict(params or {})
        self.max_derivative_order = max_derivative_order
        self.decay_exponent = decay_exponent
        self.spectrum_support = spectrum_support

    @abstractmethod
    def _value(self, pts: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _derivative(self, beta: MultiIndex, pts: np.ndarray) -> np.ndarray: ...

    def _ft(self, pts: np.ndarray) -> np.ndarray:
        raise CapabilityError(f"signal '{self.family}' has no Fourier transform")

    def eval_value(self, x):
        pts, batch = as_points(x, self.dim)
        return restore(self._value(pts).astype(complex), batch)

    def eval_derivative(self, beta, x):
        beta = MultiIndex.of(beta)
        if beta.dim != self.dim:
            raise InvalidSpecError(f"multi-index {beta} does not match dimension {self.dim}")
        if beta.total > self.max_derivative_order:
            raise CapabilityError(
                f"signal '{self.family}' provides derivatives up to order "
                f"{self.max_derivative_order}, requested {beta}"
            )
        pts, batch = as_points(x, self.dim)
        return restore(self._derivative(beta, pts).astype(complex), batch)

    def eval_ft(self, xi):
        pts, batch = as_points(xi, self.dim)
        return restore(self._ft(pts).astype(complex), batch)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "dim": self.dim,
            "params": self.params,
            "max_derivative_order": self.max_derivative_order,
            "decay_exponent": None if self.decay_exponent == inf else self.decay_exponent,
            "spectrum_support": None
            if self.spectrum_support is None
            else self.spectrum_support.to_json(),
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.family}, dim={self.dim}, {self.params})"


class SeparableSignal(Signal):
    """f(x) = ∏_a factor(x_a)."""

    def __init__(self, dim: int, family: str, factor: Factor, params: dict, max_derivative_order: int = DEFAULT_MAX_ORDER):
        support = None if factor.band is None else Box.cube(factor.band, dim)
        super().__init__(dim, family, params, max_derivative_order, inf, support)
        self.factor = factor

    def _value(self, pts):
        out = np.ones(len(pts))
        for a in range(self.dim):
            out = out * self.factor.value(pts[:, a])
        return out

    def _derivative(self, beta, pts):
        out = np.ones(len(pts))
        for a, r in enumerate(beta):
            out = out * self.factor.derivative(r, pts[:, a])
        return out

    def _ft(self, pts):
        out = np.ones(len(pts), dtype=complex)
        for a in range(self.dim):
            out = out * self.factor.ft(pts[:, a])
        return out


class PolynomialSignal(Signal):
    """Σ c_α x^α; the zero polynomial is the only one with a function transform."""

    def __init__(self, dim: int, coeffs: dict):
        parsed = {MultiIndex.of(k): complex(v) for k, v in coeffs.items()}
        if any(k.dim != dim for k in parsed):
            raise InvalidSpecError("polynomial exponents do not match the dimension")
        self.coeffs = {k: v for k, v in parsed.items() if v != 0}
        super().__init__(
            dim,
            "polynomial",
            {"coeffs": [{"alpha": list(k.components), "value": v} for k, v in self.coeffs.items()]},
            max_derivative_order=64,
        )

    @property
    def degree(self) -> int:
        return max((k.total for k in self.coeffs), default=0)

    def _derivative(self, beta, pts):
        out = np.zeros(len(pts), dtype=complex)
        for alpha, c in self.coeffs.items():
            if any(b > a for a, b in zip(alpha, beta)):
                continue
            term = np.full(len(pts), c, dtype=complex)
            for axis, (a, b) in enumerate(zip(alpha, beta)):
                term = term * factorial(a) / factorial(a - b) * pts[:, axis] ** (a - b)
            out += term
        return out

    def _value(self, pts):
        return self._derivative(MultiIndex.zero(self.dim), pts)

    def _ft(self, pts):
        if not self.coeffs:
            return np.zeros(len(pts), dtype=complex)
        return super()._ft(pts)


class ExponentialSignal(Signal):
    """e^{(c,x)}; exact derivatives c^β e^{(c,x)} of every order."""

    def __init__(self, c):
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        super().__init__(len(c), "exponential", {"c": c.tolist()}, max_derivative_order=64)
        self.c = c

    def _value(self, pts):
        return np.exp(pts @ self.c)

    def _derivative(self, beta, pts):
        return complex(beta.power(self.c)) * self._value(pts)


class LinearCombination(Signal):
    def __init__(self, terms: list[tuple[complex, Signal]]):
        if not terms:
            raise InvalidSpecError("a linear combination needs at least one term")
        dim = terms[0][1].dim
        if any(f.dim != dim for _, f in terms):
            raise InvalidSpecError("all combined signals must share a dimension")
        supports = {None if f.spectrum_support is None else f.spectrum_support for _, f in terms}
        super().__init__(
            dim,
            "combination",
            {"terms": [{"coeff": complex(c), "signal": f.to_json()} for c, f in terms]},
            max_derivative_order=min(f.max_derivative_order for _, f in terms),
            decay_exponent=min(f.decay_exponent for _, f in terms),
            spectrum_support=supports.pop() if len(supports) == 1 else None,
        )
        self.terms = [(complex(c), f) for c, f in terms]

    def _value(self, pts):
        return sum(c * f._value(pts) for c, f in self.terms)

    def _derivative(self, beta, pts):
        return sum(c * f._derivative(beta, pts) for c, f in self.terms)

    def _ft(self, pts):
        return sum(c * f._ft(pts) for c, f in self.terms)


class TransformedSignal(Signal):
    """x ↦ f(Ax), differentiated by the exact multilinear chain rule."""

    def __init__(self, base: Signal, A):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape != (base.dim, base.dim):
            raise InvalidSpecError(f"matrix of shape {A.shape} does not act on dimension {base.dim}")
        super().__init__(
            base.dim,
            f"{base.family}∘A",
            {"base": base.to_json(), "A": A.tolist()},
            base.max_derivative_order,
            base.decay_exponent,
            None,
        )
        self.base = base
        self.A = A
        self._expansions = lru_cache(maxsize=256)(lambda beta: chain_rule_expansion(self.A, beta))

    def _value(self, pts):
        return self.base._value(pts @ self.A.T)

    def _derivative(self, beta, pts):
        mapped = pts @ self.A.T
        out = np.zeros(len(pts), dtype=complex)
        for alpha, c in self._expansions(beta).items():
            out += c * self.base._derivative(alpha, mapped)
        return out

    def _ft(self, pts):
        det = abs(np.linalg.det(self.A))
        return self.base._ft(pts @ np.linalg.inv(self.A)) / det


_signal_registry: dict[str, Callable[..., Signal]] = {}


def register_signal(name: str):
    """Decorator registering a signal builder under a catalogue name."""

    def decorator(builder: Callable[..., Signal]):
        _signal_registry[name] = builder
        return builder

    return decorator


def _order(params: dict) -> int:
    return int(params.get("max_order", DEFAULT_MAX_ORDER))


@register_signal("gaussian")
def gaussian(dim: int = 1, sigma: float = 1.0, **params) -> Signal:
    return SeparableSignal(dim, "gaussian", GaussianFactor(sigma), {"sigma": sigma}, _order(params))


@register_signal("modulated_gaussian")
def modulated_gaussian(dim: int = 1, sigma: float = 1.0, omega: float = 1.0, **params) -> Signal:
    return SeparableSignal(
        dim,
        "modulated_gaussian",
        ModulatedGaussianFactor(sigma, omega),
        {"sigma": sigma, "omega": omega},
        _order(params),
    )


@register_signal("poly_times_gaussian")
def poly_times_gaussian(dim: int = 1, power: int = 2, sigma: float = 1.0, **params) -> Signal:
    return SeparableSignal(
        dim,
        "poly_times_gaussian",
        PolyGaussianFactor(power, sigma),
        {"power": power, "sigma": sigma},
        _order(params),
    )


@register_signal("bandlimited_triangle_spectrum")
def bandlimited_triangle_spectrum(dim: int = 1, a: float = 0.25, **params) -> Signal:
    return SeparableSignal(
        dim, "bandlimited_triangle_spectrum", TriangleSpectrumFactor(a), {"a": a}, _order(params)
    )


@register_signal("bandlimited_bump")
def bandlimited_bump(dim: int = 1, a: float = 0.25, **params) -> Signal:
    return SeparableSignal(dim, "bandlimited_bump", BumpSpectrumFactor(a), {"a": a}, _order(params))


@register_signal("polynomial")
def polynomial(dim: int = 1, coeffs=None, **params) -> Signal:
    entries = coeffs or []
    if isinstance(entries, dict):
        return PolynomialSignal(dim, entries)
    return PolynomialSignal(dim, {tuple(e["alpha"]): e["value"] for e in entries})


@register_signal("exponential")
def exponential(dim: int = 1, c=None, **params) -> Signal:
    c = [0.5] * dim if c is None else c
    return ExponentialSignal(c)


@register_signal("zero")
def zero(dim: int = 1, **params) -> Signal:
    return PolynomialSignal(dim, {})


def available_signals() -> list[str]:
    return sorted(_signal_registry)


def from_spec(name: str, params: dict | None = None, dim: int = 1) -> Signal:
    """Build a catalogue signal such as ``gaussian {sigma: 1}``."""
    builder = _signal_registry.get(name)
    if builder is None:
        raise InvalidSpecError(
            f"unknown signal '{name}', available: {', '.join(available_signals())}"
        )
    params = dict(params or {})
    dim = int(params.pop("dim", dim))
    try:
        return builder(dim=dim, **params)
    except TypeError as e:
        raise InvalidSpecError(f"invalid parameters for signal '{name}': {e}") from e


def check_decay(f: Signal, rho_cap: float = 32.0, radii=None) -> bool:
    """Check |f̂(ξ)|(1+|ξ|)^ρ on |ξ| ∈ [10, 100] stays within 10x its value at 10."""
    radii = np.arange(10.0, 101.0) if radii is None else np.asarray(radii, dtype=float)
    rho = min(f.decay_exponent, rho_cap)
    direction = np.ones(f.dim) / np.sqrt(f.dim)
    mags = np.abs(np.asarray(f.eval_ft(radii[:, None] * direction[None, :]))).reshape(-1)
    scaled = mags * (1.0 + radii) ** rho
    return bool(np.max(scaled) <= 10.0 * scaled[0] + 1e-300)
