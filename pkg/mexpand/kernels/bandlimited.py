"""Band-limited kernels: φ̂ = θ·1_S with θ smooth on a parallelepiped S."""

from __future__ import annotations

from collections.abc import Callable
from math import ceil

import numpy as np
from loguru import logger

from mexpand.config import get_config
from mexpand.exceptions import AccuracyError, ZeroCrossingError
from mexpand.kernels.base import Box, Kernel
from mexpand.multiindex import MultiIndex
from mexpand.numerics.points import as_points, restore, sinc
from mexpand.numerics.quadrature import composite_gauss_legendre, tensor_weights

Density = Callable[[np.ndarray], np.ndarray]


class BandLimitedKernel(Kernel):
    form = "BandLimited"

    def __init__(
        self,
        box: Box,
        theta: Density | complex | float,
        name: str = "class_b",
        decay_exponent: float = 1.0,
    ):
        super().__init__(box.dim, name)
        self.box = box
        if callable(theta):
            self._theta = theta
            self.constant: complex | None = None
        else:
            self.constant = complex(theta)
            self._theta = lambda xi: np.full(len(xi), self.constant, dtype=complex)
        self.decay_exponent = float(decay_exponent)
        per_axis = 201 if self.dim == 1 else 41
        self.theta_sup = float(np.max(np.abs(self.theta(box.grid(per_axis)))))

    def theta(self, xi: np.ndarray) -> np.ndarray:
        return np.asarray(self._theta(np.asarray(xi, dtype=float)), dtype=complex)

    def _phi_hat(self, pts):
        out = np.zeros(len(pts), dtype=complex)
        inside = self.box.contains(pts)
        if np.any(inside):
            out[inside] = self.theta(pts[inside])
        return out

    def _closed_form(self, pts: np.ndarray) -> np.ndarray:
        out = np.full(len(pts), self.constant, dtype=complex)
        for a, (lo, hi) in enumerate(zip(self.box.lower, self.box.upper)):
            x = pts[:, a]
            out *= (hi - lo) * np.exp(1j * np.pi * x * (lo + hi)) * sinc((hi - lo) * x)
        return out

    def _phi(self, pts):
        if self.constant is not None:
            return self._closed_form(pts)
        return self.spectral_integral(pts)

    def _phi_derivative(self, beta: MultiIndex, pts):
        return self.spectral_integral(pts, lambda xi: beta.power(2j * np.pi * xi))

    def apply_operator(self, L, x):
        pts, batch = as_points(x, self.dim)
        return restore(self.spectral_integral(pts, L.symbol), batch)

    def applied(self, L) -> BandLimitedKernel:
        """The kernel Lφ, with transform P(ξ)θ(ξ) on the same box."""
        base = self.theta
        return BandLimitedKernel(
            self.box, lambda xi: L.symbol(xi) * base(xi), f"{L.name}[{self.name}]", self.decay_exponent
        )

    def _weights(self, panels: tuple[int, ...], multiplier) -> tuple[list[np.ndarray], np.ndarray]:
        q = get_config().quadrature
        nodes, weights = [], []
        for p, lo, hi in zip(panels, self.box.lower, self.box.upper):
            xa, wa = composite_gauss_legendre(lo, hi, p, q.nodes_per_panel)
            nodes.append(xa)
            weights.append(wa)
        mesh = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1)
        flat = mesh.reshape(-1, self.dim)
        values = self.theta(flat)
        if multiplier is not None:
            values = values * multiplier(flat)
        return nodes, values.reshape(mesh.shape[:-1]) * tensor_weights(weights)

    def panels_for(self, xs: np.ndarray) -> tuple[int, ...]:
        """Equal panel counts per axis from the largest |x| times diam(S)."""
        q = get_config().quadrature
        reach = float(np.max(np.linalg.norm(xs, axis=1))) if len(xs) else 0.0
        return (max(q.min_panels, ceil(q.panel_scale * reach * self.box.diameter)),) * self.dim

    def _apply_rule(self, xs: np.ndarray, nodes: list[np.ndarray], W: np.ndarray) -> np.ndarray:
        factors = [np.exp(2j * np.pi * xs[:, a, None] * nodes[a][None, :]) for a in range(self.dim)]
        letters = "abcdefgh"[: self.dim]
        spec = "".join(letters) + "," + ",".join("z" + c for c in letters) + "->z"
        return np.einsum(spec, W, *factors)

    def spectral_integral(self, pts: np.ndarray, multiplier=None, tol: float | None = None) -> np.ndarray:
        """∫_S m(ξ)θ(ξ)e^{2πi(x,ξ)}dξ by composite tensor Gauss-Legendre.

        Panels per axis scale with |x|·diam(S); the error is estimated against
        the half-panel rule and panels are doubled until it meets `tol`.
        """
        q = get_config().quadrature
        tol = q.phi_tol if tol is None else tol
        pts = np.asarray(pts, dtype=float)
        out = np.empty(len(pts), dtype=complex)
        if len(pts) == 0:
            return out
        order = np.argsort(np.linalg.norm(pts, axis=1), kind="stable")
        cache: dict[tuple[int, ...], tuple[list[np.ndarray], np.ndarray]] = {}

        def rule(panels):
            if panels not in cache:
                cache[panels] = self._weights(panels, multiplier)
            return cache[panels]

        start = 0
        while start < len(pts):
            head = pts[order[start : start + 256]]
            width = int(np.prod([p * q.nodes_per_panel for p in self.panels_for(head)]))
            rows = max(1, min(256, q.block_pairs // max(width, 1)))
            idx = order[start : start + rows]
            xs = pts[idx]
            panels = self.panels_for(xs)
            while True:
                fine = self._apply_rule(xs, *rule(panels))
                coarse = self._apply_rule(xs, *rule(tuple(max(1, ceil(p / 2)) for p in panels)))
                estimate = float(np.max(np.abs(fine - coarse)))
                if estimate <= tol:
                    break
                if max(panels) * 2 > q.max_panels:
                    raise AccuracyError(
                        f"quadrature for kernel {self.name} did not reach {tol:g}",
                        estimate=estimate,
                    )
                panels = tuple(2 * p for p in panels)
                logger.debug(f"{self.name}: refining to {panels} panels")
            out[idx] = fine
            start += rows
        return out

    def envelope(self, pts):
        bound = np.full(len(pts), self.theta_sup)
        for a, ln in enumerate(self.box.lengths):
            ax = np.abs(pts[:, a])
            bound = bound * np.minimum(ln, 1.0 / (np.pi * np.maximum(ax, 1e-300)))
        return bound

    def support_descriptor(self) -> dict:
        return {"decay_exponent": self.decay_exponent, "spectrum": self.box.to_json()}

    def scaled(self, factor: complex) -> BandLimitedKernel:
        if self.constant is not None:
            theta = self.constant * factor
        else:
            base = self._theta
            theta = lambda xi: factor * base(xi)
        return BandLimitedKernel(self.box, theta, f"{self.name}*{factor}", self.decay_exponent)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "form": self.form,
            "spectrum": self.box.to_json(),
            "constant_density": self.constant,
            "decay_exponent": self.decay_exponent,
        }


def make_class_b(theta: Density | complex | float, S: Box, name: str = "class_b") -> BandLimitedKernel:
    return BandLimitedKernel(S, theta, name=name)


def _locate_zero(L, S: Box) -> np.ndarray | None:
    if S.dim == 1:
        xi = np.linspace(S.lower[0], S.upper[0], 2001)
        values = L.dist_ft(xi[:, None])
        scale = max(1.0, float(np.max(np.abs(values))))
        hit = np.argmin(np.abs(values))
        if abs(values[hit]) <= 1e-10 * scale:
            return np.array([xi[hit]])
        if np.max(np.abs(values.imag)) <= 1e-12 * scale:
            flips = np.nonzero(np.sign(values.real[:-1]) * np.sign(values.real[1:]) < 0)[0]
            if flips.size:
                i = flips[0]
                return np.array([0.5 * (xi[i] + xi[i + 1])])
        return None
    grid = S.grid(81)
    values = L.dist_ft(grid)
    scale = max(1.0, float(np.max(np.abs(values))))
    hit = np.argmin(np.abs(values))
    if abs(values[hit]) <= 1e-6 * scale:
        return grid[hit]
    return None


def make_reciprocal_kernel(L, S: Box, name: str = "reciprocal") -> BandLimitedKernel:
    """Kernel with θ = 1/conj(φ̃̂) on S, strictly compatible with L."""
    location = _locate_zero(L, S)
    if location is not None:
        raise ZeroCrossingError(
            f"the Fourier transform of the operator vanishes near {location.tolist()}",
            location=location.tolist(),
        )
    theta = lambda xi: 1.0 / np.conj(L.dist_ft(xi))
    return BandLimitedKernel(S, theta, name=name)
