"""Gauss-Legendre rules: composite, tensor-product and unit-ball averages."""

from functools import lru_cache

import numpy as np

from mexpand.exceptions import AccuracyError, CapabilityError


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_gauss_legendre(
    a: float, b: float, panels: int, nodes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule with `panels` equal panels of `nodes` points on [a, b]."""
    t, w = gauss_legendre(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wx = (half[:, None] * w[None, :]).ravel()
    return x, wx


def tensor_weights(weights: list[np.ndarray]) -> np.ndarray:
    """Outer product of per-axis weights, shape (n_1, ..., n_d)."""
    letters = "abcdefgh"[: len(weights)]
    return np.einsum(",".join(letters) + "->" + letters, *weights)


@lru_cache(maxsize=32)
def ball_rule(dim: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in the closed unit ball and weights summing to one.

    Integrates the normalized average of polynomials of degree < 2n exactly:
    Gauss-Legendre in d=1, Gauss radial x trapezoid angular in d=2 and
    Gauss radial x Gauss polar x trapezoid azimuthal in d=3.
    """
    if dim == 1:
        t, w = gauss_legendre(n)
        nodes, weights = t[:, None], w / 2.0
    elif dim == 2:
        t, w = gauss_legendre(n)
        r, wr = 0.5 * (t + 1.0), 0.5 * w * 0.5 * (t + 1.0)
        n_ang = 2 * n + 2
        phi = 2.0 * np.pi * np.arange(n_ang) / n_ang
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        nodes = np.stack([rr * np.cos(pp), rr * np.sin(pp)], axis=-1).reshape(-1, 2)
        weights = np.repeat(wr, n_ang) / n_ang
    elif dim == 3:
        t, w = gauss_legendre(n)
        r, wr = 0.5 * (t + 1.0), 0.5 * w * (0.5 * (t + 1.0)) ** 2
        ct, wc = gauss_legendre(n)
        n_ang = 2 * n + 2
        phi = 2.0 * np.pi * np.arange(n_ang) / n_ang
        rr, cc, pp = np.meshgrid(r, ct, phi, indexing="ij")
        st = np.sqrt(1.0 - cc**2)
        nodes = np.stack(
            [rr * st * np.cos(pp), rr * st * np.sin(pp), rr * cc], axis=-1
        ).reshape(-1, 3)
        weights = (wr[:, None, None] * wc[None, :, None] * np.ones(n_ang)).ravel()
    else:
        raise CapabilityError(f"ball rules are available for d <= 3, got {dim}")
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def adaptive_ball_average(integrand, dim: int, tol: float, start: int = 8, max_nodes: int = 256):
    """Average of `integrand` over the unit ball, doubling the rule until stable.

    `integrand(nodes)` receives nodes of shape (q, d) and returns values of
    shape (..., q). Raises AccuracyError when the rule reaches `max_nodes`.
    """
    n = start
    nodes, weights = ball_rule(dim, n)
    prev = integrand(nodes) @ weights
    while True:
        n *= 2
        nodes, weights = ball_rule(dim, n)
        cur = integrand(nodes) @ weights
        estimate = float(np.max(np.abs(cur - prev))) if np.size(cur) else 0.0
        if estimate <= tol:
            return cur
        if n >= max_nodes:
            raise AccuracyError(
                f"ball average did not reach {tol:g} with {n} nodes per axis",
                estimate=estimate,
            )
        prev = cur
