"""Multi-order derivatives by Ridders' extrapolation of central differences.

The stencil for β is h^{-[β]} Σ_i ∏_a (-1)^{i_a} C(β_a, i_a) g(x + (β/2 - i)h),
whose error expands in even powers of h, so a Neville tableau in h² applies.
"""

from itertools import product
from math import comb

import numpy as np

from mexpand.config import get_config
from mexpand.multiindex import MultiIndex


def _stencil(beta: MultiIndex) -> tuple[np.ndarray, np.ndarray]:
    offsets, weights = [], []
    for idx in product(*(range(b + 1) for b in beta)):
        w = 1.0
        for b, i in zip(beta, idx):
            w *= (-1) ** i * comb(b, i)
        offsets.append([b / 2.0 - i for b, i in zip(beta, idx)])
        weights.append(w)
    return np.asarray(offsets, dtype=float), np.asarray(weights, dtype=float)


def central_difference(func, x0, beta: MultiIndex, h: float) -> complex:
    """δ^β_h func at x0; `func` maps points (q, d) to values (q,)."""
    offsets, weights = _stencil(beta)
    values = np.asarray(func(np.asarray(x0, dtype=float)[None, :] + h * offsets))
    return complex(values @ weights) / h**beta.total


def ridders_derivative(
    func,
    x0,
    beta,
    h: float | None = None,
) -> tuple[complex, float]:
    """Return (D^β func(x0), error estimate).

    Step sizes shrink by a constant ratio; the tableau stops when the
    higher-order estimate is SAFE times worse than the best so far.
    """
    cfg = get_config().differentiation
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    beta = MultiIndex.of(beta)
    if beta.total == 0:
        return complex(np.asarray(func(x0[None, :]))[0]), 0.0

    con2 = cfg.step_ratio**2
    hh = cfg.initial_step if h is None else h
    a: dict[tuple[int, int], complex] = {(0, 0): central_difference(func, x0, beta, hh)}
    err = np.inf
    result = a[0, 0]
    for i in range(1, cfg.tableau_size):
        hh = hh / cfg.step_ratio
        a[0, i] = central_difference(func, x0, beta, hh)
        fac = con2
        for j in range(1, i + 1):
            a[j, i] = (a[j - 1, i] * fac - a[j - 1, i - 1]) / (fac - 1.0)
            fac *= con2
            errt = max(abs(a[j, i] - a[j - 1, i]), abs(a[j, i] - a[j - 1, i - 1]))
            if errt <= err:
                err = errt
                result = a[j, i]
        if abs(a[i, i] - a[i - 1, i - 1]) >= cfg.safe * err:
            break
    return result, float(err)


def richardson_derivative(func, x0, beta, steps=None) -> tuple[complex, float]:
    """Return (D^β func(x0), rounding floor) from a fixed step schedule.

    Central differences at each step are extrapolated to h → 0 in the
    variable h². The floor bounds the cancellation error of the smallest
    step and grows like h^{-[β]}.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    beta = MultiIndex.of(beta)
    if beta.total == 0:
        return complex(np.asarray(func(x0[None, :]))[0]), 0.0
    steps = [float(h) for h in (get_config().differentiation.richardson_steps if steps is None else steps)]
    offsets, weights = _stencil(beta)
    tableau: list[list[complex]] = []
    floor = 0.0
    for i, h in enumerate(steps):
        values = np.asarray(func(x0[None, :] + h * offsets))
        row = [complex(values @ weights) / h**beta.total]
        floor = max(floor, float(np.abs(values) @ np.abs(weights)) / h**beta.total)
        for j in range(1, i + 1):
            ratio = (steps[i - j] / h) ** 2
            row.append(row[j - 1] + (row[j - 1] - tableau[i - 1][j - 1]) / (ratio - 1.0))
        tableau.append(row)
    return tableau[-1][-1], 64.0 * np.finfo(float).eps * floor
