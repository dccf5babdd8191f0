"""Empirical convergence orders and their theoretical predictions."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, field_serializer

from mexpand.analysis.norms import lp_error
from mexpand.config import get_config
from mexpand.exceptions import InvalidSpecError, PreconditionError
from mexpand.expand import ExpansionPlan
from mexpand.signals import Signal
from mexpand.utils import execute_time_measure

Regime = Literal["differential", "falsified", "falsified_lipschitz", "strictly_compatible"]


class ConvergenceReport(BaseModel):
    levels: list[int]
    errors: list[float]
    p: float
    base: float
    window: int
    fitted_order: float | None = None
    fit_residual: float | None = None
    predicted_order: float | None = None
    predicted_source: str | None = None
    running_orders: list[float | None] = Field(default_factory=list)
    bounds: list[float | None] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)

    @field_serializer("p")
    def _serialize_p(self, p: float):
        return "inf" if np.isinf(p) else p

    def rows(self) -> list[dict]:
        """Per-level rows with the fixed columns j, error, bound, order_running."""
        bounds = self.bounds or [None] * len(self.levels)
        running = self.running_orders or [None] * len(self.levels)
        return [
            {"j": j, "error": e, "bound": b, "order_running": r}
            for j, e, b, r in zip(self.levels, self.errors, bounds, running)
        ]


def _window(levels: Sequence[int], errors: Sequence[float], window: int) -> tuple[np.ndarray, np.ndarray]:
    if len(levels) != len(errors):
        raise InvalidSpecError(f"{len(levels)} levels but {len(errors)} errors")
    js = np.asarray(levels[-window:], dtype=float)
    es = np.asarray(errors[-window:], dtype=float)
    if len(js) < 3:
        raise PreconditionError("need ≥ 3 levels to fit an order")
    if np.any(~(es > 0)):
        raise PreconditionError("errors must be positive to fit an order")
    return js, es


def fit_order(levels: Sequence[int], errors: Sequence[float], base: float, window: int | None = None) -> tuple[float, float]:
    """Least-squares slope of -log(error)/log(base) against j over the last `window` levels."""
    if not base > 1:
        raise InvalidSpecError(f"base must exceed 1, got {base}")
    window = get_config().analysis.fit_window if window is None else window
    js, es = _window(levels, errors, window)
    y = -np.log(es) / np.log(base)
    slope, intercept = np.polyfit(js, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * js + intercept)) ** 2)))
    return float(slope), residual


def running_orders(levels: Sequence[int], errors: Sequence[float], base: float) -> list[float | None]:
    """Two-level order estimates, None at the first level or where an error vanishes."""
    out: list[float | None] = [None]
    for (j0, e0), (j1, e1) in zip(zip(levels, errors), zip(levels[1:], errors[1:])):
        if e0 > 0 and e1 > 0:
            out.append(float(np.log(e0 / e1) / np.log(base) / (j1 - j0)))
        else:
            out.append(None)
    return out


def predicted_order(
    regime: Regime,
    n: int,
    N: int | None = None,
    p: float = np.inf,
    d: int = 1,
) -> tuple[float, str]:
    """Theoretical rate for a kernel of Strang-Fix order n and its source clause."""
    if regime == "differential":
        return float(n), "differential expansion, Strang-Fix order n"
    if N is None:
        raise InvalidSpecError(f"regime '{regime}' needs the operator order N")
    if regime == "falsified":
        if n > N + 1:
            return float(N + 1), "falsified expansion, n > N+1"
        return float(n), "falsified expansion, n ≤ N+1"
    if regime == "falsified_lipschitz":
        if d != 1:
            raise InvalidSpecError("the Lipschitz regime is one-dimensional")
        rate = N + (0.0 if np.isinf(p) else 1.0 / p)
        if n > rate:
            return float(rate), "falsified expansion, Lipschitz N+1/p"
        return float(n), "falsified expansion, n ≤ N+1/p"
    if regime == "strictly_compatible":
        return float(N + 1), "strictly compatible class B kernel, N+1 against theta"
    raise InvalidSpecError(f"unknown regime '{regime}'")


@execute_time_measure("measure_convergence")
def measure_convergence(
    plan: ExpansionPlan,
    f: Signal,
    levels: Sequence[int],
    p: float,
    base: float | None = None,
    predicted: tuple[float, str] | None = None,
    window: int | None = None,
) -> ConvergenceReport:
    """Expand f at each level on the plan's grid and fit the error decay."""
    window = get_config().analysis.fit_window if window is None else window
    base = plan.dilation.lam if base is None else base
    grid = plan.grid
    exact = np.asarray(f.eval_value(grid.points)).reshape(-1)
    errors: list[float] = []
    warnings: list[str] = []
    for j in levels:
        result = plan.at_level(j).evaluate(f)
        errors.append(lp_error(exact, result.values, p, grid.cell_volume))
        warnings.extend(result.warnings)
        logger.info(f"level {j}: error {errors[-1]:.6e}")

    report = ConvergenceReport(
        levels=list(levels),
        errors=errors,
        p=p,
        base=base,
        window=window,
        running_orders=running_orders(levels, errors, base),
        warnings=warnings,
    )
    if predicted is not None:
        rate, source = predicted
        report.predicted_order, report.predicted_source = rate, source
        report.bounds = [errors[0] * base ** (-rate * (j - levels[0])) for j in levels]
    try:
        report.fitted_order, report.fit_residual = fit_order(levels, errors, base, window)
    except PreconditionError as e:
        logger.warning(f"order not fitted: {e}")
        report.warnings.append(str(e))
    return report
