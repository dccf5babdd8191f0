import numpy as np
import pytest
from scipy.special import erfc

from mexpand import signals
from mexpand.analysis.compat import ball_sample, compatibility_defect, strang_fix_order, strict_compatibility
from mexpand.analysis.convergence import fit_order, predicted_order, running_orders
from mexpand.analysis.norms import lp_error, periodized_lp_norm, synthesis_stability
from mexpand.analysis.tails import (
    TailIntegralSpec,
    ball_moment_check,
    brown_check,
    monte_carlo_ball_moment,
    tail_integral,
)
from mexpand.diffops import DiffOperator, ball_moment
from mexpand.exceptions import InvalidSpecError, LengthMismatchError, PreconditionError
from mexpand.expand import EvaluationGrid, TruncationPolicy
from mexpand.kernels import Box, catalog, make_reciprocal_kernel

ONE_MINUS_LAPLACIAN = DiffOperator(1, {(0,): 1.0, (2,): -1.0})


def test_lp_error():
    assert lp_error([0.0, 0.0], [3.0, 4.0], 2, 1.0) == pytest.approx(5.0)
    assert lp_error([0.0, 0.0], [3.0, 4.0], np.inf, 1.0) == 4.0
    assert lp_error([1.0], [1.0 + 2.0j], 1, 0.5) == pytest.approx(1.0)
    with pytest.raises(LengthMismatchError):
        lp_error([0.0], [0.0, 1.0], 2, 1.0)
    with pytest.raises(InvalidSpecError):
        lp_error([0.0], [1.0], 0.5, 1.0)


def test_periodized_norm_of_triangle(triangle):
    result = periodized_lp_norm(triangle, 2, 4)
    assert result.value == pytest.approx(1.0)
    assert not result.diverged


def test_periodized_norm_of_sinc_diverges():
    result = periodized_lp_norm(catalog.sinc(1), np.inf, 16)
    assert result.diverged


def test_synthesis_stability(triangle):
    report = synthesis_stability(triangle, np.inf, seed=11, trials=5)
    assert report.ratio == pytest.approx(1.0)
    assert report.doubled_ratio == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        synthesis_stability(triangle, 2, seed=None)


@pytest.mark.parametrize(
    "kernel,n_max,expected",
    [
        (catalog.triangle(1), 4, 2),
        (catalog.triangle(1).scaled(2.0), 4, 2),
        (catalog.from_spec("example3"), 5, 3),
        (catalog.example4(0.0, 2.0 / 3.0, 0.0), 6, 4),
    ],
)
def test_strang_fix_order(kernel, n_max, expected):
    assert strang_fix_order(kernel, n_max, 1e-7) == expected


@pytest.mark.parametrize("b", [(0.0, 2.0 / 3.0, 0.0), (0.3, 0.9, -0.2), (1.0j, -0.5, 0.25 + 0.5j)])
def test_example4_strang_fix_order_for_any_coefficients(b):
    assert strang_fix_order(catalog.example4(*b), 6, 1e-7) == 4


def test_strang_fix_order_of_band_limited_kernel():
    assert strang_fix_order(catalog.sinc(1), 5, 1e-7) == 5


def test_strang_fix_order_range(triangle):
    with pytest.raises(InvalidSpecError):
        strang_fix_order(triangle, 9, 1e-7)


def test_compatibility_defect(triangle):
    identity = DiffOperator.identity(1)
    # 1 - sinc²ξ = π²ξ²/3 + O(ξ⁴)
    assert compatibility_defect(triangle, identity, 3) == pytest.approx(2.0 * np.pi**2 / 3.0, rel=1e-6)
    assert compatibility_defect(triangle, identity, 2) <= 1e-8
    assert compatibility_defect(triangle.scaled(2.0), identity, 1) == pytest.approx(1.0)


def test_compatibility_defect_dimension_check(triangle):
    with pytest.raises(InvalidSpecError):
        compatibility_defect(triangle, DiffOperator.identity(2), 2)


def test_strict_compatibility(triangle):
    identity = DiffOperator.identity(1)
    assert strict_compatibility(catalog.sinc(1), identity, 0.4, 1e-9)
    assert not strict_compatibility(triangle, identity, 0.1, 1e-9)
    reciprocal = make_reciprocal_kernel(ONE_MINUS_LAPLACIAN, Box.cube(0.5, 1))
    assert strict_compatibility(reciprocal, ONE_MINUS_LAPLACIAN, 0.4, 1e-9)
    with pytest.raises(InvalidSpecError):
        strict_compatibility(catalog.sinc(1), identity, 0.5, 1e-9)


def test_ball_sample():
    pts = ball_sample(2, 0.3)
    assert np.all(np.linalg.norm(pts, axis=1) < 0.3)
    assert 800 <= len(pts) <= 1300


def test_fit_order_recovers_noisy_rate():
    levels = list(range(1, 9))
    errors = [2.0 ** (-4 * j) * (1 + 0.05 * (-1) ** j) for j in levels]
    order, residual = fit_order(levels, errors, 2.0, window=8)
    assert order == pytest.approx(4.0, abs=0.05)
    assert residual < 0.1


def test_fit_order_preconditions():
    with pytest.raises(PreconditionError):
        fit_order([1, 2], [0.5, 0.25], 2.0)
    with pytest.raises(PreconditionError):
        fit_order([1, 2, 3], [0.5, 0.0, 0.1], 2.0)
    with pytest.raises(InvalidSpecError):
        fit_order([1, 2, 3], [0.5, 0.25, 0.125], 1.0)


def test_running_orders():
    orders = running_orders([1, 2, 4], [0.25, 0.0625, 0.00390625], 2.0)
    assert orders[0] is None
    assert orders[1] == pytest.approx(2.0)
    assert orders[2] == pytest.approx(2.0)
    assert running_orders([1, 2], [0.0, 1.0], 2.0) == [None, None]


@pytest.mark.parametrize(
    "args,expected",
    [
        (("falsified", 4, 3), 4.0),
        (("falsified", 6, 3), 4.0),
        (("falsified_lipschitz", 6, 3, 2.0), 3.5),
        (("differential", 2), 2.0),
        (("strictly_compatible", 0, 2), 3.0),
    ],
)
def test_predicted_order(args, expected):
    rate, source = predicted_order(*args)
    assert rate == expected
    assert source


def test_predicted_order_needs_operator_order():
    with pytest.raises(InvalidSpecError):
        predicted_order("falsified", 4)


def test_tail_integral_of_gaussian(dyadic, gaussian):
    spec = TailIntegralSpec(delta=1e-9, j=0, dilation=dyadic)
    assert tail_integral(gaussian, spec) == pytest.approx(1.0, rel=1e-6)


def test_tail_integral_under_quincunx(quincunx):
    f = signals.gaussian(dim=2, sigma=1.0)
    spec = TailIntegralSpec(delta=0.3, j=1, dilation=quincunx)
    outer = tail_integral(f, spec)
    inner = tail_integral(f, spec, inner=True)
    assert outer == pytest.approx(np.exp(-2.0 * np.pi * 0.3**2), rel=1e-6)
    assert outer + inner == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_tail_integral_decays_at_the_gaussian_rate(dyadic, gaussian, gamma):
    levels = list(range(5))
    delta = 0.2
    scaled = [
        2.0 ** (-j * gamma) * tail_integral(gaussian, TailIntegralSpec(gamma=gamma, delta=delta, j=j, dilation=dyadic))
        for j in levels
    ]
    assert all(later < earlier for earlier, later in zip(scaled, scaled[1:]))
    # closed forms of ∫_{|ξ|≥a} |ξ|^γ e^{-πξ²} for a = δ2^j
    radii = delta * 2.0 ** np.array(levels)
    exact = erfc(np.sqrt(np.pi) * radii) if gamma == 0.0 else np.exp(-np.pi * radii**2) / np.pi
    expected = 2.0 ** (-np.array(levels) * gamma) * exact
    slope, _ = fit_order(levels, scaled, 2.0, window=len(levels))
    predicted, _ = fit_order(levels, expected, 2.0, window=len(levels))
    assert slope == pytest.approx(predicted, abs=0.2)
    assert slope >= gamma


def test_tail_integral_of_band_limited_signal(dyadic):
    f = signals.bandlimited_triangle_spectrum(a=0.25)
    assert tail_integral(f, TailIntegralSpec(delta=0.45, j=0, dilation=dyadic)) == 0.0


def test_tail_integral_preconditions(dyadic, quincunx):
    f = signals.gaussian(dim=1, sigma=1.0)
    f.decay_exponent = 2.0
    with pytest.raises(PreconditionError):
        tail_integral(f, TailIntegralSpec(gamma=2.0, dilation=dyadic))
    with pytest.raises(PreconditionError):
        tail_integral(signals.gaussian(dim=1), TailIntegralSpec(dilation=quincunx))


def test_brown_check_of_zero_signal(dyadic):
    report = brown_check(
        catalog.sinc(1),
        DiffOperator.identity(1),
        signals.zero(),
        dyadic,
        [1, 2, 3],
        grid=EvaluationGrid(T=1.0, n=16),
        N=0,
        trunc=TruncationPolicy(mode="radius", R=8),
    )
    assert report.passed
    assert [row.sup_error for row in report.rows] == [0.0, 0.0, 0.0]
    assert report.bound_slope is None


def test_brown_check_needs_strict_compatibility(triangle, dyadic, gaussian):
    with pytest.raises(PreconditionError):
        brown_check(triangle, DiffOperator.identity(1), gaussian, dyadic, [1, 2, 3])


def test_monte_carlo_ball_moment():
    estimate = monte_carlo_ball_moment((2, 0), 2, 200_000, seed=5)
    assert estimate == pytest.approx(ball_moment((2, 0), 2), rel=1e-2)
    assert monte_carlo_ball_moment((2, 0), 2, 1000, seed=5) == monte_carlo_ball_moment((2, 0), 2, 1000, seed=5)
    with pytest.raises(PreconditionError):
        monte_carlo_ball_moment((2,), 1, 100, seed=None)


def test_ball_moment_check_rows():
    rows = ball_moment_check(1, 4, 10_000, seed=0)
    assert [row["beta"] for row in rows] == [[0], [2], [4]]
    assert rows[0]["rel_error"] == pytest.approx(0.0, abs=1e-12)
