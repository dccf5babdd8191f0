import numpy as np
import pytest

from mexpand import signals
from mexpand.diffops import AveragingScheme, DiffOperator, RadiusProfile, falsified_operator
from mexpand.dilation import power
from mexpand.exceptions import InvalidSpecError
from mexpand.expand import (
    EvaluationGrid,
    ExpansionPlan,
    TruncationPolicy,
    average_sample,
    differential_expansion,
    expansion_residual_norm,
    expected_sample,
    falsified_expansion,
    radius_for_tolerance,
)
from mexpand.kernels import catalog
from mexpand.signals import LinearCombination, TransformedSignal


@pytest.fixture
def identity():
    return DiffOperator.identity(1)


def test_triangle_interpolates_at_lattice_points(triangle, identity, gaussian, dyadic):
    x = np.array([[-5 / 8], [0.0], [7 / 8]])
    result = differential_expansion(triangle, identity, gaussian, dyadic, 3, x)
    np.testing.assert_allclose(result.values, gaussian.eval_value(x), atol=1e-14)
    assert result.trunc.mode == "support_exact"


def test_zero_signal_expands_to_zero(triangle, identity, dyadic):
    grid = EvaluationGrid(T=2.0, n=33)
    result = differential_expansion(triangle, identity, signals.zero(), dyadic, 2, grid.points)
    assert np.all(result.values == 0)


def test_partition_of_unity(triangle, identity, dyadic):
    one = signals.polynomial(coeffs={(0,): 1.0})
    grid = EvaluationGrid(T=2.0, n=101)
    result = differential_expansion(triangle, identity, one, dyadic, 2, grid.points)
    np.testing.assert_allclose(result.values, 1.0, atol=1e-13)


def test_expansion_is_linear_in_the_signal(identity, dyadic):
    kernel = catalog.example4(0.0, 2.0 / 3.0, 0.0)
    f = signals.gaussian(sigma=1.0)
    g = signals.modulated_gaussian(sigma=0.8, omega=0.5)
    combo = LinearCombination([(2.0, f), (3.0, g)])
    x = np.random.default_rng(7).uniform(-3, 3, size=20)
    lhs = differential_expansion(kernel, identity, combo, dyadic, 2, x).values
    rhs = (
        2.0 * differential_expansion(kernel, identity, f, dyadic, 2, x).values
        + 3.0 * differential_expansion(kernel, identity, g, dyadic, 2, x).values
    )
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_level_consistency(quincunx):
    kernel = catalog.triangle(2)
    f = signals.gaussian(dim=2, sigma=1.5)
    L = falsified_operator(2, AveragingScheme.point_mass(0.5), 2)
    x = np.random.default_rng(3).uniform(-1, 1, size=(10, 2))
    direct = differential_expansion(kernel, L, f, quincunx, 2, x).values
    rescaled = TransformedSignal(f, power(quincunx, -2))
    level_zero = differential_expansion(kernel, L, rescaled, quincunx, 0, x @ power(quincunx, 2).T).values
    np.testing.assert_allclose(direct, level_zero, atol=1e-9)


def test_radius_truncation_reproduces_samples(identity, dyadic):
    f = signals.bandlimited_triangle_spectrum(a=0.25)
    x = np.array([0.0, 3.0, -7.0])
    trunc = TruncationPolicy(mode="radius", R=50)
    result = differential_expansion(catalog.sinc(1), identity, f, dyadic, 0, x, trunc)
    np.testing.assert_allclose(result.values, f.eval_value(x), atol=1e-12)
    assert result.trunc.R == 50
    assert result.lattice_size <= 101


def test_automatic_radius(identity, dyadic, gaussian):
    trunc = TruncationPolicy.for_kernel(catalog.sinc(1))
    assert trunc.mode == "radius" and trunc.R is None
    result = differential_expansion(catalog.sinc(1), identity, gaussian, dyadic, 1, np.array([0.1, -0.3]), trunc)
    assert result.trunc.R >= radius_for_tolerance(trunc.tol)[0]
    assert result.tail_estimate == 0.0
    assert not result.warnings


def test_truncation_tail_warning(identity, dyadic):
    f = signals.bandlimited_triangle_spectrum(a=0.25)
    trunc = TruncationPolicy(mode="radius", R=2)
    result = differential_expansion(catalog.sinc(1), identity, f, dyadic, 0, 0.0, trunc)
    assert result.tail_estimate > trunc.tol
    assert result.warnings


def test_support_exact_needs_compact_kernel(identity, dyadic, gaussian):
    with pytest.raises(InvalidSpecError):
        differential_expansion(catalog.sinc(1), identity, gaussian, dyadic, 0, 0.0, TruncationPolicy())


@pytest.mark.parametrize("x", [np.empty((0, 1)), np.array([])])
def test_empty_point_set_is_rejected(triangle, identity, dyadic, gaussian, x):
    with pytest.raises(InvalidSpecError, match="evaluation point set is empty"):
        differential_expansion(triangle, identity, gaussian, dyadic, 2, x)
    with pytest.raises(InvalidSpecError, match="evaluation point set is empty"):
        falsified_expansion(triangle, gaussian, dyadic, 2, x, AveragingScheme.point_mass(0.5))


def test_operator_order_beyond_signal_derivatives(triangle, dyadic, gaussian):
    L = DiffOperator(1, {(0,): 1.0, (8,): 1.0})
    with pytest.raises(InvalidSpecError):
        differential_expansion(triangle, L, gaussian, dyadic, 0, 0.0)


def test_radius_for_tolerance():
    R, achieved = radius_for_tolerance(1e-3)
    assert np.log(R) / R == pytest.approx(1e-3, rel=1e-6)
    assert achieved == 1e-3
    assert radius_for_tolerance(0.5)[0] == 3.0


def test_average_sample_of_polynomials(dyadic, quincunx):
    square = signals.polynomial(coeffs={(2,): 1.0})
    assert average_sample(square, dyadic, 0, 0.0, 0.7) == pytest.approx(0.7**2 / 3.0)
    assert average_sample(square, dyadic, 2, 4.0, 0.5) == pytest.approx(1.0 + 0.125**2 / 3.0)
    linear = signals.polynomial(coeffs={(1,): 2.0, (0,): 1.0})
    assert average_sample(linear, dyadic, 0, 1.5, 0.3) == pytest.approx(4.0)
    radial = signals.polynomial(dim=2, coeffs={(2, 0): 1.0, (0, 2): 1.0})
    assert average_sample(radial, quincunx, 0, [0.3, -0.2], 0.5) == pytest.approx(0.13 + 0.125)


def test_average_sample_needs_positive_radius(dyadic, gaussian):
    with pytest.raises(InvalidSpecError):
        average_sample(gaussian, dyadic, 0, 0.0, 0.0)


def test_expected_sample_of_schemes(dyadic, gaussian):
    point = AveragingScheme.point_mass(0.4)
    assert expected_sample(gaussian, dyadic, 1, 0.5, point) == pytest.approx(average_sample(gaussian, dyadic, 1, 0.5, 0.4))
    mixture = AveragingScheme.mixture([(0.2, 0.3), (0.6, 0.7)], RadiusProfile("linear", 1.0))
    expected = 0.3 * average_sample(gaussian, dyadic, 1, 0.5, 0.2) + 0.7 * average_sample(gaussian, dyadic, 1, 0.5, 0.6)
    assert expected_sample(gaussian, dyadic, 1, 0.5, mixture) == pytest.approx(expected)
    square = signals.polynomial(coeffs={(2,): 1.0})
    uniform = AveragingScheme.uniform(1.0, 2.0, RadiusProfile("linear", 1.0))
    assert expected_sample(square, dyadic, 0, 0.0, uniform) == pytest.approx(7.0 / 9.0)


def test_falsified_expansion_approaches_sampling(triangle, identity, dyadic, gaussian):
    x = np.linspace(-2, 2, 17)
    scheme = AveragingScheme.point_mass(1e-6)
    falsified = falsified_expansion(triangle, gaussian, dyadic, 2, x, scheme).values
    exact = differential_expansion(triangle, identity, gaussian, dyadic, 2, x).values
    np.testing.assert_allclose(falsified, exact, atol=1e-9)


def test_residual_vanishes_for_low_degree_polynomials(triangle, dyadic):
    cubic = signals.polynomial(coeffs={(0,): 1.0, (1,): 1.0, (2,): 1.0, (3,): 1.0})
    grid = EvaluationGrid(T=2.0, n=64)
    scheme = AveragingScheme.point_mass(0.5)
    assert expansion_residual_norm(triangle, cubic, dyadic, 2, scheme, 3, np.inf, grid) <= 1e-10


def test_residual_is_small_for_small_radii(triangle, dyadic, gaussian):
    grid = EvaluationGrid(T=2.0, n=64)
    scheme = AveragingScheme.point_mass(1e-8)
    assert expansion_residual_norm(triangle, gaussian, dyadic, 1, scheme, 3, 2.0, grid) <= 1e-7


def test_evaluation_grid():
    grid = EvaluationGrid(T=1.0, n=5, dim=2)
    assert grid.points.shape == (25, 2)
    assert grid.cell_volume == pytest.approx(0.25)
    assert EvaluationGrid.default(2).n == 128
    assert EvaluationGrid.default(1).n == 1024


def test_plan_validation(triangle, dyadic, identity):
    grid = EvaluationGrid(T=1.0, n=8)
    trunc = TruncationPolicy()
    scheme = AveragingScheme.point_mass(0.5)
    with pytest.raises(InvalidSpecError):
        ExpansionPlan(triangle, dyadic, 0, trunc, grid, operator=identity, scheme=scheme)
    with pytest.raises(InvalidSpecError):
        ExpansionPlan(triangle, dyadic, 0, trunc, grid)
    with pytest.raises(InvalidSpecError):
        ExpansionPlan(catalog.triangle(2), dyadic, 0, trunc, grid, operator=identity)


def test_plan_evaluates_on_its_grid(triangle, dyadic, identity, gaussian):
    grid = EvaluationGrid(T=1.0, n=9)
    plan = ExpansionPlan(triangle, dyadic, 0, TruncationPolicy(), grid, operator=identity)
    result = plan.at_level(3).evaluate(gaussian)
    expected = differential_expansion(triangle, identity, gaussian, dyadic, 3, grid.points).values
    np.testing.assert_array_equal(result.values, expected)
