import numpy as np
import pytest

from mexpand import signals
from mexpand.exceptions import CapabilityError, InvalidSpecError
from mexpand.numerics.differentiation import ridders_derivative
from mexpand.numerics.quadrature import composite_gauss_legendre
from mexpand.signals import LinearCombination, TransformedSignal, check_decay


def test_gaussian_is_self_dual(gaussian):
    assert gaussian.eval_value(0.0) == pytest.approx(1.0)
    assert gaussian.eval_ft(0.5) == pytest.approx(np.exp(-np.pi / 4))
    assert gaussian.eval_derivative((2,), 0.0) == pytest.approx(-2.0 * np.pi)


def test_gaussian_width():
    f = signals.gaussian(dim=1, sigma=2.0)
    assert f.eval_ft(0.0) == pytest.approx(2.0)
    assert f.eval_value(2.0) == pytest.approx(np.exp(-np.pi))


@pytest.mark.parametrize(
    "name,params",
    [
        ("gaussian", {"sigma": 0.7}),
        ("modulated_gaussian", {"sigma": 1.0, "omega": 0.8}),
        ("poly_times_gaussian", {"power": 2, "sigma": 1.2}),
        ("bandlimited_triangle_spectrum", {"a": 0.25}),
        ("bandlimited_bump", {"a": 0.25}),
    ],
)
def test_derivatives_match_extrapolated_differences(name, params):
    f = signals.from_spec(name, params)
    x0 = np.array([0.37])
    for r in (1, 2, 3):
        estimate, _ = ridders_derivative(lambda pts: f.eval_value(pts), x0, (r,))
        assert f.eval_derivative((r,), x0) == pytest.approx(estimate, rel=1e-6, abs=1e-7)


def test_band_limited_signal_values():
    tri = signals.bandlimited_triangle_spectrum(a=0.25)
    assert tri.eval_value(2.0) == pytest.approx(1.0 / np.pi**2)
    assert tri.eval_value(0.0) == pytest.approx(0.25)
    assert tri.eval_ft(0.3) == 0.0
    assert tri.spectrum_support.outer_radius == pytest.approx(0.25)
    bump = signals.bandlimited_bump(a=0.25)
    assert bump.eval_value(0.0) == pytest.approx(0.25)
    assert bump.eval_ft(0.125) == pytest.approx(0.5)


@pytest.mark.parametrize(
    "name,params",
    [
        ("gaussian", {"sigma": 0.7}),
        ("modulated_gaussian", {"sigma": 1.0, "omega": 0.8}),
        ("poly_times_gaussian", {"power": 2, "sigma": 1.2}),
        ("poly_times_gaussian", {"power": 1, "sigma": 1.0}),
    ],
)
def test_transform_matches_quadrature_of_values(name, params):
    f = signals.from_spec(name, params)
    xi = np.random.default_rng(11).uniform(-3.0, 3.0, size=200)
    t, w = composite_gauss_legendre(-12.0, 12.0, 400, 12)
    numeric = np.exp(-2j * np.pi * np.outer(xi, t)) @ (w * f.eval_value(t))
    np.testing.assert_allclose(f.eval_ft(xi), numeric, atol=1e-10)


@pytest.mark.parametrize("name", ["bandlimited_triangle_spectrum", "bandlimited_bump"])
def test_band_limited_values_invert_their_spectrum(name):
    f = signals.from_spec(name, {"a": 0.25})
    x = np.random.default_rng(12).uniform(-4.0, 4.0, size=200)
    xi, w = composite_gauss_legendre(-0.25, 0.25, 8, 12)
    numeric = np.exp(2j * np.pi * np.outer(x, xi)) @ (w * f.eval_ft(xi))
    np.testing.assert_allclose(f.eval_value(x), numeric, atol=1e-10)


def test_poly_times_gaussian_transform():
    # FT(t e^{-πt²}) = -iξ e^{-πξ²}
    f = signals.poly_times_gaussian(power=1, sigma=1.0)
    assert f.eval_ft(0.5) == pytest.approx(-0.5j * np.exp(-np.pi / 4))


def test_separable_two_dimensional_signal():
    f = signals.gaussian(dim=2, sigma=1.0)
    assert f.eval_value([1.0, 1.0]) == pytest.approx(np.exp(-2 * np.pi))
    assert f.eval_derivative((1, 1), [0.0, 0.0]) == pytest.approx(0.0)
    assert f.eval_derivative((2, 0), [0.0, 0.0]) == pytest.approx(-2.0 * np.pi)


def test_polynomial_signal():
    f = signals.from_spec("polynomial", {"coeffs": [{"alpha": [2], "value": 3.0}, {"alpha": [0], "value": 1.0}]})
    assert f.eval_value(2.0) == pytest.approx(13.0)
    assert f.eval_derivative((2,), 5.0) == pytest.approx(6.0)
    assert f.eval_derivative((3,), 5.0) == pytest.approx(0.0)
    with pytest.raises(CapabilityError):
        f.eval_ft(0.0)


def test_zero_signal_has_zero_transform():
    f = signals.zero(dim=2)
    assert f.eval_value([0.3, 0.1]) == 0.0
    assert f.eval_ft([0.3, 0.1]) == 0.0


def test_exponential_signal():
    f = signals.exponential(c=[0.5, -0.3])
    assert f.eval_derivative((2, 1), [0.0, 0.0]) == pytest.approx(0.25 * -0.3)
    assert f.eval_value([1.0, 1.0]) == pytest.approx(np.exp(0.2))


def test_derivative_order_limit(gaussian):
    with pytest.raises(CapabilityError):
        gaussian.eval_derivative((7,), 0.0)
    deep = signals.gaussian(dim=1, sigma=1.0, max_order=10)
    assert np.isfinite(deep.eval_derivative((8,), 0.0))


def test_linear_combination(gaussian):
    other = signals.modulated_gaussian(sigma=1.0, omega=0.5)
    combo = LinearCombination([(2.0, gaussian), (-1.0, other)])
    x = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(combo.eval_value(x), 2 * gaussian.eval_value(x) - other.eval_value(x))
    np.testing.assert_allclose(combo.eval_ft(x), 2 * gaussian.eval_ft(x) - other.eval_ft(x))


def test_transformed_signal_chain_rule():
    f = signals.gaussian(dim=2, sigma=1.3)
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    g = TransformedSignal(f, A)
    y = np.array([0.2, -0.1])
    assert g.eval_value(y) == pytest.approx(f.eval_value(A @ y))
    expected = f.eval_derivative((1, 0), A @ y) + f.eval_derivative((0, 1), A @ y)
    assert g.eval_derivative((1, 0), y) == pytest.approx(expected)


def test_transformed_signal_transform():
    f = signals.gaussian(dim=1, sigma=1.0)
    g = TransformedSignal(f, [[2.0]])
    # f(2x) has transform f̂(ξ/2)/2
    assert g.eval_ft(0.6) == pytest.approx(f.eval_ft(0.3) / 2.0)


def test_dimension_mismatches_rejected(gaussian):
    with pytest.raises(InvalidSpecError):
        gaussian.eval_derivative((1, 0), 0.0)
    with pytest.raises(InvalidSpecError):
        TransformedSignal(gaussian, np.identity(2))
    with pytest.raises(InvalidSpecError):
        LinearCombination([(1.0, gaussian), (1.0, signals.gaussian(dim=2))])


def test_unknown_signal_rejected():
    with pytest.raises(InvalidSpecError):
        signals.from_spec("chirp")
    with pytest.raises(InvalidSpecError):
        signals.from_spec("bandlimited_bump", {"a": -1.0})


def test_unexpected_signal_parameter_keeps_its_cause():
    with pytest.raises(InvalidSpecError, match="invalid parameters for signal 'gaussian'") as excinfo:
        signals.from_spec("gaussian", {"sigma": "wide"})
    assert isinstance(excinfo.value.__cause__, TypeError)


def test_decay_check(gaussian):
    assert check_decay(gaussian)
    assert check_decay(signals.bandlimited_bump(a=0.25))
