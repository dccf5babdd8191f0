import numpy as np
import pytest

from mexpand.exceptions import AccuracyError, CapabilityError
from mexpand.numerics.differentiation import richardson_derivative, ridders_derivative
from mexpand.numerics.points import as_points, restore, sinc
from mexpand.numerics.quadrature import adaptive_ball_average, ball_rule, composite_gauss_legendre, tensor_weights


def test_composite_rule_integrates_polynomials():
    x, w = composite_gauss_legendre(-1.0, 3.0, 4, 6)
    assert np.sum(w) == pytest.approx(4.0)
    assert np.sum(w * x**5) == pytest.approx((3.0**6 - 1.0) / 6.0)


def test_tensor_weights_integrate_separable_functions():
    x, wx = composite_gauss_legendre(0.0, 1.0, 2, 4)
    y, wy = composite_gauss_legendre(-1.0, 1.0, 3, 4)
    W = tensor_weights([wx, wy])
    assert W.shape == (len(x), len(y))
    # ∫₀¹∫₋₁¹ x²y⁴ = 1/3 · 2/5
    assert np.sum(W * np.outer(x**2, y**4)) == pytest.approx(2.0 / 15.0)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_ball_rule_weights_and_second_moment(dim):
    nodes, weights = ball_rule(dim, 8)
    assert np.sum(weights) == pytest.approx(1.0)
    assert np.all(np.linalg.norm(nodes, axis=1) <= 1.0 + 1e-12)
    # mean of |t|² over the unit ball is d/(d+2)
    assert weights @ np.sum(nodes**2, axis=1) == pytest.approx(dim / (dim + 2.0))


def test_ball_rule_dimension_limit():
    with pytest.raises(CapabilityError):
        ball_rule(4, 8)


def test_adaptive_ball_average():
    value = adaptive_ball_average(lambda nodes: np.cos(nodes[:, 0])[None, :], 1, 1e-12)
    assert value[0] == pytest.approx(np.sin(1.0))


def test_adaptive_ball_average_gives_up():
    rough = lambda nodes: np.sign(nodes[:, 0] - 0.123)[None, :]
    with pytest.raises(AccuracyError):
        adaptive_ball_average(rough, 1, 1e-14, max_nodes=32)


def test_ridders_derivatives_of_exponential():
    func = lambda pts: np.exp(pts[:, 0] + 2.0 * pts[:, 1])
    x0 = np.array([0.1, -0.2])
    value, err = ridders_derivative(func, x0, (1, 2))
    assert value == pytest.approx(4.0 * np.exp(-0.3), rel=1e-8)
    assert err < 1e-6


def test_ridders_zero_order_is_plain_value():
    value, err = ridders_derivative(lambda pts: pts[:, 0] ** 2, [3.0], (0,))
    assert value == 9.0
    assert err == 0.0


def test_points_normalization():
    pts, batch = as_points(0.5, 1)
    assert pts.shape == (1, 1) and batch == ()
    pts, batch = as_points(np.zeros(7), 1)
    assert pts.shape == (7, 1) and batch == (7,)
    pts, batch = as_points(np.zeros((3, 4, 2)), 2)
    assert pts.shape == (12, 2) and batch == (3, 4)
    assert restore(np.arange(12), (3, 4)).shape == (3, 4)
    assert restore(np.array([2.0]), ()) == 2.0


def test_sinc_series_branch():
    t = np.array([0.0, 1e-6, 0.5, 1.0])
    np.testing.assert_allclose(sinc(t), np.sinc(t), atol=1e-15)


def test_richardson_derivative_on_fixed_schedule():
    value, floor = richardson_derivative(lambda p: np.sin(3.0 * p[:, 0]), [0.4], (3,))
    assert value == pytest.approx(-27.0 * np.cos(1.2), rel=1e-6)
    assert 0.0 < floor < 1e-4
    mixed, _ = richardson_derivative(lambda p: np.exp(p[:, 0] * p[:, 1]), [0.5, 1.0], (1, 1))
    # ∂²/∂x∂y e^{xy} = (1 + xy) e^{xy}
    assert mixed == pytest.approx(1.5 * np.exp(0.5), rel=1e-7)
