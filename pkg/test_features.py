"""Tests for compressing features, dual numbers and gradients"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from linfeat import dual
from linfeat.dual import DualScalar
from linfeat.errors import ArgumentError, FeatureEvaluationError
from linfeat.features import (
    CompressingFeature,
    builtin_linear,
    builtin_sinusoidal,
    builtin_sum_of_squares,
    builtin_variance,
    combine,
    evaluate,
    feature_from_config,
    gradient,
    gradient_fd,
    list_features,
)


def max_relative_error(approx, exact):
    return float(np.max(np.abs(approx - exact)) / np.max(np.abs(exact)))


def test_dual_arithmetic():
    x = DualScalar(3.0, 1.0)
    assert (x * x).deriv == 6.0
    assert (2.0 - x).value == -1.0 and (2.0 - x).deriv == -1.0
    quotient = 1.0 / x
    assert quotient.value == pytest.approx(1 / 3)
    assert quotient.deriv == pytest.approx(-1 / 9)
    assert (x ** 3).deriv == 27.0
    assert (x ** 0).value == 1.0 and (x ** 0).deriv == 0.0
    assert (-x).deriv == -1.0


def test_dual_rejects_fractional_power():
    with pytest.raises(TypeError):
        DualScalar(2.0, 1.0) ** 0.5


def test_dual_primitives():
    x = DualScalar(0.5, 1.0)
    assert dual.sin(x).deriv == pytest.approx(math.cos(0.5))
    assert dual.cos(x).deriv == pytest.approx(-math.sin(0.5))
    assert dual.exp(x).deriv == pytest.approx(math.exp(0.5))
    assert dual.power(x, 2).deriv == pytest.approx(1.0)
    assert dual.sin(0.5) == pytest.approx(math.sin(0.5))


def test_sum_of_squares_values(sum_of_squares):
    assert sum_of_squares([1.0, 2.0, 3.0]) == 14.0
    assert sum_of_squares(np.zeros(7)) == 0.0


def test_sum_of_squares_at_fixture_mean(sum_of_squares, fixture_dataset):
    x_mean = fixture_dataset.values.mean(axis=0)
    total = 0.0
    for value in x_mean:
        total += value * value
    assert sum_of_squares(x_mean) == pytest.approx(total, rel=1e-12)


def test_sinusoidal_values(sinusoidal):
    assert sinusoidal([0.0, 0.0]) == 0.0
    assert sinusoidal([0.015]) == pytest.approx(1.0, abs=1e-15)


def test_sinusoidal_at_fixture_mean(sinusoidal, fixture_dataset):
    x_mean = fixture_dataset.values.mean(axis=0)
    direct = sum(math.sin(2 * math.pi / 0.06 * value) for value in x_mean)
    assert sinusoidal(x_mean) == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_sinusoidal_period_must_be_positive():
    with pytest.raises(ArgumentError):
        builtin_sinusoidal(0.0)
    with pytest.raises(ArgumentError):
        builtin_sinusoidal(-1.0)


def test_gradient_sum_of_squares_is_twice_the_point(sum_of_squares, fixture_dataset):
    x_mean = fixture_dataset.values.mean(axis=0)
    grad = gradient(sum_of_squares, x_mean)
    assert np.array_equal(grad.values, 2 * x_mean)
    assert np.array_equal(grad.anchor, x_mean)


def test_gradient_sinusoidal_at_zero(sinusoidal):
    grad = gradient(sinusoidal, np.zeros(5))
    assert_allclose(grad.values, np.full(5, 2 * math.pi / 0.06), rtol=1e-15)


@pytest.mark.parametrize("name", ["sum_of_squares", "sinusoidal", "variance"])
def test_gradient_matches_finite_differences_at_fixture_mean(name, fixture_dataset):
    feature = feature_from_config({"feature": name})
    x_mean = fixture_dataset.values.mean(axis=0)
    exact = gradient(feature, x_mean).values
    approx = gradient_fd(feature, x_mean, rel_step=1e-6).values
    assert max_relative_error(approx, exact) <= 1e-6


def test_gradient_matches_finite_differences_at_random_points(sum_of_squares, sinusoidal):
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        x = rng.standard_normal(200)
        for feature in (sum_of_squares, sinusoidal):
            exact = gradient(feature, x).values
            approx = gradient_fd(feature, x).values
            worst = max(worst, max_relative_error(approx, exact))
    assert worst <= 1e-6


def test_finite_differences_exact_for_linear():
    c = np.array([1.0, -2.0, 0.5, 3.0, 0.25])
    x = np.array([0.1, 0.2, -0.3, 0.4, 0.05])
    assert_allclose(gradient_fd(builtin_linear(c), x).values, c, rtol=0, atol=1e-9)
    assert_allclose(gradient(builtin_linear(c), x).values, c, rtol=0, atol=0)


def test_finite_differences_sum_of_squares(sum_of_squares):
    assert_allclose(gradient_fd(sum_of_squares, [1.0, 1.0]).values, [2.0, 2.0], rtol=0, atol=1e-8)


def test_finite_differences_step_must_be_positive(sum_of_squares):
    with pytest.raises(ArgumentError):
        gradient_fd(sum_of_squares, [1.0], rel_step=0.0)


def test_variance_value_and_gradient():
    x = np.array([1.0, 4.0, 2.0, 7.0])
    feature = builtin_variance()
    assert feature(x) == pytest.approx(np.var(x))
    assert_allclose(gradient(feature, x).values, 2 * (x - x.mean()) / x.size, rtol=1e-12)


def test_combine_is_linear(sum_of_squares, sinusoidal):
    x = np.linspace(-0.05, 0.05, 11)
    combined = combine([(2.0, sum_of_squares), (-3.0, sinusoidal)])
    assert combined(x) == pytest.approx(2 * sum_of_squares(x) - 3 * sinusoidal(x))
    expected = 2 * gradient(sum_of_squares, x).values - 3 * gradient(sinusoidal, x).values
    assert_allclose(gradient(combined, x).values, expected, rtol=1e-12, atol=1e-12)


def test_combine_needs_terms():
    with pytest.raises(ArgumentError):
        combine([])


def test_constant_feature_has_zero_gradient():
    constant = CompressingFeature(name="constant", eval=lambda x: 4.0)
    assert_allclose(gradient(constant, np.ones(3)).values, 0.0)


def test_non_finite_gradient_names_component():
    reciprocal = CompressingFeature(name="reciprocal", eval=lambda x: dual.dsum(1.0 / x))
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(FeatureEvaluationError, match="component"):
            gradient(reciprocal, np.array([1.0, 0.0, 2.0]))


def test_evaluate_rejects_non_finite():
    reciprocal = CompressingFeature(name="reciprocal", eval=lambda x: dual.dsum(1.0 / x))
    with np.errstate(divide="ignore"):
        with pytest.raises(FeatureEvaluationError, match="reciprocal"):
            evaluate(reciprocal, np.array([0.0]))


def test_feature_from_config():
    feature = feature_from_config({"feature": "sinusoidal", "period": 0.06})
    assert feature.name == "sinusoidal"
    assert feature.params == {"period": 0.06}
    assert feature_from_config({"feature": "sum_of_squares"}).name == "sum_of_squares"


def test_feature_from_config_errors():
    with pytest.raises(ArgumentError, match="unknown feature"):
        feature_from_config({"feature": "kurtosis"})
    with pytest.raises(ArgumentError, match="bad parameters"):
        feature_from_config({"feature": "sum_of_squares", "period": 1.0})


def test_list_features():
    assert list_features() == ["linear", "sinusoidal", "sum_of_squares", "variance"]
