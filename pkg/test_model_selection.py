"""Tests for cross-validation and the selection rules"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from sklearn.model_selection import KFold

from conftest import feature_response
from linfeat.dataset import synthesize
from linfeat.errors import ArgumentError, DataError
from linfeat.model_selection import (
    CvCurve,
    cv_pls,
    cv_ridge,
    default_lambda_grid,
    fold_assignment,
    fold_models,
    select,
)
from linfeat.regression import center_xy, pls_coefficients, pls_fit, predict, ridge_beta


def make_curve(parameter, grid, mean_error, se):
    return CvCurve(
        parameter=parameter,
        grid=np.array(grid),
        mean_error=np.array(mean_error, dtype=float),
        se=np.array(se, dtype=float),
        fold_assignment=np.zeros(0, dtype=int),
        seed=0,
    )


def naive_ridge_cv(X, y, lambdas, assignment):
    """Per-fold ridge refits by augmented least squares, no shared factorization"""
    folds = assignment.max() + 1
    errors = np.empty((folds, len(lambdas)))
    for f in range(folds):
        train, held_out = assignment != f, assignment == f
        x_mean, y_mean = X[train].mean(axis=0), y[train].mean()
        Xc, yc = X[train] - x_mean, y[train] - y_mean
        for j, lam in enumerate(lambdas):
            A = np.vstack([Xc, np.sqrt(lam) * np.eye(X.shape[1])])
            rhs = np.concatenate([yc, np.zeros(X.shape[1])])
            beta = np.linalg.lstsq(A, rhs, rcond=None)[0]
            residuals = y[held_out] - (y_mean + (X[held_out] - x_mean) @ beta)
            errors[f, j] = np.sqrt(np.mean(residuals ** 2))
    return errors.mean(axis=0), errors.std(axis=0, ddof=1) / np.sqrt(folds)


@pytest.fixture(scope="module")
def sinusoidal_curves(fixture_dataset, sinusoidal):
    y = feature_response(fixture_dataset, sinusoidal)
    ridge = cv_ridge(fixture_dataset, y, folds=10, seed=0)
    pls = cv_pls(fixture_dataset, y, k_max=10, folds=10, seed=0)
    return y, ridge, pls


def test_select_hand_computed_lambda():
    curve = make_curve("lambda", [0.1, 1.0, 10.0], [3.0, 1.0, 2.0], [0.5, 0.5, 0.5])
    assert select(curve, "min") == 1.0
    assert select(curve, "one_se") == 1.0

    curve = make_curve("lambda", [0.1, 1.0, 10.0], [1.4, 1.0, 1.2], [0.5, 0.5, 0.5])
    assert select(curve, "min") == 1.0
    assert select(curve, "one_se") == 10.0


def test_select_hand_computed_k():
    curve = make_curve("k", [1, 2, 3], [3.0, 1.0, 0.9], [0.5, 0.5, 0.5])
    assert select(curve, "min") == 3
    assert select(curve, "one_se") == 2
    assert isinstance(select(curve, "one_se"), int)


def test_select_ties_go_to_more_regularized():
    curve = make_curve("lambda", [0.1, 1.0, 10.0], [1.0, 1.0, 2.0], [0.0, 0.0, 0.0])
    assert select(curve, "min") == 1.0
    curve = make_curve("k", [1, 2, 3], [2.0, 1.0, 1.0], [0.0, 0.0, 0.0])
    assert select(curve, "min") == 2


def test_select_unknown_rule():
    curve = make_curve("k", [1], [1.0], [0.0])
    with pytest.raises(ValueError):
        select(curve, "median")


def test_fold_assignment_balanced_and_deterministic():
    assignment = fold_assignment(43, 10, seed=3)
    sizes = np.bincount(assignment, minlength=10)
    assert sizes.max() - sizes.min() <= 1
    assert sizes.sum() == 43
    assert np.array_equal(assignment, fold_assignment(43, 10, seed=3))
    assert not np.array_equal(assignment, fold_assignment(43, 10, seed=4))


def test_fold_assignment_needs_two_samples_per_fold():
    with pytest.raises(ArgumentError):
        fold_assignment(5, 3, seed=0)
    with pytest.raises(ArgumentError):
        fold_assignment(10, 1, seed=0)


def test_fold_assignment_matches_shuffled_kfold():
    assignment = fold_assignment(23, 4, seed=11)
    splits = KFold(n_splits=4, shuffle=True, random_state=11).split(np.zeros((23, 1)))
    for f, (train, held_out) in enumerate(splits):
        assert np.array_equal(np.flatnonzero(assignment == f), np.sort(held_out))
        assert np.array_equal(np.flatnonzero(assignment != f), np.sort(train))


def test_fold_assignment_rejects_negative_seed():
    with pytest.raises(ArgumentError, match="seed"):
        fold_assignment(20, 5, seed=-1)


def test_default_lambda_grid(fixture_dataset):
    grid = default_lambda_grid(fixture_dataset)
    Xc = fixture_dataset.values - fixture_dataset.values.mean(axis=0)
    s1_sq = np.linalg.norm(Xc, ord=2) ** 2
    assert grid.shape == (60,)
    assert_allclose(grid[[0, -1]], [1e-8 * s1_sq, 1e4 * s1_sq], rtol=1e-10)


def test_fold_models_are_centered_per_fold(fixture_dataset):
    y = fixture_dataset.values.sum(axis=1)
    models = fold_models(fixture_dataset, y, folds=5, seed=1)
    assignment = fold_assignment(fixture_dataset.n, 5, seed=1)
    assert len(models) == 5
    for f, model in enumerate(models):
        assert_allclose(model.x_mean, fixture_dataset.values[assignment != f].mean(axis=0))
        assert model.y_mean == pytest.approx(y[assignment != f].mean())


def test_fold_models_ignore_held_out_rows(fixture_dataset):
    X = fixture_dataset.values
    y = X.sum(axis=1)
    assignment = fold_assignment(fixture_dataset.n, 5, seed=2)
    held_out = assignment == 0
    rng = np.random.default_rng(8)
    X_perturbed, y_perturbed = X.copy(), y.copy()
    X_perturbed[held_out] += 100.0 * rng.standard_normal((int(held_out.sum()), X.shape[1]))
    y_perturbed[held_out] -= 50.0

    original = fold_models(X, y, folds=5, seed=2)[0]
    perturbed = fold_models(X_perturbed, y_perturbed, folds=5, seed=2)[0]
    assert_allclose(perturbed.x_mean, original.x_mean, rtol=1e-12, atol=0)
    assert perturbed.y_mean == pytest.approx(original.y_mean, rel=1e-12)
    assert_allclose(ridge_beta(perturbed, 1.0).beta, ridge_beta(original, 1.0).beta, rtol=1e-12, atol=1e-15)


def test_cv_ridge_interpolates_noiseless_row_space_response():
    ds = synthesize(n=40, p=200, rank=5, noise_std=0.0, seed=7)
    beta0 = np.random.default_rng(0).standard_normal(ds.p)
    y = ds.values @ beta0 + 2.0
    s1_sq = np.linalg.norm(ds.values - ds.values.mean(axis=0), ord=2) ** 2
    curve = cv_ridge(ds, y, lambda_grid=[0.0, 1e-8 * s1_sq, 1e-4 * s1_sq, s1_sq], folds=10, seed=0)
    assert curve.mean_error[0] <= 1e-6 * np.sqrt(np.mean(y ** 2))


def test_cv_ridge_deterministic_with_duplicates(fixture_dataset):
    values = np.vstack([fixture_dataset.values, fixture_dataset.values])
    y = values.sum(axis=1) ** 2
    first = cv_ridge(values, y, folds=2, seed=11)
    second = cv_ridge(values, y, folds=2, seed=11)
    assert np.array_equal(first.mean_error, second.mean_error)
    assert np.array_equal(first.se, second.se)
    assert np.array_equal(first.fold_assignment, second.fold_assignment)


def test_cv_ridge_matches_naive_refits(fixture_dataset, sinusoidal):
    y = feature_response(fixture_dataset, sinusoidal)
    lambdas = default_lambda_grid(fixture_dataset, 15)
    curve = cv_ridge(fixture_dataset, y, lambdas, folds=10, seed=0)
    mean_error, se = naive_ridge_cv(fixture_dataset.values, y, lambdas, curve.fold_assignment)
    assert_allclose(curve.mean_error, mean_error, rtol=1e-9)
    assert_allclose(curve.se, se, rtol=1e-9)
    assert curve.folds == 10


def test_cv_ridge_threads_match_serial(fixture_dataset):
    y = fixture_dataset.values.sum(axis=1)
    serial = cv_ridge(fixture_dataset, y, folds=10, seed=2)
    threaded = cv_ridge(fixture_dataset, y, folds=10, seed=2, workers=4)
    assert_allclose(threaded.mean_error, serial.mean_error, rtol=1e-12)
    assert_allclose(threaded.fold_errors, serial.fold_errors, rtol=1e-12)


def test_cv_ridge_rejects_bad_grid(fixture_dataset):
    y = np.zeros(fixture_dataset.n)
    with pytest.raises(ArgumentError):
        cv_ridge(fixture_dataset, y, lambda_grid=[-1.0, 1.0])
    with pytest.raises(ArgumentError):
        cv_ridge(fixture_dataset, y, lambda_grid=[])
    with pytest.raises(ArgumentError):
        cv_ridge(fixture_dataset, np.zeros(3))


def test_cv_ridge_over_regularized_predicts_fold_mean(fixture_dataset, sinusoidal_curves):
    y, ridge, _ = sinusoidal_curves
    assignment = ridge.fold_assignment
    baseline = []
    for f in range(ridge.folds):
        held_out = assignment == f
        baseline.append(np.sqrt(np.mean((y[held_out] - y[~held_out].mean()) ** 2)))
    assert ridge.mean_error[-1] == pytest.approx(np.mean(baseline), rel=0.05)


def test_one_se_is_more_regularized_on_fixture(sinusoidal_curves):
    _, ridge, pls = sinusoidal_curves
    assert select(ridge, "one_se") >= select(ridge, "min")
    assert select(pls, "one_se") <= select(pls, "min")


def test_cv_pls_single_component(fixture_dataset):
    y = fixture_dataset.values.sum(axis=1)
    curve = cv_pls(fixture_dataset, y, k_max=1)
    assert curve.grid.tolist() == [1]
    assert curve.mean_error.shape == (1,)


def test_cv_pls_two_component_response():
    ds = synthesize(n=40, p=200, rank=2, noise_std=1e-4, seed=7)
    Xc, yc, x_mean, y_mean = center_xy(ds.values, ds.values.sum(axis=1) ** 2)
    two_component = pls_coefficients(pls_fit(Xc, yc, 2, x_mean=x_mean, y_mean=y_mean), 2)
    signal = predict(two_component, ds.values)
    noise = 1e-2 * np.std(signal) * np.random.default_rng(5).standard_normal(ds.n)
    curve = cv_pls(ds, signal + noise, k_max=6, folds=10, seed=0)
    assert int(np.argmin(curve.mean_error)) + 1 <= 3


def test_cv_pls_deterministic(fixture_dataset):
    y = fixture_dataset.values.sum(axis=1) ** 2
    first = cv_pls(fixture_dataset, y, k_max=4, seed=9)
    second = cv_pls(fixture_dataset, y, k_max=4, seed=9)
    assert np.array_equal(first.fold_assignment, second.fold_assignment)
    assert np.array_equal(first.mean_error, second.mean_error)


def test_cv_pls_rejects_zero_components(fixture_dataset):
    with pytest.raises(ArgumentError):
        cv_pls(fixture_dataset, np.zeros(fixture_dataset.n), k_max=0)


def test_cv_pls_caps_components_at_smallest_fold_rank():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((12, 50))
    y = rng.standard_normal(12)
    # three folds of 4 leave 8 training rows, rank 7 once centered
    curve = cv_pls(X, y, k_max=10, folds=3, seed=0)
    assert curve.grid.tolist() == list(range(1, 8))
    assert np.all(np.isfinite(curve.mean_error))


def test_cv_pls_constant_data_is_a_data_error():
    X = np.ones((10, 6))
    with pytest.raises(DataError, match="rank 0"):
        cv_pls(X, np.arange(10.0), k_max=3, folds=2)
