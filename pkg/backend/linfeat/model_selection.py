"""k-fold cross-validation over ridge λ grids and PLS component counts"""

import concurrent.futures
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.model_selection import KFold

from .dataset import FunctionalDataset
from .errors import ArgumentError, DataError
from .regression import (
    RidgePathModel,
    center_xy,
    matrix_rank,
    pls_coefficients,
    pls_fit,
    ridge_fit,
)

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 10
# Default CV grid, in units of s₁² of the full training matrix
DEFAULT_CV_LAMBDA_RANGE = (1e-8, 1e4)
DEFAULT_CV_GRID_POINTS = 60


class SelectionRule(Enum):
    MIN = "min"
    ONE_SE = "one_se"


@dataclass(frozen=True)
class CvCurve:
    """Mean held-out RMSE and its standard error per grid value"""
    parameter: str  # "lambda" (larger = more regularized) or "k" (smaller = more regularized)
    grid: np.ndarray
    mean_error: np.ndarray
    se: np.ndarray
    fold_assignment: np.ndarray
    seed: int
    fold_errors: Optional[np.ndarray] = None  # folds × grid

    @property
    def folds(self) -> int:
        return 0 if self.fold_errors is None else self.fold_errors.shape[0]

    def regularization_order(self) -> np.ndarray:
        """Grid indices sorted from most to least regularized"""
        if self.parameter == "lambda":
            return np.argsort(-self.grid, kind="stable")
        return np.argsort(self.grid, kind="stable")


def fold_assignment(n: int, folds: int, seed: int) -> np.ndarray:
    """Fold id of every sample from a shuffled KFold; fold sizes differ by at most 1"""
    if folds < 2:
        raise ArgumentError(f"folds must be at least 2, got {folds}")
    if n < 2 * folds:
        raise ArgumentError(f"{n} samples leave a fold with fewer than 2 samples at {folds} folds")
    if seed < 0:
        raise ArgumentError(f"seed must be non-negative, got {seed}")
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    assignment = np.empty(n, dtype=int)
    for f, (_, held_out) in enumerate(splitter.split(np.zeros((n, 1)))):
        assignment[held_out] = f
    return assignment


def _as_arrays(ds: Union[FunctionalDataset, np.ndarray], y: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    X = ds.values if isinstance(ds, FunctionalDataset) else np.asarray(ds, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ArgumentError(f"data {X.shape} and response {y.shape} do not describe the same samples")
    return X, y


def default_lambda_grid(ds: Union[FunctionalDataset, np.ndarray], points: int = DEFAULT_CV_GRID_POINTS) -> np.ndarray:
    """60 log-spaced values over [1e-8·s₁², 1e4·s₁²] of the centered data"""
    X = ds.values if isinstance(ds, FunctionalDataset) else np.asarray(ds, dtype=float)
    s1 = float(np.linalg.norm(X - X.mean(axis=0), ord=2))
    if s1 == 0:
        raise ArgumentError("data has no variance; cannot build a lambda grid")
    lo, hi = DEFAULT_CV_LAMBDA_RANGE
    return np.logspace(np.log10(lo * s1 ** 2), np.log10(hi * s1 ** 2), points)


def _rmse(residuals: np.ndarray) -> np.ndarray:
    return np.sqrt(np.mean(residuals ** 2, axis=0))


def _run_folds(task: Callable[[int], np.ndarray], folds: int, workers: int) -> np.ndarray:
    """Evaluate every fold; results are stacked in fold order whatever the schedule"""
    if workers <= 1:
        return np.vstack([task(f) for f in range(folds)])
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return np.vstack(list(executor.map(task, range(folds))))


def _assemble(parameter: str, grid: np.ndarray, fold_errors: np.ndarray,
              assignment: np.ndarray, seed: int) -> CvCurve:
    folds = fold_errors.shape[0]
    mean_error = fold_errors.mean(axis=0)
    se = fold_errors.std(axis=0, ddof=1) / np.sqrt(folds)
    for array in (grid, mean_error, se, assignment, fold_errors):
        array.flags.writeable = False
    return CvCurve(
        parameter=parameter,
        grid=grid,
        mean_error=mean_error,
        se=se,
        fold_assignment=assignment,
        seed=seed,
        fold_errors=fold_errors,
    )


def fold_models(
    ds: Union[FunctionalDataset, np.ndarray], y: Sequence[float], folds: int = DEFAULT_FOLDS, seed: int = 0
) -> List[RidgePathModel]:
    """Ridge factorizations of every fold's training part, centered with that part's means"""
    X, y = _as_arrays(ds, y)
    assignment = fold_assignment(X.shape[0], folds, seed)
    models = []
    for f in range(folds):
        train = assignment != f
        Xc, yc, x_mean, y_mean = center_xy(X[train], y[train])
        models.append(ridge_fit(Xc, yc, x_mean=x_mean, y_mean=y_mean))
    return models


def cv_ridge(
    ds: Union[FunctionalDataset, np.ndarray],
    y: Sequence[float],
    lambda_grid: Optional[Sequence[float]] = None,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    workers: int = 1,
) -> CvCurve:
    """k-fold CV of ridge regression over a λ grid

    Every fold is re-centered with its own training means and factored once;
    all λ are then evaluated from that factorization.
    """
    X, y = _as_arrays(ds, y)
    grid = np.array(default_lambda_grid(X) if lambda_grid is None else lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid < 0):
        raise ArgumentError("lambda grid must be a non-empty list of non-negative values")
    assignment = fold_assignment(X.shape[0], folds, seed)

    def score_fold(f: int) -> np.ndarray:
        train, held_out = assignment != f, assignment == f
        Xc, yc, x_mean, y_mean = center_xy(X[train], y[train])
        model = ridge_fit(Xc, yc, x_mean=x_mean, y_mean=y_mean)
        shrink = model.s[:, None] * model.uty[:, None] / (model.s[:, None] ** 2 + grid[None, :])
        betas = model.V @ shrink
        predictions = y_mean + (X[held_out] - x_mean) @ betas
        return _rmse(y[held_out][:, None] - predictions)

    fold_errors = _run_folds(score_fold, folds, workers)
    curve = _assemble("lambda", grid, fold_errors, assignment, seed)
    logger.info(f"[CV] ridge: {folds} folds x {grid.size} lambdas, "
                f"best mean RMSE {curve.mean_error.min():.6g}")
    return curve


def cv_pls(
    ds: Union[FunctionalDataset, np.ndarray],
    y: Sequence[float],
    k_max: int,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    workers: int = 1,
) -> CvCurve:
    """k-fold CV of PLS1 over k = 1..k_max

    k_max is capped at the smallest rank among the centered fold training
    matrices, so every fold fits the whole grid.
    """
    X, y = _as_arrays(ds, y)
    if k_max < 1:
        raise ArgumentError(f"k_max must be at least 1, got {k_max}")
    assignment = fold_assignment(X.shape[0], folds, seed)
    ranks = []
    for f in range(folds):
        train = X[assignment != f]
        ranks.append(matrix_rank(train - train.mean(axis=0)))
    k_cap = min(k_max, min(ranks))
    if k_cap < 1:
        raise DataError("a training fold has rank 0 after centering; no PLS component can be fitted")
    if k_cap < k_max:
        logger.warning(f"[CV] pls: k_max {k_max} capped at {k_cap}, the smallest fold training rank")
    grid = np.arange(1, k_cap + 1)

    def score_fold(f: int) -> np.ndarray:
        train, held_out = assignment != f, assignment == f
        Xc, yc, x_mean, y_mean = center_xy(X[train], y[train])
        model = pls_fit(Xc, yc, k_cap, x_mean=x_mean, y_mean=y_mean)
        betas = np.column_stack([pls_coefficients(model, k).beta for k in grid])
        predictions = y_mean + (X[held_out] - x_mean) @ betas
        return _rmse(y[held_out][:, None] - predictions)

    fold_errors = _run_folds(score_fold, folds, workers)
    curve = _assemble("k", grid, fold_errors, assignment, seed)
    logger.info(f"[CV] pls: {folds} folds x k=1..{k_cap}, best mean RMSE {curve.mean_error.min():.6g}")
    return curve


def select(curve: CvCurve, rule: Union[SelectionRule, str] = SelectionRule.ONE_SE) -> Union[float, int]:
    """Pick a grid value by the minimum-error or one-standard-error rule

    min: smallest mean error, ties to the more regularized value.
    one_se: most regularized value with mean error <= min + se at the minimum.
    """
    rule = SelectionRule(rule)
    if curve.grid.size == 0:
        raise ArgumentError("cannot select from an empty CV curve")
    order = curve.regularization_order()
    errors = curve.mean_error[order]
    best = order[int(np.argmin(errors))]  # first hit is the most regularized among ties
    if rule is SelectionRule.MIN:
        chosen = best
    else:
        threshold = curve.mean_error[best] + curve.se[best]
        chosen = order[int(np.flatnonzero(errors <= threshold)[0])]
    value = curve.grid[chosen]
    return int(value) if curve.parameter == "k" else float(value)
