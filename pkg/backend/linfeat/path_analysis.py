"""Closest point on the regression solution path to a target coefficient vector"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ArgumentError
from .regression import (
    CoefficientVector,
    RidgePathModel,
    pls_coefficients,
    pls_fit,
    ridge_beta,
)

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

# Default search range and resolution, in units of s₁²
DEFAULT_LAMBDA_RANGE = (1e-10, 1e8)
DEFAULT_GRID_POINTS = 200
MIN_GRID_POINTS = 16
LOWEST_LAMBDA = 1e-12
# Golden-section stopping width in log λ (relative λ tolerance)
LOG_LAMBDA_TOL = 1e-9


class Objective(Enum):
    """Distance between a path point and the target"""
    COEFFICIENT_DISTANCE = "coefficient_distance"
    PREDICTION_DISTANCE = "prediction_distance"


@dataclass(frozen=True)
class PathSearchResult:
    """Best path point and every distance evaluated on the way"""
    objective: Objective
    parameter: str  # "lambda" or "k"
    optimum: Union[float, int]
    distance_at_opt: float
    distance_curve: List[Tuple[Union[float, int], float]]
    beta_star: CoefficientVector
    warnings: List[str] = field(default_factory=list)

    @property
    def lambda_star(self) -> Optional[float]:
        return float(self.optimum) if self.parameter == "lambda" else None

    @property
    def k_star(self) -> Optional[int]:
        return int(self.optimum) if self.parameter == "k" else None


@dataclass(frozen=True)
class NullspaceReport:
    """Split of ‖β‖ into row-space and nullspace parts of the training matrix"""
    rowspace_norm: float
    nullspace_norm: float
    beta_label: str

    def as_dict(self) -> Dict[str, float]:
        return {"rowspace_norm": self.rowspace_norm, "nullspace_norm": self.nullspace_norm}


class RidgeDistance:
    """d(λ) for a fixed target, evaluated in the SVD basis

    With a = Vᵀβ_target and f(λ) = s·Uᵀy/(s²+λ):
      coefficient distance  ‖f(λ) - a‖² + ‖(I - VVᵀ)β_target‖²
      prediction distance   Σ s_i² (f_i(λ) - a_i)²
    """

    def __init__(self, model: RidgePathModel, target: CoefficientVector, objective: Objective):
        if target.beta.shape != (model.p,):
            raise ArgumentError(f"target has {target.beta.shape[0]} coefficients, model has {model.p}")
        self.model = model
        self.objective = Objective(objective)
        self.a = model.V.T @ target.beta
        residual = target.beta - model.V @ self.a
        self.null_sq = float(residual @ residual)

    def __call__(self, lam: float) -> float:
        diff = self.model.shrinkage(lam) - self.a
        if self.objective is Objective.PREDICTION_DISTANCE:
            return float(np.sum((self.model.s * diff) ** 2))
        return float(diff @ diff) + self.null_sq


def _golden_section(f, a: float, b: float, tol: float, record) -> None:
    """Golden-section search on [a, b]; every evaluation goes through record"""
    h = b - a
    if h <= tol:
        return
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = record(c, f(c))
    yd = record(d, f(d))
    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = record(c, f(c))
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = record(d, f(d))


def default_lambda_range(model: RidgePathModel) -> Tuple[float, float]:
    s1_sq = model.s1 ** 2
    return DEFAULT_LAMBDA_RANGE[0] * s1_sq, DEFAULT_LAMBDA_RANGE[1] * s1_sq


def ridge_closest(
    model: RidgePathModel,
    target: CoefficientVector,
    objective: Union[Objective, str] = Objective.COEFFICIENT_DISTANCE,
    lambda_range: Optional[Tuple[float, float]] = None,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> PathSearchResult:
    """λ minimizing the distance between β(λ) and the target

    A log-spaced grid over [max(lo, 1e-12·s₁²), hi] locates the basin, then
    golden-section search in log λ refines between the neighbours of the best
    grid point. Ties go to the smaller λ.
    """
    objective = Objective(objective)
    if model.rank == 0:
        raise ArgumentError("training matrix has rank 0; the ridge path is the zero vector")
    lo, hi = lambda_range if lambda_range is not None else default_lambda_range(model)
    if not (0 <= lo < hi):
        raise ArgumentError(f"lambda range must satisfy 0 <= lo < hi, got [{lo}, {hi}]")
    if grid_points < MIN_GRID_POINTS:
        raise ArgumentError(f"grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}")
    lo = max(lo, LOWEST_LAMBDA * model.s1 ** 2)
    if not lo < hi:
        raise ArgumentError(f"lambda range [{lo}, {hi}] is empty after clipping to 1e-12·s1²")

    distance = RidgeDistance(model, target, objective)
    evaluated: Dict[float, float] = {}

    def record(log_lam: float, value: float) -> float:
        evaluated[math.exp(log_lam)] = value
        return value

    def d_log(log_lam: float) -> float:
        return distance(math.exp(log_lam))

    log_grid = np.linspace(math.log(lo), math.log(hi), grid_points)
    # Use the exact endpoints rather than exp(log(.)) round trips
    lambdas = np.exp(log_grid)
    lambdas[0], lambdas[-1] = lo, hi
    grid_values = np.array([distance(lam) for lam in lambdas])
    for lam, value in zip(lambdas, grid_values):
        evaluated[float(lam)] = float(value)

    best = int(np.argmin(grid_values))
    left = log_grid[max(best - 1, 0)]
    right = log_grid[min(best + 1, grid_points - 1)]
    _golden_section(d_log, float(left), float(right), LOG_LAMBDA_TOL, record)

    curve = sorted(evaluated.items())
    lambda_star, distance_at_opt = min(curve, key=lambda item: (item[1], item[0]))
    logger.info(f"[PATH] ridge {objective.value}: lambda*={lambda_star:.6g} "
                f"({lambda_star / model.s1 ** 2:.3g}·s1²), d={distance_at_opt:.6g}, "
                f"{len(curve)} evaluations")
    return PathSearchResult(
        objective=objective,
        parameter="lambda",
        optimum=lambda_star,
        distance_at_opt=distance_at_opt,
        distance_curve=curve,
        beta_star=ridge_beta(model, lambda_star),
    )


def _pls_distance(beta: np.ndarray, target: np.ndarray, Xc: np.ndarray, objective: Objective) -> float:
    diff = beta - target
    if objective is Objective.PREDICTION_DISTANCE:
        fitted = Xc @ diff
        return float(fitted @ fitted)
    return float(diff @ diff)


def pls_closest(
    Xc: np.ndarray,
    yc: Sequence[float],
    target: CoefficientVector,
    objective: Union[Objective, str] = Objective.COEFFICIENT_DISTANCE,
    k_max: int = 10,
    x_mean: Optional[np.ndarray] = None,
    y_mean: float = 0.0,
) -> PathSearchResult:
    """Component count k in 1..k_max minimizing the distance to the target

    Ties go to the smaller k. If the deflation degenerates before k_max the
    curve is truncated and a warning is attached to the result.
    """
    objective = Objective(objective)
    Xc = np.asarray(Xc, dtype=float)
    if target.beta.shape != (Xc.shape[1],):
        raise ArgumentError(f"target has {target.beta.shape[0]} coefficients, data has {Xc.shape[1]}")
    if k_max < 1:
        raise ArgumentError(f"k_max must be at least 1, got {k_max}")

    model = pls_fit(Xc, yc, k_max, x_mean=x_mean, y_mean=y_mean, truncate=True)
    warnings: List[str] = []
    if model.truncated:
        warnings.append(f"degenerate deflation: curve truncated at k={model.k} of {k_max}")

    curve: List[Tuple[int, float]] = []
    for k in range(1, model.k + 1):
        beta = pls_coefficients(model, k).beta
        curve.append((k, _pls_distance(beta, target.beta, Xc, objective)))

    k_star, distance_at_opt = min(curve, key=lambda item: (item[1], item[0]))
    logger.info(f"[PATH] pls {objective.value}: k*={k_star}, d={distance_at_opt:.6g}")
    return PathSearchResult(
        objective=objective,
        parameter="k",
        optimum=k_star,
        distance_at_opt=distance_at_opt,
        distance_curve=curve,
        beta_star=pls_coefficients(model, k_star),
        warnings=warnings,
    )


def nullspace_report(model: RidgePathModel, beta: CoefficientVector) -> NullspaceReport:
    """Project β onto span(V_r) and its orthogonal complement"""
    if beta.beta.shape != (model.p,):
        raise ArgumentError(f"coefficients have length {beta.beta.shape[0]}, model has {model.p}")
    coordinates = model.V.T @ beta.beta
    rowspace = model.V @ coordinates
    nullspace = beta.beta - rowspace
    return NullspaceReport(
        rowspace_norm=float(np.linalg.norm(rowspace)),
        nullspace_norm=float(np.linalg.norm(nullspace)),
        beta_label=beta.label,
    )


def ridge_snapshots(model: RidgePathModel, multipliers: Sequence[float] = (1e4, 1e2, 1.0, 1e-2)) -> List[CoefficientVector]:
    """Ridge coefficients at λ = multiplier·s₁², from strong to weak regularization"""
    return [ridge_beta(model, m * model.s1 ** 2) for m in multipliers]
