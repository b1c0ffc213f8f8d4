"""First-order Taylor linearization of a compressing feature around the column mean"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .dataset import FunctionalDataset
from .errors import ArgumentError, DegenerateFeatureError, FeatureEvaluationError
from .features import CompressingFeature, GradientVector, evaluate, gradient
from .regression import CoefficientVector

logger = logging.getLogger(__name__)

# var(z) at or below this fraction of max(z²) means the feature is flat over the samples
DEGENERATE_VARIANCE_RATIO = 1e-14


@dataclass(frozen=True)
class FeatureCoefficients:
    """Linearization of g at x̄ regressed onto a response

    beta_t1 = slope · ∇g(x̄); residuals = (y - ȳ) - slope·(z - z̄).
    """
    anchor_value: float
    z: np.ndarray
    z_mean: float
    slope: float
    beta_t1: np.ndarray
    residuals: np.ndarray
    gradient: GradientVector
    y_mean: float
    r_squared: float

    @property
    def x_mean(self) -> np.ndarray:
        return self.gradient.anchor

    def as_coefficient_vector(self) -> CoefficientVector:
        return CoefficientVector.from_centered(
            self.beta_t1, self.x_mean, self.y_mean, label="feature-T1"
        )


def _linearize_at(
    values: np.ndarray, f: CompressingFeature
) -> Tuple[np.ndarray, float, GradientVector]:
    x_mean = values.mean(axis=0)
    try:
        anchor_value = evaluate(f, x_mean)
    except FeatureEvaluationError as e:
        raise FeatureEvaluationError(f"at the column mean: {e}") from e
    grad = gradient(f, x_mean)
    z = anchor_value + (values - x_mean) @ grad.values
    bad = np.flatnonzero(~np.isfinite(z))
    if bad.size:
        raise FeatureEvaluationError(f"linearized feature is not finite for sample {bad[0]}")
    return z, anchor_value, grad


def linearize(ds: FunctionalDataset, f: CompressingFeature) -> Tuple[np.ndarray, float]:
    """z_i = g(x̄) + (x_i - x̄)ᵀ ∇g(x̄)

    Returns:
        (z, g(x̄))
    """
    z, anchor_value, _ = _linearize_at(ds.values, f)
    return z, anchor_value


def fit_slope(z: Sequence[float], y: Sequence[float]) -> Tuple[float, np.ndarray]:
    """Univariate OLS of centered y on centered z

    Returns:
        (m, residuals (y - ȳ) - m(z - z̄))
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    if z.shape != y.shape or z.ndim != 1:
        raise ArgumentError(f"z and y must be vectors of equal length, got {z.shape} and {y.shape}")
    if z.shape[0] < 2:
        raise ArgumentError(f"slope fit needs at least 2 samples, got {z.shape[0]}")

    zc = z - z.mean()
    yc = y - y.mean()
    sxx = float(zc @ zc)
    if sxx / z.shape[0] <= DEGENERATE_VARIANCE_RATIO * float(np.max(z ** 2)):
        raise DegenerateFeatureError(
            "linearized feature is constant over the samples; "
            "the gradient at the column mean carries no signal"
        )
    m = float(zc @ yc) / sxx
    return m, yc - m * zc


def feature_coefficients(
    ds: FunctionalDataset, f: CompressingFeature, y: Sequence[float]
) -> FeatureCoefficients:
    """β_T1 = m ∇g(x̄) for feature f on dataset ds and response y"""
    y = np.asarray(y, dtype=float)
    if y.shape != (ds.n,):
        raise ArgumentError(f"response has shape {y.shape}, expected ({ds.n},)")

    z, anchor_value, grad = _linearize_at(ds.values, f)
    slope, residuals = fit_slope(z, y)
    beta_t1 = slope * grad.values

    yc = y - y.mean()
    ss_tot = float(yc @ yc)
    r_squared = 1.0 - float(residuals @ residuals) / ss_tot if ss_tot > 0 else 1.0

    logger.info(f"[LINEARIZE] {f.name}: g(x̄)={anchor_value:.6g}, slope={slope:.6g}, "
                f"training R²={r_squared:.4f}")
    for array in (z, beta_t1, residuals):
        array.flags.writeable = False
    return FeatureCoefficients(
        anchor_value=anchor_value,
        z=z,
        z_mean=float(z.mean()),
        slope=slope,
        beta_t1=beta_t1,
        residuals=residuals,
        gradient=grad,
        y_mean=float(y.mean()),
        r_squared=r_squared,
    )
