"""Linear models on centered high-dimensional data: ridge path and PLS1"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import ArgumentError, DegenerateDeflationError, NumericError

logger = logging.getLogger(__name__)

# NIPALS weight norms below this fraction of the first weight norm end the recursion
DEFLATION_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientVector:
    """β with the intercept that makes ŷ(x) = intercept + xᵀβ"""
    beta: np.ndarray
    intercept: float
    label: str

    @classmethod
    def from_centered(
        cls, beta: np.ndarray, x_mean: Optional[np.ndarray], y_mean: float, label: str
    ) -> "CoefficientVector":
        """Reconstruct the intercept ȳ - x̄ᵀβ of a model fit on centered data"""
        beta = np.array(beta, dtype=float)
        beta.flags.writeable = False
        offset = 0.0 if x_mean is None else float(np.asarray(x_mean) @ beta)
        return cls(beta=beta, intercept=float(y_mean) - offset, label=label)


@dataclass(frozen=True)
class RidgePathModel:
    """Thin SVD Xc = U diag(s) Vᵀ plus Uᵀyc, enough to evaluate β(λ) for any λ"""
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray
    uty: np.ndarray
    x_mean: np.ndarray
    y_mean: float
    rank_tol: float

    @property
    def rank(self) -> int:
        return self.s.shape[0]

    @property
    def p(self) -> int:
        return self.V.shape[0]

    @property
    def s1(self) -> float:
        return float(self.s[0]) if self.rank else 0.0

    def shrinkage(self, lam: float) -> np.ndarray:
        """Coordinates of β(λ) in the V basis: s_i (Uᵀy)_i / (s_i² + λ)"""
        return self.s * self.uty / (self.s ** 2 + lam)


@dataclass(frozen=True)
class PlsModel:
    """PLS1 NIPALS fit with k components"""
    k: int
    W: np.ndarray
    T: np.ndarray
    P: np.ndarray
    q: np.ndarray
    beta: np.ndarray
    x_mean: np.ndarray
    y_mean: float
    requested_k: int

    @property
    def truncated(self) -> bool:
        return self.k < self.requested_k


def center_xy(X: np.ndarray, y: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Column-center X and y; returns (Xc, yc, x̄, ȳ)"""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ArgumentError(f"X {X.shape} and y {y.shape} do not describe the same samples")
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    return X - x_mean, y - y_mean, x_mean, y_mean


def _check_centered(Xc: np.ndarray) -> None:
    scale = float(np.max(np.abs(Xc))) if Xc.size else 0.0
    worst = float(np.max(np.abs(Xc.sum(axis=0)))) if Xc.size else 0.0
    if worst > 1e-8 * Xc.shape[0] * max(scale, 1e-300):
        logger.warning(f"[RIDGE] input columns are not centered (max |column sum| = {worst:.3g})")


def _thin_svd(Xc: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.svd(Xc, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.warning("[RIDGE] gesdd did not converge, retrying with gesvd")
    try:
        return scipy.linalg.svd(Xc, full_matrices=False, lapack_driver="gesvd")
    except np.linalg.LinAlgError as e:
        raise NumericError(f"SVD of the {Xc.shape[0]}x{Xc.shape[1]} training matrix failed: {e}") from e


def ridge_fit(
    Xc: np.ndarray,
    yc: Sequence[float],
    x_mean: Optional[np.ndarray] = None,
    y_mean: float = 0.0,
) -> RidgePathModel:
    """Factor the centered training matrix once for cheap λ sweeps

    Singular values at or below eps·max(n, p)·s₁ are truncated.
    """
    Xc = np.asarray(Xc, dtype=float)
    yc = np.asarray(yc, dtype=float)
    if Xc.ndim != 2 or yc.shape != (Xc.shape[0],):
        raise ArgumentError(f"Xc {Xc.shape} and yc {yc.shape} do not describe the same samples")
    if not (np.all(np.isfinite(Xc)) and np.all(np.isfinite(yc))):
        raise NumericError("ridge_fit received non-finite input")
    _check_centered(Xc)

    n, p = Xc.shape
    U, s, Vt = _thin_svd(Xc)
    rank_tol = np.finfo(float).eps * max(n, p)
    keep = s > rank_tol * s[0] if s.size and s[0] > 0 else np.zeros(s.shape, dtype=bool)
    U, s, V = U[:, keep], s[keep], Vt[keep].T
    uty = U.T @ yc

    for array in (U, s, V, uty):
        array.flags.writeable = False
    x_mean = np.zeros(p) if x_mean is None else np.array(x_mean, dtype=float)
    x_mean.flags.writeable = False

    logger.debug(f"[RIDGE] Factored {n}x{p} matrix, rank {s.shape[0]}, s1={s[0] if s.size else 0.0:.6g}")
    return RidgePathModel(U=U, s=s, V=V, uty=uty, x_mean=x_mean, y_mean=float(y_mean), rank_tol=rank_tol)


def ridge_beta(model: RidgePathModel, lam: float) -> CoefficientVector:
    """β(λ) = V diag(s/(s²+λ)) Uᵀyc; λ = 0 gives the minimum-norm least-squares solution"""
    if not lam >= 0:
        raise ArgumentError(f"lambda must be non-negative, got {lam}")
    beta = model.V @ model.shrinkage(lam)
    return CoefficientVector.from_centered(beta, model.x_mean, model.y_mean, label=f"ridge lambda={lam!r}")


def ridge_fitted(model: RidgePathModel, lam: float) -> np.ndarray:
    """Centered training predictions Xc β(λ)"""
    if not lam >= 0:
        raise ArgumentError(f"lambda must be non-negative, got {lam}")
    return model.U @ (model.s ** 2 * model.uty / (model.s ** 2 + lam))


def matrix_rank(Xc: np.ndarray) -> int:
    """Numerical rank under the same tolerance ridge_fit truncates with"""
    s = scipy.linalg.svdvals(Xc)
    if not s.size or s[0] == 0:
        return 0
    return int(np.sum(s > np.finfo(float).eps * max(Xc.shape) * s[0]))


def pls_fit(
    Xc: np.ndarray,
    yc: Sequence[float],
    k: int,
    x_mean: Optional[np.ndarray] = None,
    y_mean: float = 0.0,
    truncate: bool = False,
) -> PlsModel:
    """PLS1 by NIPALS with X and y deflation

    Args:
        Xc: centered n×p training matrix
        yc: centered response
        k: number of components, 1 <= k <= rank(Xc)
        x_mean, y_mean: training means, used to reconstruct the intercept
        truncate: stop at the last healthy component instead of raising when
            the deflated data degenerates

    Returns:
        PlsModel with beta = W (PᵀW)⁻¹ q
    """
    Xc = np.asarray(Xc, dtype=float)
    yc = np.asarray(yc, dtype=float)
    if Xc.ndim != 2 or yc.shape != (Xc.shape[0],):
        raise ArgumentError(f"Xc {Xc.shape} and yc {yc.shape} do not describe the same samples")
    rank = matrix_rank(Xc)
    if not 1 <= k <= rank:
        raise ArgumentError(f"number of components must be in 1..rank(Xc)={rank}, got {k}")

    n, p = Xc.shape
    Xd = Xc.copy()
    yd = yc.copy()
    weights: List[np.ndarray] = []
    scores: List[np.ndarray] = []
    loadings: List[np.ndarray] = []
    q: List[float] = []
    first_norm = None

    for a in range(k):
        w = Xd.T @ yd
        norm = float(np.linalg.norm(w))
        if first_norm is None:
            first_norm = norm
        if norm <= DEFLATION_TOL * max(first_norm, np.finfo(float).tiny):
            message = f"zero weight norm at component {a + 1} of {k}"
            if truncate and a > 0:
                logger.warning(f"[PLS] {message}; keeping {a} components")
                break
            raise DegenerateDeflationError(message)
        w = w / norm
        t = Xd @ w
        tt = float(t @ t)
        if tt <= np.finfo(float).tiny:
            message = f"zero score vector at component {a + 1} of {k}"
            if truncate and a > 0:
                logger.warning(f"[PLS] {message}; keeping {a} components")
                break
            raise DegenerateDeflationError(message)
        p_load = Xd.T @ t / tt
        q_a = float(yd @ t) / tt
        Xd -= np.outer(t, p_load)
        yd -= q_a * t

        weights.append(w)
        scores.append(t)
        loadings.append(p_load)
        q.append(q_a)

    W = np.column_stack(weights)
    T = np.column_stack(scores)
    P = np.column_stack(loadings)
    q_arr = np.array(q)
    beta = W @ np.linalg.solve(P.T @ W, q_arr)

    x_mean = np.zeros(p) if x_mean is None else np.array(x_mean, dtype=float)
    for array in (W, T, P, q_arr, beta, x_mean):
        array.flags.writeable = False

    logger.debug(f"[PLS] Fitted {W.shape[1]} of {k} components on {n}x{p} data")
    return PlsModel(
        k=W.shape[1], W=W, T=T, P=P, q=q_arr, beta=beta,
        x_mean=x_mean, y_mean=float(y_mean), requested_k=k,
    )


def pls_coefficients(model: PlsModel, k: int) -> CoefficientVector:
    """Coefficients of the leading k components of a fitted model"""
    if not 1 <= k <= model.k:
        raise ArgumentError(f"k must be in 1..{model.k}, got {k}")
    W, P = model.W[:, :k], model.P[:, :k]
    beta = W @ np.linalg.solve(P.T @ W, model.q[:k])
    return CoefficientVector.from_centered(beta, model.x_mean, model.y_mean, label=f"pls k={k}")


def pls_path(model: PlsModel) -> List[CoefficientVector]:
    """Coefficient vectors for k = 1..model.k from one NIPALS run"""
    return [pls_coefficients(model, k) for k in range(1, model.k + 1)]


def predict(cv: CoefficientVector, X: np.ndarray) -> np.ndarray:
    """ŷ_i = intercept + x_iᵀβ"""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != cv.beta.shape[0]:
        raise ArgumentError(f"X has {X.shape[1]} columns, coefficients have {cv.beta.shape[0]}")
    return cv.intercept + X @ cv.beta
