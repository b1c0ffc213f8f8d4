"""Case-study runner that orchestrates the feature-coefficient pipeline"""

import contextlib
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .config import RunConfig
from .dataset import (
    FunctionalDataset,
    apply_split,
    load_csv,
    load_split_spec,
    summarize,
    synthesize,
)
from .errors import DataError, NumericError, ValidationError
from .features import CompressingFeature, evaluate, feature_from_config
from .linearization import FeatureCoefficients, feature_coefficients
from .model_selection import CvCurve, cv_pls, cv_ridge, default_lambda_grid, select
from .path_analysis import (
    Objective,
    PathSearchResult,
    RidgeDistance,
    nullspace_report,
    pls_closest,
    ridge_closest,
    ridge_snapshots,
)
from .regression import (
    CoefficientVector,
    RidgePathModel,
    center_xy,
    matrix_rank,
    pls_coefficients,
    pls_fit,
    predict,
    ridge_beta,
    ridge_fit,
)
from .storage import ensure_output_dir, save_report, write_dataframe

logger = logging.getLogger(__name__)

# Output file names, relative to the output directory
COEFFICIENTS_FILE = "coefficients.csv"
DISTANCE_CURVE_FILE = "distance_curve.csv"
PLS_DISTANCE_CURVE_FILE = "pls_distance_curve.csv"
CV_CURVE_FILE = "cv_curve.csv"
PLS_CV_CURVE_FILE = "pls_cv_curve.csv"
REGULARIZATION_PATH_FILE = "regularization_path.csv"
REPORT_FILE = "report.json"

# Relative tolerances of the self-checks recorded in the report
Z_MEAN_TOL = 1e-10
NULLSPACE_TOL = 1e-8


@dataclass
class CaseStudyData:
    """Datasets and responses a run works on"""
    train: FunctionalDataset
    y_train: np.ndarray
    full_shape: Tuple[int, int]
    tests: Dict[str, Tuple[FunctionalDataset, np.ndarray]] = field(default_factory=dict)


@dataclass
class CaseStudyReport:
    """What one case-study run found, as tabulated in report.json"""
    dataset_shape: Tuple[int, int]
    full_dataset_shape: Tuple[int, int]
    feature: str
    feature_params: Dict
    objective: str
    anchor_value: float
    z_mean: float
    slope: float
    r_squared: float
    ridge: Dict[str, Dict]
    pls: Dict[str, Dict]
    nullspace: Dict[str, Dict[str, float]]
    test_rmse: Dict[str, Dict[str, float]]
    checks: Dict[str, object]
    warnings: List[str]
    files: Dict[str, str]

    def as_dict(self) -> Dict:
        return {
            "dataset_shape": list(self.dataset_shape),
            "full_dataset_shape": list(self.full_dataset_shape),
            "feature": self.feature,
            "feature_params": self.feature_params,
            "objective": self.objective,
            "anchor_value": self.anchor_value,
            "z_mean": self.z_mean,
            "slope": self.slope,
            "r_squared": self.r_squared,
            "ridge": self.ridge,
            "pls": self.pls,
            "nullspace": self.nullspace,
            "test_rmse": self.test_rmse,
            "checks": self.checks,
            "warnings": self.warnings,
            "files": self.files,
        }


@contextlib.contextmanager
def stage(name: str):
    """Tag numeric failures with the pipeline stage they happened in"""
    logger.info(f"[CASESTUDY] Stage: {name}")
    try:
        yield
    except NumericError as e:
        raise type(e)(f"stage '{name}' failed: {e}") from e


def load_dataset(config: RunConfig) -> FunctionalDataset:
    source = config.data
    if source.synth is not None:
        s = source.synth
        return synthesize(n=s.n, p=s.p, smoothness=s.smoothness, rank=s.rank,
                          noise_std=s.noise_std, seed=s.seed)
    return load_csv(source.csv.path, layout=source.csv.layout)


def load_response_column(path: str, column, n: int) -> np.ndarray:
    """Response vector from one column of a CSV file with a header row"""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read response file {path}: {e}") from e
    if isinstance(column, int):
        if not 0 <= column < frame.shape[1]:
            raise ValidationError(f"response column index {column} outside 0..{frame.shape[1] - 1} in {path}")
        series = frame.iloc[:, column]
    else:
        if column not in frame.columns:
            raise ValidationError(f"response column {column!r} not found in {path}")
        series = frame[column]
    values = pd.to_numeric(series, errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ValidationError(f"response value in row {bad[0] + 1} of {path} is not a finite number")
    if values.shape[0] != n:
        raise ValidationError(f"response file {path} has {values.shape[0]} rows, dataset has {n} samples")
    return values


def feature_response(ds: FunctionalDataset, feature: CompressingFeature) -> np.ndarray:
    """y_i = g(x_i)"""
    return np.array([evaluate(feature, row) for row in ds.values])


def _zscore_with(train: FunctionalDataset, other: FunctionalDataset) -> FunctionalDataset:
    summary = summarize(train)
    scale = np.where(summary.column_std > 0, summary.column_std, 1.0)
    return FunctionalDataset(values=(other.values - summary.column_mean) / scale,
                             grid=other.grid, sample_ids=other.sample_ids)


def prepare_data(config: RunConfig, feature: CompressingFeature) -> CaseStudyData:
    """Load, split, scale and attach responses"""
    ds = load_dataset(config)
    parts = {"train": ds}
    if config.split is not None:
        spec = load_split_spec(config.split)
        train, test1, test2 = apply_split(ds, spec)
        parts = {"train": train, "test1": test1, "test2": test2}
        outliers = set(spec.outlier_indices)
        index_of = {"train": [i for i in spec.train_indices if i not in outliers],
                    "test1": list(spec.test1_indices), "test2": list(spec.test2_indices)}
    else:
        index_of = {"train": list(range(ds.n))}

    if config.zscore:
        logger.info("[CASESTUDY] z-scoring columns with training statistics")
        train = parts["train"]
        parts = {name: _zscore_with(train, part) for name, part in parts.items()}

    if config.response.mode == "csv_column":
        y_all = load_response_column(config.response.path, config.response.column, ds.n)
        responses = {name: y_all[index_of[name]] for name in parts}
    else:
        responses = {name: feature_response(part, feature) for name, part in parts.items()}

    tests = {name: (parts[name], responses[name]) for name in parts if name != "train" and parts[name].n}
    return CaseStudyData(train=parts["train"], y_train=responses["train"],
                         full_shape=ds.shape, tests=tests)


class CaseStudyRunner:
    """Runs one case study: feature coefficients vs. the ridge and PLS paths"""

    def __init__(self, config: RunConfig):
        """Initialize case-study runner

        Args:
            config: validated run configuration
        """
        self.config = config
        self.objective = Objective(config.objective)
        self.output_dir = config.resolved_output_dir()

    def _distance(self, beta: CoefficientVector, target: CoefficientVector, Xc: np.ndarray) -> float:
        diff = beta.beta - target.beta
        if self.objective is Objective.PREDICTION_DISTANCE:
            fitted = Xc @ diff
            return float(fitted @ fitted)
        return float(diff @ diff)

    def _pls_cap(self, Xc: np.ndarray) -> int:
        """Largest k every CV fold and the full training set can support"""
        n = Xc.shape[0]
        largest_fold = -(-n // self.config.folds)
        return max(1, min(self.config.k_max, matrix_rank(Xc), n - largest_fold - 1))

    def run(self) -> CaseStudyReport:
        """Run the full pipeline and write every output file"""
        config = self.config
        feature = feature_from_config(config.feature.as_mapping())
        logger.info(f"[CASESTUDY] Feature {feature.name}, objective {self.objective.value}")

        data = prepare_data(config, feature)
        train, y = data.train, data.y_train
        logger.info(f"[CASESTUDY] Training data n={train.n}, p={train.p}")

        with stage("feature_coefficients"):
            fc = feature_coefficients(train, feature, y)
            target = fc.as_coefficient_vector()

        with stage("ridge_fit"):
            Xc, yc, x_mean, y_mean = center_xy(train.values, y)
            model = ridge_fit(Xc, yc, x_mean=x_mean, y_mean=y_mean)

        with stage("ridge_closest"):
            ridge_search = ridge_closest(model, target, self.objective,
                                         lambda_range=config.lambda_range,
                                         grid_points=config.grid_points)

        k_cap = self._pls_cap(Xc)
        warnings: List[str] = []
        if k_cap < config.k_max:
            warnings.append(f"k_max reduced from {config.k_max} to {k_cap} (rank / fold size)")

        with stage("pls_closest"):
            pls_search = pls_closest(Xc, yc, target, self.objective, k_max=k_cap,
                                     x_mean=x_mean, y_mean=y_mean)
            warnings.extend(pls_search.warnings)

        with stage("cross_validation"):
            lambda_grid = default_lambda_grid(train, config.cv_grid_points)
            ridge_cv = cv_ridge(train, y, lambda_grid, folds=config.folds,
                                seed=config.seed, workers=config.workers)
            pls_cv = cv_pls(train, y, k_cap, folds=config.folds,
                            seed=config.seed, workers=config.workers)

        lambda_min = select(ridge_cv, "min")
        lambda_1se = select(ridge_cv, "one_se")
        k_min = select(pls_cv, "min")
        k_1se = select(pls_cv, "one_se")

        with stage("selected_models"):
            pls_model = pls_fit(Xc, yc, k_cap,
                                x_mean=x_mean, y_mean=y_mean, truncate=True)
            vectors: Dict[str, CoefficientVector] = {
                "beta_t1": target,
                "beta_ridge_closest": ridge_search.beta_star,
                "beta_ridge_cv_min": ridge_beta(model, lambda_min),
                "beta_ridge_cv_1se": ridge_beta(model, lambda_1se),
                "beta_pls_closest": pls_search.beta_star,
                "beta_pls_cv_min": pls_coefficients(pls_model, min(k_min, pls_model.k)),
                "beta_pls_cv_1se": pls_coefficients(pls_model, min(k_1se, pls_model.k)),
            }

        ridge_distance = RidgeDistance(model, target, self.objective)
        ridge_summary = {
            "closest": self._ridge_entry(model, ridge_search.lambda_star, ridge_search.distance_at_opt),
            "cv_min": self._ridge_entry(model, lambda_min, ridge_distance(lambda_min), ridge_cv),
            "cv_1se": self._ridge_entry(model, lambda_1se, ridge_distance(lambda_1se), ridge_cv),
        }
        pls_summary = {
            "closest": self._pls_entry(pls_search.k_star, pls_search.distance_at_opt),
            "cv_min": self._pls_entry(k_min, self._distance(vectors["beta_pls_cv_min"], target, Xc), pls_cv),
            "cv_1se": self._pls_entry(k_1se, self._distance(vectors["beta_pls_cv_1se"], target, Xc), pls_cv),
        }

        nullspace = {label: nullspace_report(model, vector).as_dict() for label, vector in vectors.items()}
        test_rmse = {
            name: {label: float(np.sqrt(np.mean((predict(vector, ds.values) - y_test) ** 2)))
                   for label, vector in vectors.items()}
            for name, (ds, y_test) in data.tests.items()
        }
        checks = self._checks(feature, fc, ridge_search, nullspace, vectors, lambda_min, lambda_1se, k_min, k_1se)

        files = self._emit(train, fc, vectors, ridge_search, pls_search, ridge_cv, pls_cv, model, pls_model)

        report = CaseStudyReport(
            dataset_shape=train.shape,
            full_dataset_shape=data.full_shape,
            feature=feature.name,
            feature_params={k: v for k, v in config.feature.as_mapping().items() if k != "feature"},
            objective=self.objective.value,
            anchor_value=fc.anchor_value,
            z_mean=fc.z_mean,
            slope=fc.slope,
            r_squared=fc.r_squared,
            ridge=ridge_summary,
            pls=pls_summary,
            nullspace=nullspace,
            test_rmse=test_rmse,
            checks=checks,
            warnings=warnings,
            files=files,
        )
        save_report(self.output_dir / REPORT_FILE, report.as_dict())
        logger.info(f"[CASESTUDY] Done; outputs in {self.output_dir}")
        return report

    def _ridge_entry(self, model: RidgePathModel, lam: float, distance: float,
                     curve: Optional[CvCurve] = None) -> Dict:
        entry = {"lambda": lam, "lambda_over_s1_sq": lam / model.s1 ** 2, "distance": distance}
        if curve is not None:
            i = int(np.flatnonzero(curve.grid == lam)[0])
            entry.update(cv_mean_rmse=float(curve.mean_error[i]), cv_se=float(curve.se[i]))
        return entry

    def _pls_entry(self, k: int, distance: float, curve: Optional[CvCurve] = None) -> Dict:
        entry = {"k": int(k), "distance": distance}
        if curve is not None:
            i = int(k) - 1
            entry.update(cv_mean_rmse=float(curve.mean_error[i]), cv_se=float(curve.se[i]))
        return entry

    def _checks(self, feature: CompressingFeature, fc: FeatureCoefficients, ridge_search: PathSearchResult,
                nullspace: Dict[str, Dict[str, float]], vectors: Dict[str, CoefficientVector],
                lambda_min: float, lambda_1se: float, k_min: int, k_1se: int) -> Dict[str, object]:
        x_mean = fc.x_mean
        denominator = float(np.linalg.norm(fc.beta_t1) * np.linalg.norm(x_mean))
        cosine = float(fc.beta_t1 @ x_mean) / denominator if denominator > 0 else 0.0
        z_rel = abs(fc.z_mean - fc.anchor_value) / max(abs(fc.anchor_value), np.finfo(float).tiny)
        curve_min = min(d for _, d in ridge_search.distance_curve)

        # Every path vector lives in span(V_r); beta_t1 need not
        nullspace_ok = all(
            nullspace[label]["nullspace_norm"]
            <= NULLSPACE_TOL * max(float(np.linalg.norm(vector.beta)), np.finfo(float).tiny)
            for label, vector in vectors.items() if label != "beta_t1"
        )

        checks: Dict[str, object] = {
            "cosine_beta_t1_column_mean": cosine,
            "z_mean_matches_anchor": bool(z_rel <= Z_MEAN_TOL),
            "beta_t1_is_slope_times_gradient": bool(np.array_equal(fc.beta_t1, fc.slope * fc.gradient.values)),
            "distance_curve_min_is_optimum": bool(curve_min == ridge_search.distance_at_opt),
            "one_se_not_less_regularized": bool(lambda_1se >= lambda_min and k_1se <= k_min),
            "path_coefficients_in_row_space": bool(nullspace_ok),
        }
        if feature.name == "sum_of_squares":
            checks["sum_of_squares_parallel_to_mean"] = bool(abs(abs(cosine) - 1.0) <= 1e-12)
        checks["all_passed"] = all(v for v in checks.values() if isinstance(v, bool))
        return checks

    def _emit(self, train: FunctionalDataset, fc: FeatureCoefficients, vectors: Dict[str, CoefficientVector],
              ridge_search: PathSearchResult, pls_search: PathSearchResult,
              ridge_cv: CvCurve, pls_cv: CvCurve, model: RidgePathModel, pls_model) -> Dict[str, str]:
        out = ensure_output_dir(self.output_dir)

        coefficient_columns = ["beta_t1", "beta_ridge_closest", "beta_ridge_cv_min", "beta_ridge_cv_1se",
                               "beta_pls_closest", "beta_pls_cv_1se"]
        coefficients = pd.DataFrame({"grid": train.grid})
        for column in coefficient_columns:
            coefficients[column] = vectors[column].beta
        write_dataframe(coefficients, out / COEFFICIENTS_FILE)

        write_dataframe(pd.DataFrame(ridge_search.distance_curve, columns=["lambda_or_k", "distance"]),
                        out / DISTANCE_CURVE_FILE)
        write_dataframe(pd.DataFrame(pls_search.distance_curve, columns=["lambda_or_k", "distance"]),
                        out / PLS_DISTANCE_CURVE_FILE)
        write_dataframe(pd.DataFrame({"lambda_or_k": ridge_cv.grid, "mean_rmse": ridge_cv.mean_error,
                                      "se": ridge_cv.se}), out / CV_CURVE_FILE)
        write_dataframe(pd.DataFrame({"lambda_or_k": pls_cv.grid, "mean_rmse": pls_cv.mean_error,
                                      "se": pls_cv.se}), out / PLS_CV_CURVE_FILE)

        path = pd.DataFrame({"grid": train.grid, "beta_t1": fc.beta_t1})
        multipliers = (1e4, 1e2, 1.0, 1e-2)
        for multiplier, snapshot in zip(multipliers, ridge_snapshots(model, multipliers)):
            path[f"ridge_lambda_{multiplier:g}_s1_sq"] = snapshot.beta
        for k in range(1, pls_model.k + 1):
            path[f"pls_k_{k}"] = pls_coefficients(pls_model, k).beta
        write_dataframe(path, out / REGULARIZATION_PATH_FILE)

        return {
            "coefficients": COEFFICIENTS_FILE,
            "distance_curve": DISTANCE_CURVE_FILE,
            "pls_distance_curve": PLS_DISTANCE_CURVE_FILE,
            "cv_curve": CV_CURVE_FILE,
            "pls_cv_curve": PLS_CV_CURVE_FILE,
            "regularization_path": REGULARIZATION_PATH_FILE,
            "report": REPORT_FILE,
        }


def run_casestudy(config: RunConfig) -> CaseStudyReport:
    return CaseStudyRunner(config).run()
