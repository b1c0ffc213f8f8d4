"""linfeat: feature coefficients of compressing features vs. ridge and PLS paths"""

from .dataset import FunctionalDataset, SplitSpec, load_csv, synthesize, apply_split
from .features import CompressingFeature, gradient, builtin_sum_of_squares, builtin_sinusoidal
from .linearization import FeatureCoefficients, feature_coefficients
from .regression import CoefficientVector, ridge_fit, ridge_beta, pls_fit, pls_coefficients
from .path_analysis import Objective, ridge_closest, pls_closest, nullspace_report
from .model_selection import cv_ridge, cv_pls, select
from .runner import CaseStudyRunner, run_casestudy

__version__ = "0.1.0"
__all__ = [
    "FunctionalDataset", "SplitSpec", "load_csv", "synthesize", "apply_split",
    "CompressingFeature", "gradient", "builtin_sum_of_squares", "builtin_sinusoidal",
    "FeatureCoefficients", "feature_coefficients",
    "CoefficientVector", "ridge_fit", "ridge_beta", "pls_fit", "pls_coefficients",
    "Objective", "ridge_closest", "pls_closest", "nullspace_report",
    "cv_ridge", "cv_pls", "select",
    "CaseStudyRunner", "run_casestudy",
]
