"""Compressing features g: R^p -> R and their gradients"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from . import dual
from .dual import DualScalar
from .errors import ArgumentError, FeatureEvaluationError

logger = logging.getLogger(__name__)

DEFAULT_PERIOD = 0.06


@dataclass(frozen=True)
class CompressingFeature:
    """A scalar-valued map over a curve, written over the generic scalar

    eval receives either a float array or a DualScalar array and must build
    its result from +, -, *, /, integer powers and the primitives in
    linfeat.dual.
    """
    name: str
    eval: Callable
    params: Dict[str, float] = field(default_factory=dict)

    def __call__(self, x) -> float:
        return float(self.eval(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class GradientVector:
    """∇g evaluated at an anchor point"""
    values: np.ndarray
    anchor: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.anchor.shape:
            raise ArgumentError(
                f"gradient length {self.values.shape} does not match anchor {self.anchor.shape}"
            )


def builtin_sum_of_squares() -> CompressingFeature:
    """g(x) = Σ x_j²"""
    return CompressingFeature(name="sum_of_squares", eval=lambda x: dual.dsum(x ** 2))


def builtin_sinusoidal(period: float = DEFAULT_PERIOD) -> CompressingFeature:
    """g(x) = Σ sin(2π/period · x_j)"""
    if not period > 0:
        raise ArgumentError(f"period must be positive, got {period}")
    frequency = dual.TWO_PI / period
    return CompressingFeature(
        name="sinusoidal",
        eval=lambda x: dual.dsum(dual.sin(x * frequency)),
        params={"period": float(period)},
    )


def builtin_variance() -> CompressingFeature:
    """Population variance of the curve values"""
    def variance(x):
        p = len(x.value) if isinstance(x, DualScalar) else len(x)
        mean = dual.dsum(x) / p
        return dual.dsum((x - mean) ** 2) / p

    return CompressingFeature(name="variance", eval=variance)


def builtin_linear(coefficients: Sequence[float]) -> CompressingFeature:
    """g(x) = cᵀx"""
    c = np.array(coefficients, dtype=float)
    c.flags.writeable = False
    return CompressingFeature(name="linear", eval=lambda x: dual.dsum(x * c))


def combine(terms: Sequence[Tuple[float, CompressingFeature]]) -> CompressingFeature:
    """Σ weight_k · g_k"""
    terms = [(float(w), f) for w, f in terms]
    if not terms:
        raise ArgumentError("combine needs at least one term")

    def combined(x):
        total = 0.0
        for weight, feature in terms:
            total = total + weight * feature.eval(x)
        return total

    name = " + ".join(f"{w!r}*{f.name}" for w, f in terms)
    return CompressingFeature(name=name, eval=combined)


# Registry used by the CLI config: name -> factory taking keyword params
FEATURES: Dict[str, Callable[..., CompressingFeature]] = {
    "sum_of_squares": builtin_sum_of_squares,
    "sinusoidal": builtin_sinusoidal,
    "variance": builtin_variance,
    "linear": builtin_linear,
}


def feature_from_config(config: Mapping) -> CompressingFeature:
    """Build a feature from {"feature": name, **params}"""
    params = dict(config)
    name = params.pop("feature", None)
    if name not in FEATURES:
        raise ArgumentError(f"unknown feature {name!r}; choose one of {sorted(FEATURES)}")
    try:
        return FEATURES[name](**params)
    except TypeError as e:
        raise ArgumentError(f"bad parameters for feature {name!r}: {e}") from e


def evaluate(f: CompressingFeature, x: np.ndarray) -> float:
    """g(x) with a finiteness check"""
    value = f(x)
    if not np.isfinite(value):
        raise FeatureEvaluationError(f"feature {f.name} is not finite at the given point ({value!r})")
    return value


def gradient(f: CompressingFeature, x: Sequence[float]) -> GradientVector:
    """Exact gradient by forward mode, one seeded pass per component"""
    x = np.array(x, dtype=float)
    values = np.empty_like(x)
    for j in range(x.shape[0]):
        out = f.eval(dual.seeded(x, j))
        if not isinstance(out, DualScalar):
            # Feature ignores its input; derivative is zero
            out = DualScalar(float(out), 0.0)
        if not (np.isfinite(out.value) and np.isfinite(out.deriv)):
            raise FeatureEvaluationError(
                f"feature {f.name} produced a non-finite result while differentiating "
                f"component {j} (value={out.value!r}, derivative={out.deriv!r})"
            )
        values[j] = out.deriv
    x.flags.writeable = False
    values.flags.writeable = False
    return GradientVector(values=values, anchor=x)


def gradient_fd(f: CompressingFeature, x: Sequence[float], rel_step: float = 1e-6) -> GradientVector:
    """Central differences with step h_j = rel_step·(1+|x_j|)"""
    if not rel_step > 0:
        raise ArgumentError(f"rel_step must be positive, got {rel_step}")
    x = np.array(x, dtype=float)
    values = np.empty_like(x)
    for j in range(x.shape[0]):
        h = rel_step * (1.0 + abs(x[j]))
        forward = x.copy()
        backward = x.copy()
        forward[j] += h
        backward[j] -= h
        # The realized step can differ from h by rounding
        values[j] = (evaluate(f, forward) - evaluate(f, backward)) / (forward[j] - backward[j])
    x.flags.writeable = False
    values.flags.writeable = False
    return GradientVector(values=values, anchor=x)


def list_features() -> List[str]:
    return sorted(FEATURES)
