"""Example usage of linfeat"""

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent / "backend"))

import numpy as np

from linfeat import (
    Objective,
    builtin_sinusoidal,
    cv_ridge,
    feature_coefficients,
    nullspace_report,
    pls_closest,
    ridge_closest,
    ridge_fit,
    select,
    synthesize,
)
from linfeat.regression import center_xy

# Smooth low-rank curves on a 2.0..3.5 V grid
ds = synthesize(n=40, p=200, rank=5, noise_std=1e-4, seed=7)

# Synthetic response from a nonlinear compressing feature
feature = builtin_sinusoidal(period=0.06)
y = np.array([feature(row) for row in ds.values])

# Feature coefficients: slope times the gradient at the column mean
fc = feature_coefficients(ds, feature, y)
target = fc.as_coefficient_vector()
print(f"g(x̄) = {fc.anchor_value:.6g}, slope = {fc.slope:.6g}, R² = {fc.r_squared:.4f}")

# Closest points on the ridge and PLS paths
Xc, yc, x_mean, y_mean = center_xy(ds.values, y)
model = ridge_fit(Xc, yc, x_mean=x_mean, y_mean=y_mean)
ridge = ridge_closest(model, target, Objective.COEFFICIENT_DISTANCE)
pls = pls_closest(Xc, yc, target, Objective.COEFFICIENT_DISTANCE, k_max=10, x_mean=x_mean, y_mean=y_mean)
print(f"ridge: lambda* = {ridge.lambda_star:.6g}, distance = {ridge.distance_at_opt:.6g}")
print(f"pls:   k* = {pls.k_star}, distance = {pls.distance_at_opt:.6g}")

# How much of the feature coefficients no linear model fit on X can reach
report = nullspace_report(model, target)
print(f"beta_t1 row space norm {report.rowspace_norm:.6g}, nullspace norm {report.nullspace_norm:.6g}")

# What cross-validation would have picked instead
curve = cv_ridge(ds, y, folds=10, seed=0)
print(f"CV: lambda_min = {select(curve, 'min'):.6g}, lambda_1se = {select(curve, 'one_se'):.6g}")
