"""Prediction intervals and paired significance testing.

Bootstraps residual-based bands around a point forecast, checks their
empirical coverage and width, and runs the signed-rank test to ask
whether one forecast's absolute errors are genuinely smaller than
another's rather than luckily smaller.
"""

import numpy as np

from wavecast.evaluation import bootstrap_bands, picp, pinaw, wilcoxon_signed_rank

rng = np.random.default_rng(5)
n_valid, n_test = 400, 300

truth = 2.0 + 0.6 * np.sin(np.arange(n_test) / 9.0)
good = truth + rng.normal(0, 0.15, n_test)
meh = truth + rng.normal(0, 0.25, n_test)

# Residuals come from a held-out validation split, never from test.
valid_residuals = rng.normal(0, 0.15, n_valid)

bands = bootstrap_bands(valid_residuals, good, confidences=(0.8, 0.95), b=300, seed=1)
print(f"{'level':>6s} {'picp':>7s} {'pinaw':>7s}")
for band in bands:
    print(f"{band.confidence:6.0%} {picp(truth, band):7.3f} {pinaw(truth, band):7.3f}")
inner, outer = bands
nested = bool(np.all(outer.lower <= inner.lower) and np.all(outer.upper >= inner.upper))
print(f"95% band contains 80% band everywhere: {nested}")

print("\nsigned-rank test on absolute errors (negative z favors the second)")
for label, a, b in (
    ("meh vs good", np.abs(truth - meh), np.abs(truth - good)),
    ("good vs meh", np.abs(truth - good), np.abs(truth - meh)),
    ("good vs itself", np.abs(truth - good), np.abs(truth - good)),
):
    r = wilcoxon_signed_rank(a, b)
    print(f"  {label:15s} n {r.n:3d}  W {r.w:8.1f}  z {r.z:7.3f}  p {r.p:.3g}")
