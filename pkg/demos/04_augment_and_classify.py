"""
Augmenting a few-shot classifier
================================

Ten classes with five training samples each. Fit one curve per class,
sample new pre-shapes along it, and compare k-NN and a linear head with and
without the extra samples.
"""

from geocurve import EvalConfig, FitConfig, evaluate
from geocurve.synth import geodesic_classes

train, test = geodesic_classes(classes=10, per_class=5, dim=32, noise=0.05, seed=0, splits=[5, 200])
print(f"train {len(train)} rows, test {len(test)} rows, d={train.dim}")

seeds = (0, 1, 2)
fit_cfg = FitConfig(epochs=1000)
cache = {}
for clf in ("knn", "linear"):
    base = evaluate(train, test, EvalConfig(method="none", classifier=clf, seeds=seeds))
    aug = evaluate(train, test, EvalConfig(method="faagc", classifier=clf, seeds=seeds, fit=fit_cfg),
                   curve_cache=cache)
    print(f"{clf:6s}  none {100 * base.mean:.1f}% +- {100 * base.std:.1f}   "
          f"faagc {100 * aug.mean:.1f}% +- {100 * aug.std:.1f}")

###############################################################################
# Interpolation baselines use the same harness.

for method in ("mixup", "smote"):
    r = evaluate(train, test, EvalConfig(method=method, seeds=seeds))
    print(f"knn     {method:6s} {100 * r.mean:.1f}%")
