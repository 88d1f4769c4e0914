"""
Fitting one class curve
=======================

Given a handful of samples from one class, learn two endpoint vectors and a
sampling position per sample so that the geodesic between the endpoints
passes through all of them. The loss is the residual of cosines plus a
term pulling the positions toward a uniform spread.
"""

import numpy as np

from geocurve import FitConfig, fit
from geocurve.geodesic import interp_batch
from geocurve.preshape import project_rows
from geocurve.synth import geodesic_classes

data = geodesic_classes(classes=2, per_class=12, dim=32, noise=0.0, seed=3)
X = data.of_class(0)
print("class samples:", X.shape)

fc = fit(X, FitConfig(epochs=2000, seed=0), label=0)
trace = fc.loss_trace
for epoch in (1, 10, 100, 500, 2000):
    print(f"epoch {epoch:5d}  loss {trace[epoch - 1]:.5f}")
print("final:", fc.final_loss.as_dict())
print(f"fitted arc angle {fc.curve.theta:.3f} rad")

###############################################################################
# How close are the originals to the fitted arc? Scan a dense grid of
# positions and keep the nearest one for each sample.

grid = np.linspace(0, 1, 5000)
P = interp_batch(fc.curve, grid)
dots = np.clip(project_rows(X) @ P, -1, 1)
print("nearest distance per sample (rad):", np.round(np.arccos(dots.max(axis=1)), 4))
print("learned positions t:", np.round(np.sort(fc.t), 3))
