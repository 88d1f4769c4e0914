"""
Projecting feature vectors to pre-shapes
========================================

A raw feature vector of length d becomes a configuration of d planar
landmarks by duplicating each value into an (x, y) pair. Centering and
scaling that configuration gives a point on the unit pre-shape sphere.
"""

import numpy as np

from geocurve import preshape
from geocurve.errors import DegenerateVector

rng = np.random.default_rng(0)
v = rng.normal(size=6)
print("raw feature:", np.round(v, 3))

# duplicate, then center each axis, then normalize
pairs = preshape.duplicate(v)
print("landmarks (x1, y1, x2, y2, ...):", np.round(pairs, 3))
tau = preshape.project(v)
print("pre-shape:", np.round(tau, 3))
print("norm:", np.linalg.norm(tau), " per-axis means:", tau.reshape(-1, 2).mean(axis=0))

###############################################################################
# Position and scale are gone: any positive rescaling plus offset of ``v``
# lands on the same pre-shape.

w = 7.5 * v - 3.0
print("max difference after shift/scale:", np.max(np.abs(preshape.project(w) - tau)))

###############################################################################
# Distances on the sphere are angles.

u = preshape.project(rng.normal(size=6))
print("geodesic distance (rad):", preshape.geodesic_distance(tau, u))
print("distance to itself:", preshape.geodesic_distance(tau, tau))

###############################################################################
# A constant vector has no shape and is rejected.

try:
    preshape.project(np.full(6, 2.0))
except DegenerateVector as exc:
    print("constant input:", exc)
