"""
Walking along a geodesic
========================

Two pre-shapes define a great-circle arc. The arc can be traversed by
arc length ``s`` in [0, theta] or by the normalized position ``z`` in
[0, 1] (slerp). Both give the same points.
"""

import numpy as np

from geocurve import geodesic, preshape
from geocurve.errors import DegenerateCurve

rng = np.random.default_rng(1)
a = preshape.project(rng.normal(size=8))
b = preshape.project(rng.normal(size=8))
curve = geodesic.make_curve(a, b)
print(f"angle between endpoints: {curve.theta:.4f} rad")

for z in (0.0, 0.25, 0.5, 1.0):
    p = geodesic.interp(curve, z)
    q = geodesic.gamma(curve, z * curve.theta)
    print(f"z={z:.2f}  |interp - gamma|={np.max(np.abs(p - q)):.1e}  "
          f"dist to start={preshape.geodesic_distance(a, p):.4f}")

###############################################################################
# Every interior point splits the arc: distance to start plus distance to
# end is theta.

pts = geodesic.interp_batch(curve, rng.uniform(size=5))
for p in pts.T:
    total = preshape.geodesic_distance(a, p) + preshape.geodesic_distance(p, b)
    print(f"d(a,p) + d(p,b) - theta = {total - curve.theta:+.1e}")

###############################################################################
# Endpoints that coincide (or are antipodal) do not pick a unique arc.

try:
    geodesic.make_curve(a, a)
except DegenerateCurve as exc:
    print("degenerate:", exc)
