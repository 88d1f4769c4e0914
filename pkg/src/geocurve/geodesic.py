"""Great-circle curves between two pre-shapes."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurve, DimensionMismatch, OutOfRange
from .preshape import geodesic_distance

THETA_MIN = 1e-4


@dataclass(frozen=True)
class GeodesicCurve:
    tau_start: np.ndarray
    tau_end: np.ndarray
    theta: float

    @property
    def dim(self):
        return self.tau_start.size


def make_curve(tau_start, tau_end, theta_min=THETA_MIN):
    """Validated constructor.

    Rejects endpoint pairs whose angle is below ``theta_min`` or above
    ``pi - theta_min``; in both cases ``sin(theta)`` is too small to divide by.
    """
    a = np.array(tau_start, dtype=np.float64)
    b = np.array(tau_end, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionMismatch(f"endpoint shapes {a.shape} and {b.shape}")
    theta = geodesic_distance(a, b)
    if theta < theta_min or theta > np.pi - theta_min:
        raise DegenerateCurve(f"endpoint angle {theta:.6g} rad outside [{theta_min:g}, pi - {theta_min:g}]")
    a.flags.writeable = False
    b.flags.writeable = False
    return GeodesicCurve(a, b, theta)


def gamma(curve, s):
    """Point at arc length ``s`` from the start, ``0 <= s <= theta``."""
    th = curve.theta
    if not 0.0 <= s <= th:
        raise OutOfRange(f"arc parameter {s} outside [0, {th}]")
    a, b = curve.tau_start, curve.tau_end
    return np.cos(s) * a + np.sin(s) * (b - a * np.cos(th)) / np.sin(th)


def interp(curve, z):
    """Slerp at normalized position ``z`` in [0, 1]."""
    if not 0.0 <= z <= 1.0:
        raise OutOfRange(f"z={z} outside [0, 1]")
    th = curve.theta
    sin_th = np.sin(th)
    return (np.sin((1.0 - z) * th) / sin_th) * curve.tau_start + (np.sin(z * th) / sin_th) * curve.tau_end


def slerp_weights(theta, t):
    t = np.asarray(t, dtype=np.float64)
    sin_th = np.sin(theta)
    return np.sin((1.0 - t) * theta) / sin_th, np.sin(t * theta) / sin_th


def interp_batch(curve, t):
    """Evaluate the slerp at every entry of ``t``.

    Returns a ``(2d, m)`` matrix with one sample per column.
    """
    t = np.asarray(t, dtype=np.float64).ravel()
    if t.size and not (np.all(t >= 0.0) and np.all(t <= 1.0)):
        raise OutOfRange("all t must lie in [0, 1]")
    wa, wb = slerp_weights(curve.theta, t)
    return np.outer(curve.tau_start, wa) + np.outer(curve.tau_end, wb)


def position(curve, tau):
    """Recover the normalized position of an on-curve point from its start distance."""
    return geodesic_distance(curve.tau_start, tau) / curve.theta
