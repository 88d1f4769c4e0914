"""Projection of raw feature vectors into Kendall pre-shape space.

A raw feature of length ``d`` is turned into ``d`` planar landmarks by
duplicating each coordinate into an ``(x, y)`` pair. Landmarks are stored
flat and interleaved: ``[x1, y1, x2, y2, ...]``. Centering removes the
per-axis mean, normalization removes scale; the result lies on the unit
sphere of centered configurations.
"""
import numpy as np

from .errors import DegenerateVector, DimensionMismatch

NORM_EPS = 1e-12


def _as_raw(v):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D feature vector, got shape {v.shape}")
    if v.size < 2:
        raise DimensionMismatch("feature vectors need at least 2 entries")
    if not np.all(np.isfinite(v)):
        raise ValueError("feature vector contains non-finite entries")
    return v


def duplicate(v):
    """Return the interleaved paired vector ``[v0, v0, v1, v1, ...]``."""
    v = _as_raw(v)
    return np.repeat(v, 2)


def center(p):
    """Subtract the x-mean from x-coordinates and the y-mean from y-coordinates."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size % 2:
        raise DimensionMismatch(f"paired vectors have even length, got shape {p.shape}")
    pairs = p.reshape(-1, 2)
    return (pairs - pairs.mean(axis=0)).ravel()


def normalize(p, eps=NORM_EPS):
    p = np.asarray(p, dtype=np.float64)
    nrm = np.linalg.norm(p)
    if not nrm > eps:
        raise DegenerateVector(f"cannot normalize vector with norm {nrm:.3g} <= {eps:g}")
    return p / nrm


def project(v):
    """Map a raw feature vector of length d to a pre-shape vector of length 2d."""
    return normalize(center(duplicate(v)))


def project_rows(V, eps=NORM_EPS):
    """Project every row of an ``(n, d)`` array; returns ``(n, 2d)``.

    Raises DegenerateVector naming the first constant row.
    """
    V = np.asarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[1] < 2:
        raise DimensionMismatch(f"expected (n, d>=2) array, got shape {V.shape}")
    P = np.repeat(V, 2, axis=1)
    n = P.shape[0]
    pairs = P.reshape(n, -1, 2)
    C = (pairs - pairs.mean(axis=1, keepdims=True)).reshape(n, -1)
    norms = np.linalg.norm(C, axis=1)
    bad = np.flatnonzero(~(norms > eps))
    if bad.size:
        raise DegenerateVector(f"row {bad[0]} is constant and has no pre-shape")
    return C / norms[:, None]


def is_preshape(tau, tol=1e-12):
    tau = np.asarray(tau, dtype=np.float64)
    if tau.ndim != 1 or tau.size % 2:
        return False
    means = tau.reshape(-1, 2).mean(axis=0)
    return bool(np.all(np.abs(means) <= tol) and abs(np.linalg.norm(tau) - 1.0) <= tol)


def geodesic_distance(a, b):
    """Great-circle angle between two pre-shapes, in ``[0, pi]``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")
    return float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))


def pairwise_geodesic(A, B):
    """Angle matrix between rows of ``A`` and rows of ``B``."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"row length {A.shape[1]} vs {B.shape[1]}")
    return np.arccos(np.clip(A @ B.T, -1.0, 1.0))
