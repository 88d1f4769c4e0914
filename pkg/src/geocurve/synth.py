"""Synthetic raw features for exercising the fitting and evaluation code.

``geodesic`` data puts every class on a great-circle arc of the pre-shape
sphere, so a single fitted curve per class is the correct model.
``gaussian`` data draws isotropic blobs around per-class means, where the
curve model is only approximate.

Both generators return raw features: each sample is a random positive
rescaling plus a random offset of a centered unit vector, which projection
undoes exactly.
"""
import numpy as np

from .dataset import LabeledFeatureSet

# angle between each class centre and the shared base point
CLASS_SPREAD = 0.22
ARC_LENGTH = 1.6


def _centered_unit(rng, d):
    x = rng.standard_normal(d)
    x -= x.mean()
    return x / np.linalg.norm(x)


def _tangent_unit(rng, at):
    # unit vector orthogonal to `at` and to the all-ones direction
    x = _centered_unit(rng, at.size)
    x -= at * np.dot(at, x)
    return x / np.linalg.norm(x)


def _tangent_noise(rng, at, scale):
    d = at.size
    e = rng.standard_normal(d) * (scale / np.sqrt(d))
    e -= e.mean()
    e -= at * np.dot(at, e)
    return e


def _to_raw(rng, U):
    n, d = U.shape
    scales = rng.uniform(0.5, 2.0, size=(n, 1))
    offsets = rng.normal(0.0, 0.1, size=(n, 1))
    return U * scales + offsets


def _check(classes, per_class, dim):
    if classes < 2 or per_class < 1 or dim < 4:
        raise ValueError("need classes >= 2, per_class >= 1 and dim >= 4")


def class_arcs(classes, dim, rng, spread=CLASS_SPREAD):
    """Per-class (centre, direction) pairs defining the latent great circles."""
    base = _centered_unit(rng, dim)
    arcs = []
    for _ in range(classes):
        e = _tangent_unit(rng, base)
        centre = np.cos(spread) * base + np.sin(spread) * e
        arcs.append((centre, _tangent_unit(rng, centre)))
    return arcs


def sample_arc(arc, n, noise, rng, arc_length=ARC_LENGTH):
    centre, direction = arc
    phi = rng.uniform(-arc_length / 2, arc_length / 2, size=n)
    U = np.cos(phi)[:, None] * centre + np.sin(phi)[:, None] * direction
    if noise > 0:
        for i in range(n):
            u = U[i] + _tangent_noise(rng, U[i], noise)
            U[i] = u / np.linalg.norm(u)
    return U


def geodesic_classes(classes, per_class, dim, noise, seed, splits=None):
    """Classes generated along latent arcs.

    With ``splits`` (a sequence of per-class counts) several independent
    sets drawn from the same arcs are returned, e.g. train and test.
    """
    _check(classes, per_class, dim)
    rng = np.random.default_rng(seed)
    arcs = class_arcs(classes, dim, rng)
    sizes = list(splits) if splits is not None else [per_class]
    out = []
    for size in sizes:
        rows, labels = [], []
        for c, arc in enumerate(arcs):
            rows.append(_to_raw(rng, sample_arc(arc, size, noise, rng)))
            labels += [c] * size
        out.append(LabeledFeatureSet(np.vstack(rows), np.array(labels)))
    return out if splits is not None else out[0]


def gaussian_classes(classes, per_class, dim, noise, seed, splits=None, spread=CLASS_SPREAD):
    _check(classes, per_class, dim)
    rng = np.random.default_rng(seed)
    base = _centered_unit(rng, dim)
    means = []
    for _ in range(classes):
        e = _tangent_unit(rng, base)
        means.append(np.cos(spread) * base + np.sin(spread) * e)
    sizes = list(splits) if splits is not None else [per_class]
    out = []
    for size in sizes:
        rows, labels = [], []
        for c, mu in enumerate(means):
            U = np.empty((size, dim))
            for i in range(size):
                u = mu + _tangent_noise(rng, mu, noise)
                U[i] = u / np.linalg.norm(u)
            rows.append(_to_raw(rng, U))
            labels += [c] * size
        out.append(LabeledFeatureSet(np.vstack(rows), np.array(labels)))
    return out if splits is not None else out[0]


def synth(kind, classes, per_class, dim, noise, seed, splits=None):
    if kind == "geodesic":
        return geodesic_classes(classes, per_class, dim, noise, seed, splits)
    if kind == "gaussian":
        return gaussian_classes(classes, per_class, dim, noise, seed, splits)
    raise ValueError(f"unknown synth kind {kind!r}")
