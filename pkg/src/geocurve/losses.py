"""Training losses for geodesic curve fitting."""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyInput, LengthMismatch


@dataclass(frozen=True)
class LossReport:
    sim: float
    diverg: float
    total: float
    beta: float

    def as_dict(self):
        return {"sim": self.sim, "diverg": self.diverg, "total": self.total, "beta": self.beta}


def column_dots(sampled, original):
    """Per-column inner products, ``(S * O)^T 1``."""
    sampled = np.asarray(sampled, dtype=np.float64)
    original = np.asarray(original, dtype=np.float64)
    if sampled.shape != original.shape or sampled.ndim != 2:
        raise DimensionMismatch(f"shape {sampled.shape} vs {original.shape}")
    return (sampled * original).sum(axis=0)


def sim_loss(sampled, original):
    """Norm of the cosine residuals between paired columns.

    Both arguments are ``(2d, m)`` matrices of unit columns. No clamping is
    applied to the inner products.
    """
    r = 1.0 - column_dots(sampled, original)
    return float(np.sqrt(np.dot(r, r)))


def sim_loss_loop(sampled, original):
    """Reference implementation: explicit per-column loop."""
    sampled = np.asarray(sampled, dtype=np.float64)
    original = np.asarray(original, dtype=np.float64)
    if sampled.shape != original.shape:
        raise DimensionMismatch(f"shape {sampled.shape} vs {original.shape}")
    acc = 0.0
    for i in range(sampled.shape[1]):
        c = 0.0
        for k in range(sampled.shape[0]):
            c += sampled[k, i] * original[k, i]
        acc += (1.0 - c) ** 2
    return acc ** 0.5


def divergence_loss(t, z):
    """Empirical 1-D Wasserstein-1 distance between two equal-size samples."""
    t = np.asarray(t, dtype=np.float64).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    if t.size != z.size:
        raise LengthMismatch(f"len(t)={t.size} != len(z)={z.size}")
    if t.size == 0:
        raise EmptyInput("divergence loss needs at least one sample")
    return float(np.abs(np.sort(t, kind="stable") - np.sort(z, kind="stable")).mean())


def total_loss(sim, diverg, beta):
    if sim < 0 or diverg < 0 or beta < 0:
        raise ValueError("sim, diverg and beta must be nonnegative")
    return LossReport(float(sim), float(diverg), float(sim + beta * diverg), float(beta))
