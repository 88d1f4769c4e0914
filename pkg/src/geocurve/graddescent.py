"""Analytic gradients of the curve-fitting loss, and an Adam optimizer.

The computation graph is fixed:

    t = sigmoid(t_raw)
    a = project(v_start), b = project(v_end)
    theta = arccos(<a, b>)
    S[:, i] = A_i a + B_i b,   A_i = sin((1-t_i) theta)/sin theta,  B_i = sin(t_i theta)/sin theta
    L = ||1 - diag(S^T T)|| + beta * mean|sort(t) - sort(z)|

so the reverse pass is written out by hand rather than taped.
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import DegenerateCurve, DegenerateVector, DimensionMismatch
from .geodesic import THETA_MIN, slerp_weights
from .losses import LossReport, column_dots
from .preshape import NORM_EPS

ACOS_CLAMP = 1e-7


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-np.logaddexp(0.0, -x))


def _project_with_norm(v):
    # duplicated pairs share one mean per axis, so centering reduces to v - mean(v)
    c = np.repeat(v - v.sum() / v.size, 2)
    nrm = math.sqrt(c @ c)
    return (c / nrm if nrm > NORM_EPS else None), nrm


def _project_adjoint(g_tau, tau, nrm):
    """Pull a gradient w.r.t. a pre-shape back to the raw feature.

    normalize: (g - tau <tau, g>) / |c|; center: subtract per-axis mean;
    duplicate: sum each (x, y) pair.
    """
    g_c = (g_tau - tau * (tau @ g_tau)) / nrm
    pair_sum = g_c[0::2] + g_c[1::2]
    return pair_sum - pair_sum.sum() / pair_sum.size


@dataclass(frozen=True)
class ParamSet:
    v_start: np.ndarray
    v_end: np.ndarray
    t_raw: np.ndarray

    def __post_init__(self):
        for name in ("v_start", "v_end", "t_raw"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if self.v_start.shape != self.v_end.shape:
            raise DimensionMismatch("v_start and v_end differ in length")

    def copy(self):
        return ParamSet(self.v_start.copy(), self.v_end.copy(), self.t_raw.copy())

    def arrays(self):
        return {"v_start": self.v_start, "v_end": self.v_end, "t_raw": self.t_raw}


@dataclass(frozen=True)
class GradSet:
    d_v_start: np.ndarray
    d_v_end: np.ndarray
    d_t_raw: np.ndarray

    def arrays(self):
        return {"v_start": self.d_v_start, "v_end": self.d_v_end, "t_raw": self.d_t_raw}

    def max_abs(self):
        return max(float(np.max(np.abs(g))) if g.size else 0.0 for g in self.arrays().values())


@dataclass
class ForwardCache:
    t: np.ndarray
    z: np.ndarray
    beta: float
    tau_start: np.ndarray
    tau_end: np.ndarray
    norm_start: float
    norm_end: float
    theta: float
    cos_theta: float
    wa: np.ndarray
    wb: np.ndarray
    originals: np.ndarray
    residual: np.ndarray
    sim: float
    order: np.ndarray
    z_sorted: np.ndarray


def forward(params, originals, z, beta, theta_min=THETA_MIN):
    """Evaluate the training loss and keep what the backward pass needs.

    ``originals`` is the ``(2d, m)`` matrix of projected class samples.
    Raises DegenerateVector / DegenerateCurve when the endpoints do not
    define a usable geodesic.
    """
    # fixed memory layout keeps BLAS reductions bitwise reproducible
    originals = np.ascontiguousarray(originals, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    t = sigmoid(params.t_raw)
    if originals.shape[1] != t.size or z.size != t.size:
        raise DimensionMismatch(f"m mismatch: originals {originals.shape}, t {t.size}, z {z.size}")
    if originals.shape[0] != 2 * params.v_start.size:
        raise DimensionMismatch(f"originals have {originals.shape[0]} rows, expected {2 * params.v_start.size}")

    a, na = _project_with_norm(params.v_start)
    b, nb = _project_with_norm(params.v_end)
    if a is None or b is None:
        which = "v_start" if a is None else "v_end"
        raise DegenerateVector(f"{which} is constant and has no pre-shape")
    cos_th = float(a @ b)
    theta = math.acos(min(1.0, max(-1.0, cos_th)))
    if theta < theta_min or theta > math.pi - theta_min:
        raise DegenerateCurve(f"endpoint angle {theta:.6g} rad outside [{theta_min:g}, pi - {theta_min:g}]")
    wa, wb = slerp_weights(theta, t)
    sampled = np.outer(a, wa) + np.outer(b, wb)
    residual = 1.0 - column_dots(sampled, originals)
    sim = math.sqrt(residual @ residual)

    order = np.argsort(t, kind="stable")
    z_sorted = np.sort(z, kind="stable")
    diverg = float(np.abs(t[order] - z_sorted).sum() / t.size)
    report = LossReport(sim, diverg, sim + beta * diverg, float(beta))
    cache = ForwardCache(
        t=t, z=z, beta=float(beta), tau_start=a, tau_end=b, norm_start=na, norm_end=nb,
        theta=theta, cos_theta=cos_th, wa=wa, wb=wb, originals=originals,
        residual=residual, sim=sim, order=order, z_sorted=z_sorted,
    )
    return report, cache


def backward(cache):
    """Exact gradient of the total loss w.r.t. ``v_start``, ``v_end`` and ``t_raw``."""
    c = cache
    t, th = c.t, c.theta
    sin_th = math.sin(th)
    cos_th = math.cos(th)
    m = t.size

    # d L_sim / d <sampled_i, original_i>
    if c.sim > 0.0:
        w = -c.residual / c.sim
    else:
        w = np.zeros(m)

    pa = c.tau_start @ c.originals
    pb = c.tau_end @ c.originals

    s1 = np.sin((1.0 - t) * th)
    c1 = np.cos((1.0 - t) * th)
    s2 = np.sin(t * th)
    c2 = np.cos(t * th)
    dwa_dth = ((1.0 - t) * c1 * sin_th - s1 * cos_th) / sin_th**2
    dwb_dth = (t * c2 * sin_th - s2 * cos_th) / sin_th**2
    dwa_dt = -th * c1 / sin_th
    dwb_dt = th * c2 / sin_th

    g_theta = float(w @ (pa * dwa_dth + pb * dwb_dth))
    x = c.cos_theta
    if -1.0 + ACOS_CLAMP < x < 1.0 - ACOS_CLAMP:
        g_cos = -g_theta / math.sqrt(1.0 - x * x)
    else:
        g_cos = 0.0

    g_a = c.originals @ (w * c.wa) + g_cos * c.tau_end
    g_b = c.originals @ (w * c.wb) + g_cos * c.tau_start

    g_t = w * (pa * dwa_dt + pb * dwb_dt)
    # divergence term: route through the sort permutation recorded in forward
    ts = t[c.order]
    g_t[c.order] += (c.beta / m) * np.sign(ts - c.z_sorted)

    g_traw = g_t * t * (1.0 - t)
    return GradSet(
        _project_adjoint(g_a, c.tau_start, c.norm_start),
        _project_adjoint(g_b, c.tau_end, c.norm_end),
        g_traw,
    )


def loss_value(params, originals, z, beta):
    return forward(params, originals, z, beta)[0].total


def finite_diff(params, originals, z, beta, h=1e-5):
    """Central-difference gradient, one scalar parameter at a time, with ``z`` fixed."""
    if not h > 0:
        raise ValueError("step h must be positive")
    base = params.arrays()
    out = {}
    for name, arr in base.items():
        g = np.zeros_like(arr)
        for k in range(arr.size):
            plus = {n: a.copy() for n, a in base.items()}
            minus = {n: a.copy() for n, a in base.items()}
            plus[name][k] += h
            minus[name][k] -= h
            fp = loss_value(ParamSet(**plus), originals, z, beta)
            fm = loss_value(ParamSet(**minus), originals, z, beta)
            g[k] = (fp - fm) / (2.0 * h)
        out[name] = g
    return GradSet(out["v_start"], out["v_end"], out["t_raw"])


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params, **hyper):
        arrs = params.arrays()
        return cls(
            m={k: np.zeros_like(a) for k, a in arrs.items()},
            v={k: np.zeros_like(a) for k, a in arrs.items()},
            **hyper,
        )


def adam_step(params, grads, state, lr_endpoints, lr_t):
    """One bias-corrected Adam update; endpoints and sampling parameters get separate rates.

    Returns new ``(ParamSet, AdamState)``; inputs are not modified.
    """
    if not (lr_endpoints > 0 and lr_t > 0):
        raise ValueError("learning rates must be positive")
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**step
    bc2 = 1.0 - b2**step
    lrs = {"v_start": lr_endpoints, "v_end": lr_endpoints, "t_raw": lr_t}
    new_p, new_m, new_v = {}, {}, {}
    garrs = grads.arrays()
    for k, p in params.arrays().items():
        g = garrs[k]
        if g.shape != p.shape:
            raise DimensionMismatch(f"gradient for {k} has shape {g.shape}, parameter {p.shape}")
        m = b1 * state.m[k] + (1.0 - b1) * g
        v = b2 * state.v[k] + (1.0 - b2) * (g * g)
        new_p[k] = p - lrs[k] * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        new_m[k] = m
        new_v[k] = v
    return ParamSet(**new_p), replace(state, m=new_m, v=new_v, step=step)
