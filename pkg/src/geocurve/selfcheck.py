"""Randomized property suites behind ``geocurve check``.

Each suite returns a :class:`SuiteResult` with the worst observed error
and the tolerance it is held to. Instances are drawn from a fixed seed so a
given build always checks the same cases.
"""
from dataclasses import dataclass, field
import time

import numpy as np

from .geodesic import gamma, interp, interp_batch, make_curve
from .graddescent import ParamSet, backward, finite_diff, forward
from .losses import sim_loss, sim_loss_loop
from .preshape import geodesic_distance, project, project_rows

CHECK_SEED = 20240917


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict
    tolerances: dict
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={v:.3g}" for k, v in self.metrics.items())
        return f"[{status}] {self.name}: {parts} ({self.seconds:.2f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def random_preshape(rng, d):
    while True:
        v = rng.standard_normal(d)
        if np.ptp(v) > 0:
            return project(v)


def random_curve(rng, d, lo=0.1, hi=np.pi - 0.1):
    """A curve whose angle is uniform in ``[lo, hi]``."""
    a = random_preshape(rng, d)
    w = random_preshape(rng, d)
    w = w - a * np.dot(a, w)
    w /= np.linalg.norm(w)
    theta = rng.uniform(lo, hi)
    return make_curve(a, np.cos(theta) * a + np.sin(theta) * w)


@_timed
def slerp_equivalence(n=1000, dims=(4, 16, 64, 256), seed=CHECK_SEED, tol=1e-10):
    """Arc-length and normalized parameterizations agree."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n):
        curve = random_curve(rng, dims[i % len(dims)])
        z = rng.uniform()
        worst = max(worst, float(np.max(np.abs(gamma(curve, z * curve.theta) - interp(curve, z)))))
    return SuiteResult("slerp-equivalence", worst <= tol, {"max_abs_error": worst}, {"max_abs_error": tol})


@_timed
def projection_invariants(n=1000, max_dim=512, seed=CHECK_SEED, tol=1e-12, inv_tol=1e-9):
    rng = np.random.default_rng(seed + 1)
    worst_mean = worst_norm = worst_inv = 0.0
    for _ in range(n):
        d = int(rng.integers(2, max_dim + 1))
        v = rng.standard_normal(d) * rng.uniform(0.1, 10.0) + rng.normal(0, 5)
        if np.ptp(v) == 0:
            continue
        tau = project(v)
        worst_mean = max(worst_mean, float(np.max(np.abs(tau.reshape(-1, 2).mean(axis=0)))))
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(tau)) - 1.0))
        a, b = rng.uniform(0.01, 100.0), rng.normal(0, 100.0)
        worst_inv = max(worst_inv, float(np.max(np.abs(project(a * v + b) - tau))))
    ok = worst_mean <= tol and worst_norm <= tol and worst_inv <= inv_tol
    return SuiteResult(
        "projection", ok,
        {"max_axis_mean": worst_mean, "max_norm_error": worst_norm, "max_shift_scale_diff": worst_inv},
        {"max_axis_mean": tol, "max_norm_error": tol, "max_shift_scale_diff": inv_tol},
    )


@_timed
def loss_forms(n=200, max_m=64, max_dim=256, seed=CHECK_SEED, tol=1e-12):
    """Matrix-form similarity loss against the explicit loop."""
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(n):
        m = int(rng.integers(1, max_m + 1))
        d = int(rng.integers(2, max_dim + 1))
        S = project_rows(rng.standard_normal((m, d))).T
        T = project_rows(rng.standard_normal((m, d))).T
        fast, slow = sim_loss(S, T), sim_loss_loop(S, T)
        worst = max(worst, abs(fast - slow) / max(abs(slow), 1e-300))
    return SuiteResult("loss-forms", worst <= tol, {"max_rel_diff": worst}, {"max_rel_diff": tol})


def gradient_instance(rng, m, d, margin=0.1):
    """Random fitting problem whose endpoint angle stays ``margin`` away from 0 and pi."""
    originals = project_rows(rng.standard_normal((m, d))).T
    while True:
        v_start, v_end = rng.standard_normal(d), rng.standard_normal(d)
        th = geodesic_distance(project(v_start), project(v_end))
        if margin <= th <= np.pi - margin:
            break
    params = ParamSet(v_start, v_end, rng.standard_normal(m))
    z = rng.uniform(size=m)
    return params, originals, z


def gradient_error(analytic, numeric):
    """Per-entry error scaled so that <= 1e-4 means relative 1e-4 with a 1e-8 absolute floor."""
    errs = []
    for a, f in zip(analytic.arrays().values(), numeric.arrays().values()):
        mag = np.maximum(np.maximum(np.abs(a), np.abs(f)), 1e-4)
        errs.append(np.abs(a - f) / mag)
    return float(max(e.max() for e in errs))


@_timed
def gradient_oracle(n=100, seed=CHECK_SEED, beta=0.3, h=1e-5, tol=1e-4):
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for _ in range(n):
        m = int(rng.integers(2, 9))
        d = int(rng.integers(4, 17))
        params, originals, z = gradient_instance(rng, m, d)
        _, cache = forward(params, originals, z, beta)
        worst = max(worst, gradient_error(backward(cache), finite_diff(params, originals, z, beta, h)))
    return SuiteResult("gradient-oracle", worst <= tol, {"max_rel_error": worst}, {"max_rel_error": tol})


def stable_angle(P, tau):
    """Row-wise angle to ``tau`` via 2*atan2(|p - tau|, |p + tau|); accurate near 0 and pi."""
    P = np.atleast_2d(P)
    return 2.0 * np.arctan2(np.linalg.norm(P - tau, axis=1), np.linalg.norm(P + tau, axis=1))


def on_curve_stats(curves, n_total, rng):
    """Sample ``n_total`` points across ``curves`` and measure on-curve additivity and z uniformity."""
    curves = list(curves)
    per = [n_total // len(curves) + (1 if i < n_total % len(curves) else 0) for i in range(len(curves))]
    worst = 0.0
    zs = []
    for curve, k in zip(curves, per):
        z = rng.uniform(size=k)
        pts = interp_batch(curve, z).T
        d_start = stable_angle(pts, curve.tau_start)
        d_end = stable_angle(pts, curve.tau_end)
        worst = max(worst, float(np.max(np.abs(d_start + d_end - curve.theta))))
        zs.append(d_start / curve.theta)
    z_rec = np.concatenate(zs)
    counts, _ = np.histogram(z_rec, bins=10, range=(0.0, 1.0))
    expected = z_rec.size / 10
    return {
        "max_additivity_error": worst,
        "z_mean_offset": abs(float(z_rec.mean()) - 0.5),
        "max_bin_deviation": float(np.max(np.abs(counts - expected)) / expected),
    }


def on_curve_ok(stats, add_tol=1e-9, mean_tol=0.02, bin_tol=0.4):
    return (stats["max_additivity_error"] <= add_tol and stats["z_mean_offset"] <= mean_tol
            and stats["max_bin_deviation"] <= bin_tol)


@_timed
def on_curve(curves=None, n_total=10_000, seed=CHECK_SEED, epochs=300):
    """Augmented points lie on their curves and are spread uniformly along them.

    Without ``curves``, a small three-class geodesic problem is fitted first.
    """
    notes = []
    if curves is None:
        from .fitting import FitConfig, fit_all_classes
        from .synth import geodesic_classes
        data = geodesic_classes(3, 8, 16, 0.02, seed)
        fitted = fit_all_classes(data, FitConfig(epochs=epochs, seed=seed))
        curves = [fc.curve for fc in fitted.values()]
        notes.append(f"fitted {len(curves)} curves for {epochs} epochs")
    stats = on_curve_stats(curves, n_total, np.random.default_rng(seed + 4))
    return SuiteResult(
        "on-curve", on_curve_ok(stats), stats,
        {"max_additivity_error": 1e-9, "z_mean_offset": 0.02, "max_bin_deviation": 0.4}, notes=notes,
    )


def augmented_rows_on_curve(curves, augmented, tol=1e-9):
    """Verify every augmented row against its class curve. Returns a SuiteResult."""
    t0 = time.perf_counter()
    worst = 0.0
    missing = []
    for lab in augmented.classes():
        if lab not in curves:
            missing.append(lab)
            continue
        curve = curves[lab].curve
        P = augmented.of_class(lab)
        d_start = stable_angle(P, curve.tau_start)
        d_end = stable_angle(P, curve.tau_end)
        if P.shape[0]:
            worst = max(worst, float(np.max(np.abs(d_start + d_end - curve.theta))))
    res = SuiteResult(
        "augmented-rows", worst <= tol and not missing,
        {"max_additivity_error": worst, "rows": float(len(augmented))}, {"max_additivity_error": tol},
        notes=[f"no curve for label {lab!r}" for lab in missing],
    )
    res.seconds = time.perf_counter() - t0
    return res


def run_all():
    return [slerp_equivalence(), projection_invariants(), loss_forms(), gradient_oracle(), on_curve()]
