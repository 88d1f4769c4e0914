"""Per-class geodesic curve fitting by gradient descent."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging

import numpy as np

from .dataset import class_rng
from .errors import (
    ClassFitError, DegenerateCurve, DegenerateVector, EmptyInput, InitFailure, NonFiniteLoss,
)
from .geodesic import THETA_MIN, GeodesicCurve, make_curve
from .graddescent import AdamState, ParamSet, adam_step, backward, forward
from .losses import LossReport
from .preshape import project, project_rows

log = logging.getLogger(__name__)

MAX_PERTURB_TRIES = 16
EARLY_STOP_WINDOW = 100
EARLY_STOP_TOL = 1e-6


@dataclass(frozen=True)
class FitConfig:
    beta: float = 0.3
    lr_endpoints: float = 3e-4
    lr_t: float = 3e-3
    epochs: int = 2000
    seed: int = 0
    theta_min: float = THETA_MIN
    perturb_sigma: float = 1e-2
    early_stop: bool = False

    def __post_init__(self):
        if not (self.lr_endpoints > 0 and self.lr_t > 0):
            raise ValueError("learning rates must be positive")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs}")
        if not self.beta >= 0:
            raise ValueError("beta must be nonnegative")
        if not 0 < self.theta_min < np.pi / 2:
            raise ValueError("theta_min must lie in (0, pi/2)")
        if not self.perturb_sigma > 0:
            raise ValueError("perturb_sigma must be positive")


@dataclass
class FitState:
    """Mutable loop state of one fit. Owned by a single fitting job."""

    params: ParamSet
    adam: AdamState
    epoch: int = 0
    last_report: LossReport = None
    loss_trace: list = field(default_factory=list)
    degenerate_events: int = 0
    last_z: np.ndarray = None


@dataclass(frozen=True)
class FittedCurve:
    curve: GeodesicCurve
    class_label: object
    final_loss: LossReport
    loss_trace: tuple
    t: np.ndarray = None
    degenerate_events: int = 0

    @property
    def epochs_run(self):
        return len(self.loss_trace)


def _angle_ok(v_start, v_end, theta_min):
    try:
        a, b = project(v_start), project(v_end)
    except DegenerateVector:
        return False
    th = float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))
    return theta_min <= th <= np.pi - theta_min


def _perturbed_end(v_start, config, rng):
    """Draw a noisy copy of ``v_start`` far enough away to define a curve."""
    scale = config.perturb_sigma * float(np.std(v_start))
    for _ in range(MAX_PERTURB_TRIES):
        v_end = v_start + rng.normal(0.0, 1.0, size=v_start.size) * scale
        if _angle_ok(v_start, v_end, config.theta_min):
            return v_end
    raise InitFailure(
        f"no usable end vector after {MAX_PERTURB_TRIES} perturbations "
        f"(feature std {np.std(v_start):.3g}); samples are projectively identical"
    )


def init_fit(class_features, config, rng):
    """Pick two distinct samples as endpoints and draw the raw sampling parameters."""
    X = np.asarray(class_features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyInput("need at least one feature vector")
    m = X.shape[0]
    if m >= 2:
        i, j = rng.choice(m, size=2, replace=False)
        v_start, v_end = X[i].copy(), X[j].copy()
        if not _angle_ok(v_start, v_end, config.theta_min):
            v_end = _perturbed_end(v_start, config, rng)
    else:
        v_start = X[0].copy()
        v_end = _perturbed_end(v_start, config, rng)
    t_raw = rng.standard_normal(m)
    params = ParamSet(v_start, v_end, t_raw)
    return FitState(params=params, adam=AdamState.zeros_like(params))


def fit_epoch(state, originals, config, rng):
    """Run one epoch: fresh uniform reference, forward, backward, Adam update.

    The returned state reuses ``state.loss_trace``; callers must not keep
    using the old state.
    """
    m = state.params.t_raw.size
    z = rng.uniform(0.0, 1.0, size=m)
    params = state.params
    events = state.degenerate_events
    for _ in range(MAX_PERTURB_TRIES + 1):
        try:
            report, cache = forward(params, originals, z, config.beta, config.theta_min)
            break
        except (DegenerateCurve, DegenerateVector) as exc:
            events += 1
            log.info("epoch %d: %s; re-perturbing end vector", state.epoch + 1, exc)
            params = replace(params, v_end=_perturbed_end(params.v_start, config, rng))
    else:
        raise InitFailure("could not recover from degenerate endpoints")
    if not np.isfinite(report.total):
        raise NonFiniteLoss(
            f"non-finite loss at epoch {state.epoch + 1}: sim={report.sim}, diverg={report.diverg}, "
            f"theta={cache.theta}"
        )
    grads = backward(cache)
    new_params, new_adam = adam_step(params, grads, state.adam, config.lr_endpoints, config.lr_t)
    state.loss_trace.append(report.total)
    return FitState(
        params=new_params, adam=new_adam, epoch=state.epoch + 1, last_report=report,
        loss_trace=state.loss_trace, degenerate_events=events, last_z=z,
    )


def _converged(trace):
    w = EARLY_STOP_WINDOW
    if len(trace) < 2 * w:
        return False
    prev = np.mean(trace[-2 * w:-w])
    cur = np.mean(trace[-w:])
    return prev - cur < EARLY_STOP_TOL


def fit(class_features, config=None, rng=None, label=None):
    """Fit one class's geodesic curve.

    ``class_features`` is an ``(m, d)`` array of raw features. Runs
    ``config.epochs`` epochs, or fewer when ``config.early_stop`` is set and
    the moving-average loss stops improving.
    """
    config = config or FitConfig()
    if rng is None:
        rng = class_rng(config.seed, label)
    X = np.asarray(class_features, dtype=np.float64)
    state = init_fit(X, config, rng)
    originals = np.ascontiguousarray(project_rows(X).T)
    for _ in range(config.epochs):
        state = fit_epoch(state, originals, config, rng)
        if config.early_stop and _converged(state.loss_trace):
            break
    # evaluate at the returned endpoints, reusing the last reference sample
    try:
        final, cache = forward(state.params, originals, state.last_z, config.beta, config.theta_min)
    except (DegenerateCurve, DegenerateVector) as exc:
        raise NonFiniteLoss(f"fitted endpoints are degenerate: {exc}") from exc
    curve = make_curve(cache.tau_start, cache.tau_end, theta_min=config.theta_min)
    return FittedCurve(
        curve=curve, class_label=label, final_loss=final, loss_trace=tuple(state.loss_trace),
        t=cache.t.copy(), degenerate_events=state.degenerate_events,
    )


def fit_all_classes(dataset, config=None, threads=1, labels=None):
    """Fit one curve per class of a raw LabeledFeatureSet.

    Each class draws from its own generator keyed on ``(config.seed, label)``,
    so results do not depend on iteration order or ``threads``. ``labels``
    restricts (and orders) the classes to fit; a requested label with no
    samples is reported as a failure for that class.
    """
    config = config or FitConfig()
    labels = dataset.classes() if labels is None else list(labels)

    def job(label):
        X = dataset.of_class(label)
        if X.shape[0] == 0:
            raise EmptyInput(f"class {label!r} has no samples")
        return fit(X, config, class_rng(config.seed, label), label=label)

    results, failures = {}, {}
    if threads > 1 and len(labels) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {lab: pool.submit(job, lab) for lab in labels}
            for lab in labels:
                try:
                    results[lab] = futures[lab].result()
                except Exception as exc:  # noqa: BLE001 - aggregated below
                    failures[lab] = exc
    else:
        for lab in labels:
            try:
                results[lab] = job(lab)
            except Exception as exc:  # noqa: BLE001
                failures[lab] = exc
    if failures:
        raise ClassFitError(failures)
    return results

