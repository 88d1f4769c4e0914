import numpy as np
import pytest

from geocurve.geodesic import interp_batch, make_curve
from geocurve.graddescent import (
    AdamState, GradSet, ParamSet, adam_step, backward, finite_diff, forward, sigmoid,
)
from geocurve.preshape import project
from geocurve.selfcheck import gradient_error, gradient_instance


def exact_problem(rng, m=6, d=8):
    v_start, v_end = rng.normal(size=d), rng.normal(size=d)
    t_raw = rng.normal(size=m)
    curve = make_curve(project(v_start), project(v_end))
    originals = interp_batch(curve, sigmoid(t_raw))
    z = np.sort(sigmoid(t_raw))
    return ParamSet(v_start, v_end, t_raw), originals, z


def test_zero_loss_at_exact_fit(rng):
    params, originals, z = exact_problem(rng)
    report, cache = forward(params, originals, z, 0.3)
    assert report.total == pytest.approx(0.0, abs=1e-7)
    assert report.diverg == 0.0
    g = backward(cache)
    assert g.max_abs() <= 1e-10


def test_beta_zero_is_sim_only(rng):
    params, originals, z = gradient_instance(rng, 5, 9)
    report, _ = forward(params, originals, z, 0.0)
    assert report.total == report.sim
    report, _ = forward(params, originals, z, 0.3)
    assert report.total == report.sim + 0.3 * report.diverg


def test_saturated_sigmoid_has_no_gradient(rng):
    params, originals, z = gradient_instance(rng, 4, 6)
    t_raw = params.t_raw.copy()
    t_raw[2] = 50.0
    _, cache = forward(ParamSet(params.v_start, params.v_end, t_raw), originals, z, 0.3)
    assert abs(backward(cache).d_t_raw[2]) <= 1e-15


def test_matches_finite_differences(rng):
    params, originals, z = gradient_instance(rng, 6, 8)
    _, cache = forward(params, originals, z, 0.3)
    assert gradient_error(backward(cache), finite_diff(params, originals, z, 0.3, 1e-5)) <= 1e-4


@pytest.mark.parametrize("seed", range(10))
def test_matches_finite_differences_random_sizes(seed):
    r = np.random.default_rng(seed)
    params, originals, z = gradient_instance(r, int(r.integers(2, 9)), int(r.integers(4, 17)))
    beta = float(r.uniform(0, 1))
    _, cache = forward(params, originals, z, beta)
    assert gradient_error(backward(cache), finite_diff(params, originals, z, beta, 1e-5)) <= 1e-4


def _directional(params, originals, z, direction, h=1e-5):
    def loss(v):
        return forward(ParamSet(v, params.v_end, params.t_raw), originals, z, 0.3)[0].total
    return (loss(params.v_start + h * direction) - loss(params.v_start - h * direction)) / (2 * h)


def test_projection_null_directions(rng):
    params, originals, z = gradient_instance(rng, 5, 10)
    ones = np.ones(10) / np.sqrt(10)
    radial = params.v_start - params.v_start.mean()
    radial /= np.linalg.norm(radial)
    assert abs(_directional(params, originals, z, ones)) <= 1e-8
    assert abs(_directional(params, originals, z, radial)) <= 1e-8
    g = backward(forward(params, originals, z, 0.3)[1]).d_v_start
    assert abs(g @ ones) <= 1e-8
    assert abs(g @ radial) <= 1e-8


def test_deterministic(rng):
    params, originals, z = gradient_instance(rng, 7, 12)
    r1, c1 = forward(params, originals, z, 0.3)
    r2, c2 = forward(params.copy(), originals.copy(), z.copy(), 0.3)
    assert r1 == r2
    for a, b in zip(backward(c1).arrays().values(), backward(c2).arrays().values()):
        np.testing.assert_array_equal(a, b)


def test_sort_routing_follows_permutation(rng):
    params, originals, z = gradient_instance(rng, 7, 9)
    perm = rng.permutation(7)
    g = backward(forward(params, originals, z, 0.5)[1])
    permuted = ParamSet(params.v_start, params.v_end, params.t_raw[perm])
    gp = backward(forward(permuted, originals[:, perm], z, 0.5)[1])
    np.testing.assert_array_equal(gp.d_t_raw, g.d_t_raw[perm])
    np.testing.assert_allclose(gp.d_v_start, g.d_v_start, atol=1e-14)


def _scalar_params(x):
    return ParamSet(np.array([x, 0.0]), np.array([0.0, x]), np.array([x]))


def test_adam_first_step_is_signed_lr():
    params = _scalar_params(1.0)
    grads = GradSet(np.array([0.3, -2.0]), np.array([5.0, 0.0]), np.array([-1e-3]))
    new, state = adam_step(params, grads, AdamState.zeros_like(params), 1e-2, 1e-1)
    # m_hat / sqrt(v_hat) = g/|g| up to eps
    np.testing.assert_allclose(new.v_start - params.v_start, [-1e-2, 1e-2], rtol=1e-6)
    np.testing.assert_allclose(new.v_end - params.v_end, [-1e-2, 0.0], rtol=1e-6)
    np.testing.assert_allclose(new.t_raw - params.t_raw, [1e-1], rtol=1e-4)
    assert state.step == 1


def test_adam_zero_gradient_leaves_params_and_decays_moments():
    params = _scalar_params(0.5)
    state = AdamState.zeros_like(params)
    state.m["v_start"][:] = 0.2
    state.v["v_start"][:] = 0.0
    zero = GradSet(np.zeros(2), np.zeros(2), np.zeros(1))
    state.m["v_start"][:] = 0.0
    new, st2 = adam_step(params, zero, state, 1e-3, 1e-3)
    for a, b in zip(new.arrays().values(), params.arrays().values()):
        np.testing.assert_array_equal(a, b)
    s = AdamState.zeros_like(params)
    s.v["t_raw"][:] = 4.0
    _, s2 = adam_step(params, zero, s, 1e-3, 1e-3)
    assert s2.v["t_raw"][0] == pytest.approx(4.0 * 0.999)


def test_adam_rates_scale_updates():
    params = _scalar_params(0.0)
    g = GradSet(np.array([1.0, 1.0]), np.array([1.0, 1.0]), np.array([1.0]))
    new, _ = adam_step(params, g, AdamState.zeros_like(params), 1e-3, 3e-3)
    step_p = params.v_start[0] - new.v_start[0]
    step_t = params.t_raw[0] - new.t_raw[0]
    assert step_t / step_p == pytest.approx(3.0, rel=1e-9)


def test_adam_rejects_nonpositive_rate():
    params = _scalar_params(0.0)
    g = GradSet(np.zeros(2), np.zeros(2), np.zeros(1))
    with pytest.raises(ValueError):
        adam_step(params, g, AdamState.zeros_like(params), 0.0, 1e-3)
