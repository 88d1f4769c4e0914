import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geocurve.errors import DegenerateCurve, DimensionMismatch, OutOfRange
from geocurve.geodesic import gamma, interp, interp_batch, make_curve, position
from geocurve.preshape import geodesic_distance, project
from geocurve.selfcheck import random_curve


@pytest.fixture
def ortho():
    a = project([1, -1, 0, 0])
    b = project([0, 0, 1, -1])
    return make_curve(a, b)


def test_make_curve_rejects_degenerate_endpoints():
    tau = project([1, 3, 0, 2])
    with pytest.raises(DegenerateCurve):
        make_curve(tau, tau)
    with pytest.raises(DegenerateCurve):
        make_curve(project([1, 3]), project([3, 1]))
    with pytest.raises(DimensionMismatch):
        make_curve(tau, project([1, 2]))


def test_orthogonal_curve(ortho):
    assert ortho.theta == pytest.approx(np.pi / 2, abs=1e-15)
    np.testing.assert_allclose(gamma(ortho, np.pi / 4), (ortho.tau_start + ortho.tau_end) / np.sqrt(2), atol=1e-15)


def test_endpoints(ortho):
    np.testing.assert_allclose(gamma(ortho, 0.0), ortho.tau_start, atol=1e-15)
    np.testing.assert_allclose(gamma(ortho, ortho.theta), ortho.tau_end, atol=1e-15)
    np.testing.assert_allclose(interp(ortho, 0.0), ortho.tau_start, atol=1e-15)
    np.testing.assert_allclose(interp(ortho, 1.0), ortho.tau_end, atol=1e-15)


def test_out_of_range(ortho):
    with pytest.raises(OutOfRange):
        gamma(ortho, ortho.theta + 1e-3)
    with pytest.raises(OutOfRange):
        interp(ortho, -0.1)
    with pytest.raises(OutOfRange):
        interp_batch(ortho, [0.5, 1.2])


def test_curve_is_immutable(ortho):
    with pytest.raises(ValueError):
        ortho.tau_start[0] = 1.0


def test_interp_batch(ortho):
    M = interp_batch(ortho, [0.0, 1.0])
    np.testing.assert_allclose(M[:, 0], ortho.tau_start, atol=1e-15)
    np.testing.assert_allclose(M[:, 1], ortho.tau_end, atol=1e-15)
    assert interp_batch(ortho, []).shape == (ortho.dim, 0)
    M = interp_batch(ortho, [0.5, 0.5])
    np.testing.assert_array_equal(M[:, 0], M[:, 1])
    np.testing.assert_array_equal(M[:, 0], interp(ortho, 0.5))


curve_cases = st.tuples(st.sampled_from([3, 4, 16, 64]), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))


@given(curve_cases)
def test_parameterizations_agree(case):
    d, seed, z = case
    curve = random_curve(np.random.default_rng(seed), d)
    assert np.max(np.abs(gamma(curve, z * curve.theta) - interp(curve, z))) <= 1e-10


@given(curve_cases)
def test_interp_stays_on_sphere_and_curve(case):
    d, seed, z = case
    curve = random_curve(np.random.default_rng(seed), d)
    p = interp(curve, z)
    assert abs(np.linalg.norm(p) - 1.0) <= 1e-10
    assert np.all(np.abs(p.reshape(-1, 2).mean(axis=0)) <= 1e-10)
    d0 = geodesic_distance(curve.tau_start, p)
    d1 = geodesic_distance(p, curve.tau_end)
    # arccos loses ~sqrt(eps) right at the endpoints
    assert abs(d0 + d1 - curve.theta) <= 1e-9 or min(d0, d1) < 1e-6
    assert abs(d0 - z * curve.theta) <= 1e-9 or d0 < 1e-6
    assert position(curve, p) == pytest.approx(z, abs=1e-6)
