import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geocurve.errors import DegenerateVector, DimensionMismatch
from geocurve.preshape import (
    center, duplicate, geodesic_distance, is_preshape, normalize, project, project_rows,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
raw_vectors = st.integers(2, 64).flatmap(lambda d: arrays(np.float64, d, elements=finite))


def pairs(x):
    return np.asarray(x, dtype=float).reshape(-1, 2)


@pytest.mark.parametrize("v, expected", [
    ([1, 3], [[1, 1], [3, 3]]),
    ([0, 0], [[0, 0], [0, 0]]),
    ([2, -1, 5], [[2, 2], [-1, -1], [5, 5]]),
])
def test_duplicate(v, expected):
    np.testing.assert_array_equal(pairs(duplicate(v)), expected)


@pytest.mark.parametrize("p, expected", [
    ([[1, 1], [3, 3]], [[-1, -1], [1, 1]]),
    ([[0, 0], [0, 0]], [[0, 0], [0, 0]]),
    ([[2, 2], [-1, -1], [5, 5]], [[0, 0], [-3, -3], [3, 3]]),
])
def test_center(p, expected):
    np.testing.assert_allclose(pairs(center(np.ravel(p))), expected, atol=1e-12)


def test_normalize_examples():
    np.testing.assert_allclose(pairs(normalize([-1, -1, 1, 1])), [[-0.5, -0.5], [0.5, 0.5]], atol=1e-15)
    with pytest.raises(DegenerateVector):
        normalize([0.0, 0.0, 0.0, 0.0])
    tau = project([0.3, -2.0, 1.1])
    np.testing.assert_allclose(normalize(tau), tau, atol=1e-15)


def test_project_examples():
    np.testing.assert_allclose(pairs(project([1, 3])), [[-0.5, -0.5], [0.5, 0.5]], atol=1e-15)
    np.testing.assert_allclose(pairs(project([3, 1])), [[0.5, 0.5], [-0.5, -0.5]], atol=1e-15)
    with pytest.raises(DegenerateVector):
        project([4.2] * 7)


def test_project_rejects_bad_input():
    with pytest.raises(DimensionMismatch):
        project([1.0])
    with pytest.raises(ValueError):
        project([1.0, np.nan])


def test_geodesic_distance_examples():
    tau = project([1, 3, 0, 2])
    assert geodesic_distance(tau, tau) == pytest.approx(0.0, abs=1e-7)
    assert geodesic_distance(project([1, 3]), project([3, 1])) == pytest.approx(np.pi, abs=1e-15)
    a = project([1, -1, 0, 0])
    b = project([0, 0, 1, -1])
    assert np.dot(a, b) == 0.0
    assert geodesic_distance(a, b) == pytest.approx(np.pi / 2, abs=1e-15)
    with pytest.raises(DimensionMismatch):
        geodesic_distance(a, project([1, 2]))


def test_project_rows_matches_project(rng):
    V = rng.normal(size=(7, 11))
    P = project_rows(V)
    for v, p in zip(V, P):
        np.testing.assert_allclose(p, project(v), atol=1e-15)
    V[3] = 2.0
    with pytest.raises(DegenerateVector, match="row 3"):
        project_rows(V)


@given(raw_vectors)
def test_projection_lands_on_preshape_sphere(v):
    assume(np.ptp(v) > 1e-6)
    tau = project(v)
    means = pairs(tau).mean(axis=0)
    assert np.all(np.abs(means) <= 1e-12)
    assert abs(np.linalg.norm(tau) - 1.0) <= 1e-12


@given(raw_vectors, st.floats(1e-3, 1e3), st.floats(-1e3, 1e3))
def test_projection_shift_scale_invariance(v, a, b):
    assume(np.ptp(v) > 1e-3 * (1 + np.max(np.abs(v))))
    np.testing.assert_allclose(project(a * v + b), project(v), atol=1e-9)


@given(raw_vectors)
def test_reprojection_is_idempotent(v):
    assume(np.ptp(v) > 1e-6)
    tau = project(v)
    np.testing.assert_allclose(normalize(center(tau)), tau, atol=1e-12)
    assert is_preshape(tau)


@given(st.integers(2, 32), st.integers(0, 2**32 - 1))
def test_geodesic_distance_is_a_metric(d, seed):
    r = np.random.default_rng(seed)
    a, b, c = (project(r.normal(size=d)) for _ in range(3))
    dab, dba = geodesic_distance(a, b), geodesic_distance(b, a)
    assert dab == dba
    assert 0.0 <= dab <= np.pi
    # arccos near 1 is only good to about sqrt(machine eps)
    assert geodesic_distance(a, c) <= dab + geodesic_distance(b, c) + 1e-7
