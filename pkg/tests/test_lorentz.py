import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmfgraph.lorentz import (INF, Vec3L, causal_class, homothety, is_inf, lorentz_wedge,
                              minkowski_inner, reflect_horizontal, rotate_vertical, stereographic,
                              stereographic_array)

coord = st.floats(-1e3, 1e3, allow_nan=False)
vec = st.tuples(coord, coord, coord)
cplx = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


def test_inner_signature():
    e1, e2, e3 = np.eye(3)
    assert minkowski_inner(e1, e1) == 1
    assert minkowski_inner(e2, e2) == 1
    assert minkowski_inner(e3, e3) == -1
    assert minkowski_inner(e1, e3) == 0


def test_inner_broadcasts():
    u = np.random.default_rng(0).normal(size=(5, 3))
    out = minkowski_inner(u, u)
    assert out.shape == (5,)
    assert np.allclose(out, u[:, 0] ** 2 + u[:, 1] ** 2 - u[:, 2] ** 2)


def test_causal_class():
    assert causal_class((1, 0, 0)) == "spacelike"
    assert causal_class((0, 0, 1)) == "timelike"
    assert causal_class((1, 0, 1)) == "lightlike"
    assert causal_class((0, 0, 0)) == "spacelike"
    assert causal_class((1, 0, 1.0 + 1e-12), atol=1e-9) == "lightlike"


@given(vec, vec, vec)
def test_wedge_defining_identity(u, v, w):
    lhs = minkowski_inner(lorentz_wedge(u, v), w)
    rhs = np.linalg.det(np.array([u, v, w]))
    assert math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-6 * (1 + np.abs([u, v, w]).max() ** 3))


@given(vec, vec)
def test_wedge_orthogonal_and_antisymmetric(u, v):
    c = lorentz_wedge(u, v)
    scale = 1 + np.abs(np.array([u, v])).max() ** 3
    assert abs(minkowski_inner(c, u)) <= 1e-9 * scale
    assert abs(minkowski_inner(c, v)) <= 1e-9 * scale
    assert np.allclose(c, -lorentz_wedge(v, u))


@given(cplx)
def test_stereographic_lands_on_hyperboloid(z):
    if abs(abs(z) - 1) < 1e-3:
        return
    n = stereographic(z)
    assert math.isclose(minkowski_inner(n, n), -1.0, rel_tol=1e-9, abs_tol=1e-9)
    # |z| < 1 gives the lower sheet, |z| > 1 the upper one
    assert (n.x3 < 0) == (abs(z) < 1)


def test_stereographic_special_points():
    assert stereographic(INF) == Vec3L(0.0, 0.0, 1.0)
    assert stereographic(0) == Vec3L(0.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        stereographic(1j)
    with pytest.raises(ValueError):
        stereographic_array(np.array([0.5, 1.0]))
    assert is_inf(INF) and not is_inf(0)


@settings(max_examples=50)
@given(st.lists(cplx, min_size=1, max_size=8))
def test_stereographic_array_matches_scalar(zs):
    zs = [z for z in zs if abs(abs(z) - 1) > 1e-3]
    if not zs:
        return
    arr = stereographic_array(np.array(zs))
    for z, row in zip(zs, arr):
        assert np.allclose(row, stereographic(z), rtol=1e-12, atol=1e-12)


@given(vec, vec, st.floats(-10, 10))
def test_similarities(u, v, angle):
    # vertical rotations and horizontal reflection are isometries of L^3
    ip = minkowski_inner(u, v)
    tol = 1e-9 * (1 + abs(ip) + np.dot(u, u) + np.dot(v, v))
    assert abs(minkowski_inner(rotate_vertical(u, angle), rotate_vertical(v, angle)) - ip) <= tol
    assert abs(minkowski_inner(reflect_horizontal(u), reflect_horizontal(v)) - ip) <= tol
    h = homothety(u, 2.0, center=v)
    assert np.allclose(h - np.asarray(v), 2.0 * (np.asarray(u) - np.asarray(v)))


def test_vec3l_arithmetic():
    a = Vec3L(1.0, 2.0, 3.0)
    assert a + (1, 1, 1) == Vec3L(2.0, 3.0, 4.0)
    assert a - a == Vec3L(0.0, 0.0, 0.0)
    assert a.scale(2) == Vec3L(2.0, 4.0, 6.0)
    assert Vec3L.of(np.array([1, 2, 3])) == a
