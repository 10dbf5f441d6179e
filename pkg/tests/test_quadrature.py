import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmfgraph.curve import CurveParams
from cmfgraph.quadrature import (AccuracyError, TrackedPath, adaptive_integral, cycle_period,
                                 integrate_form, integrate_path, period_set, winding_number)
from cmfgraph.weierstrass import Catenoid, RiemannFamily, StandoffError

R1 = RiemannFamily(CurveParams(1, (2.0,), (3.0,)))


def _circle(c, r, n=64):
    t = 2 * np.pi * np.arange(n + 1) / n
    pts = c + r * np.exp(1j * t)
    pts[-1] = pts[0]
    return list(pts)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=6),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_polynomials_against_antiderivative(coefs, a, b):
    if abs(b - a) < 1e-6:
        return
    f = np.polynomial.Polynomial(coefs)
    F = f.integ()
    res = adaptive_integral(lambda z, w: f(z)[None, :], [a, b], tol=1e-12)
    assert abs(res.value[0] - (F(b) - F(a))) <= 1e-10 * (1 + abs(F(b)) + abs(F(a)))


def test_residue_and_winding():
    res = adaptive_integral(lambda z, w: (1 / z)[None, :], _circle(0, 1), tol=1e-12)
    assert abs(res.value[0] - 2j * math.pi) < 1e-11
    assert math.isclose(winding_number(lambda z, w: z ** 3, _circle(0, 1)), 3.0, abs_tol=1e-12)
    assert math.isclose(winding_number(lambda z, w: z - 2, _circle(0, 1)), 0.0, abs_tol=1e-12)


def test_branch_tracking_end_oracle():
    # w = 1 - 1/(2z) + O(z^-2) at infinity, so a large ccw loop gives -pi i
    loop = _circle(1.0, 20.0, 32)
    w0 = R1.sheet_w(loop[0])
    res = adaptive_integral(lambda z, w: w[None, :], loop, 1e-12, radicand=R1.radicand, start_w=w0)
    assert abs(res.value[0] + 1j * math.pi) < 1e-10
    # the same integral, deformed onto the two cuts
    total = 0j
    for j in range(2):
        lp = R1.cycle_loop(j, 0.2)
        total += adaptive_integral(lambda z, w: w[None, :], lp, 1e-12, radicand=R1.radicand,
                                   start_w=R1.sheet_w(lp[0])).value[0]
    assert abs(total + 1j * math.pi) < 1e-10


def test_periods_are_imaginary_and_shape_independent():
    for j in range(R1.n_cycles):
        P1, _ = cycle_period(R1, j, 1e-12, standoff=0.1, shape="stadium")
        P2, _ = cycle_period(R1, j, 1e-12, standoff=0.2, shape="rectangle")
        assert np.allclose(P1, P2, atol=1e-10)
        assert max(abs(p.real) for p in P1) < 1e-10
    ps = period_set(R1)
    assert ps.certified()
    assert ps.max_real_ratio() < 1e-12
    with pytest.raises(IndexError):
        cycle_period(R1, 5)


def test_catenoid_vertical_period():
    P, _ = cycle_period(Catenoid(), 0, 1e-12)
    # int dz/z over the ccw unit circle is 2 pi i; g = z gives no horizontal period
    assert np.allclose(P, [0, 0, 2j * math.pi], atol=1e-11)


def test_deterministic_panels():
    path = TrackedPath(R1.cycle_loop(0, 0.1))
    a = integrate_path(R1, path, 1e-11, keep_panels=True)
    b = integrate_path(R1, path, 1e-11, keep_panels=True)
    assert a.n_panels == b.n_panels
    assert np.array_equal(a.value, b.value)
    assert all(np.array_equal(p.z, q.z) for p, q in zip(a.panels, b.panels))


def test_panel_cumulative_matches_partial_integrals():
    res = adaptive_integral(lambda z, w: np.stack([z ** 4, np.exp(z)]), [0, 1 + 1j], 1e-13,
                            keep_panels=True)
    p = res.panels[0]
    cum = p.cumulative()
    assert np.allclose(cum[0], (p.z ** 5 - p.a ** 5) / 5, atol=1e-12)
    assert np.allclose(cum[1], np.exp(p.z) - np.exp(p.a), atol=1e-12)


def test_errors():
    with pytest.raises(ValueError):
        TrackedPath([1.0])
    with pytest.raises(ValueError):
        TrackedPath([1.0, 1.0])
    with pytest.raises(StandoffError):
        integrate_path(R1, TrackedPath([2.5 + 1j, 2.5 - 1j]))
    with pytest.raises(AccuracyError):
        adaptive_integral(lambda z, w: (1 / np.sqrt(np.abs(z - 0.5) + 1e-14))[None, :] + 0j,
                          [0, 1], 1e-14, max_panels=8)
    with pytest.raises(ValueError):
        integrate_form(R1, 4, TrackedPath([5, 6]))
    v, _ = integrate_form(R1, 1, TrackedPath([5, 6]))
    assert abs(v + 2j) < 1e-12                     # phi1 = -2i dz for this family
