import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmfgraph.curve import (ContinuationError, CurveError, CurveParams, SheetPoint, continue_branch,
                            eval_R, fixed_locus_intervals, involution_J, is_fixed_by_J,
                            nearest_root, random_interlaced_params)
from cmfgraph.lorentz import INF


def test_validation():
    with pytest.raises(CurveError):
        CurveParams(1, (2.0,), (2.0,))          # coincident
    with pytest.raises(CurveError):
        CurveParams(1, (1.0,), (3.0,))          # clashes with the fixed zero 1
    with pytest.raises(CurveError):
        CurveParams(2, (2.0,), (3.0,))          # wrong length
    with pytest.raises(CurveError):
        CurveParams(0, (), ())
    with pytest.raises(CurveError):
        CurveParams(1, (float("nan"),), (3.0,))


def test_eval_R_and_poles():
    p = CurveParams(1, (2.0,), (3.0,))
    z = 0.5 + 0.25j
    assert np.isclose(eval_R(p, z), (z - 1) * (z - 2) / ((z + 1) * (z - 3)))
    assert eval_R(p, -1.0) is INF
    assert eval_R(p, INF) == 1.0
    assert eval_R(p, np.array([0.0, 4.0])).shape == (2,)


def test_intervals_and_interlacing():
    p = CurveParams(1, (2.0,), (3.0,))
    ivs = fixed_locus_intervals(p)
    assert [(iv.lo, iv.hi) for iv in ivs] == [(-1.0, 1.0), (2.0, 3.0)]
    assert ivs[0].contains(1.0) and not ivs[0].wraps
    assert p.is_interlaced()
    assert p.log_growth == 2 + 2 - 3
    assert not CurveParams(1, (0.5,), (-2.0,)).is_interlaced()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_random_params_are_interlaced(seed, n):
    p = random_interlaced_params(np.random.default_rng(seed), n)
    assert p.is_interlaced()
    ivs = fixed_locus_intervals(p)
    assert len(ivs) == n + 1
    # R <= 0 exactly on the intervals along the real line
    xs = np.linspace(p.branch_values[0] - 2, p.branch_values[-1] + 2, 997)
    xs = xs[np.min(np.abs(xs[:, None] - p.branch_values[None, :]), axis=1) > 1e-6]
    inside = np.array([any(iv.contains(x) for iv in ivs) for x in xs])
    assert np.all((eval_R(p, xs).real < 0) == inside)


@given(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False))
def test_nearest_root(r, ref):
    w = complex(nearest_root(r, ref))
    assert abs(w * w - r) <= 1e-9 * (1 + abs(r))
    assert abs(w - ref) <= abs(-w - ref) + 1e-12


def test_continuation_around_branch_point_flips_sheet():
    p = CurveParams(1, (2.0,), (3.0,))
    z0 = 4.0 + 0j
    w0 = np.sqrt(complex(eval_R(p, z0)))
    # a loop around the single branch point 3 changes sheets
    loop = [z0, 3 + 1j, 2.5 + 0j, 3 - 1j, z0]
    assert np.isclose(continue_branch(p, loop, w0), -w0)
    # a loop around the whole cut [2, 3] does not
    loop = [z0, 3 + 1j, 1.5 + 1j, 1.5 - 1j, 3 - 1j, z0]
    assert np.isclose(continue_branch(p, loop, w0), w0)
    with pytest.raises(ContinuationError):
        continue_branch(p, [z0, 3.0 + 1e-7j], w0)
    with pytest.raises(CurveError):
        continue_branch(p, [z0, 5.0], -2 * w0)


def test_involution():
    p = CurveParams(1, (2.0,), (3.0,))
    z = 0.3 + 0.4j
    q = SheetPoint(z, np.sqrt(complex(eval_R(p, z))))
    assert q.residual(p) < 1e-14
    Jq = involution_J(q)
    assert Jq.residual(p) < 1e-14
    assert involution_J(Jq) == q
    # fixed points of J sit over the real intervals where R <= 0
    x = 2.5
    assert is_fixed_by_J(p, SheetPoint(complex(x), np.sqrt(complex(eval_R(p, x)))))
    assert not is_fixed_by_J(p, q)
