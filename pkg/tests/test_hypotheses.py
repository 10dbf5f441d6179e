import numpy as np
import pytest

from cmfgraph.curve import CurveParams, random_interlaced_params
from cmfgraph.hypotheses import corrupted, validate_hypotheses
from cmfgraph.weierstrass import Catenoid, RiemannFamily


def _by_name(rep):
    return {c["name"]: c for c in rep["hypotheses"]}


def test_explicit_family_passes():
    rep = validate_hypotheses(RiemannFamily(CurveParams(1, (2.0,), (3.0,))))
    assert rep["passed"]
    h = _by_name(rep)
    assert h["degree"]["value"] == 2
    assert h["end_pole_order"]["value"] <= 2
    assert h["phi3_zeros_at_g_zeros_poles"]["phi3_zero_count"] == \
        h["phi3_zeros_at_g_zeros_poles"]["g_zero_count"]


@pytest.mark.parametrize("seed", [1, 2])
def test_random_n2_passes(seed):
    ev = RiemannFamily(random_interlaced_params(np.random.default_rng(seed), 2))
    rep = validate_hypotheses(ev)
    assert rep["passed"], rep
    assert _by_name(rep)["degree"]["value"] == 3


def test_catenoid_passes():
    rep = validate_hypotheses(Catenoid())
    assert rep["passed"]
    assert _by_name(rep)["degree"]["value"] == 1


@pytest.mark.parametrize("z0", [5 + 1j, -3 - 2j])
def test_corrupted_data_fail_zero_matching(z0):
    ev = corrupted(RiemannFamily(CurveParams(1, (2.0,), (3.0,))), z0)
    rep = validate_hypotheses(ev)
    assert not rep["passed"]
    h = _by_name(rep)
    assert not h["phi3_zeros_at_g_zeros_poles"]["passed"]
    assert h["phi3_zeros_at_g_zeros_poles"]["phi3_zero_count"] == \
        h["phi3_zeros_at_g_zeros_poles"]["g_zero_count"] + 1


def test_non_interlaced_parameters_fail_degree():
    ev = RiemannFamily(CurveParams(1, (0.5,), (-2.0,)), strict=False)
    rep = validate_hypotheses(ev)
    assert not _by_name(rep)["degree"]["passed"]
