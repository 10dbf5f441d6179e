import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmfgraph.domain import (CERT_TOL, Divisor, DomainError, DomainParams, b_paths,
                             domain_certificates, eta_basis, form_report, harmonic_measure,
                             harmonic_solve, kappa_form, period_matrix, random_domain, tau_form,
                             write_period_csv)

from helpers import divisor_points
from oracles import annulus_harmonic_measure, annulus_period

V1 = DomainParams((3.0,), (0.5,))
SYM = DomainParams((3.0, -4.0), (0.5, 0.8))       # symmetric under z -> conj z


def test_validation():
    with pytest.raises(DomainError):
        DomainParams((1.2,), (0.5,))              # overlaps the unit disk
    with pytest.raises(DomainError):
        DomainParams((3.0 + 1j,), (0.5,))         # c1 must be real
    with pytest.raises(DomainError):
        DomainParams((3.0,), (-0.5,))
    with pytest.raises(DomainError):
        DomainParams((3.0, 3.5), (0.5, 0.5))      # disks overlap each other
    with pytest.raises(DomainError):
        DomainParams((3.0,), (0.5, 0.2))
    assert V1.in_omega(10) and not V1.in_omega(0.5) and not V1.in_omega(3.2)
    assert V1.eps_div == pytest.approx(0.01)


def test_harmonic_measure_oracle():
    h = harmonic_measure(V1, 1)
    rng = np.random.default_rng(0)
    z = 5 * rng.normal(size=200) + 5j * rng.normal(size=200)
    z = z[[V1.in_omega(p) for p in z]]
    assert np.max(np.abs(h(z) - annulus_harmonic_measure(3.0, 0.5, z))) < 1e-12
    assert h.misfit < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_harmonic_measures_sum_and_maximum_principle(seed, n):
    v = random_domain(np.random.default_rng(seed), n)
    hs = [harmonic_measure(v, j) for j in range(n + 1)]
    z = divisor_points(v, np.random.default_rng(seed + 1), 6, clear=0.05, ratio=1.0)
    vals = np.array([h(np.array(z)) for h in hs])
    # h_0 + ... + h_n = 1 and each 0 < h_j < 1 inside
    assert np.max(np.abs(vals.sum(axis=0) - 1)) < 1e-7
    assert np.all(vals > -1e-8) and np.all(vals < 1 + 1e-8)


def test_convergence_in_K():
    v = random_domain(np.random.default_rng(4), 2)
    misfits = [harmonic_measure(v, 1, K).misfit for K in (4, 8, 16)]
    assert misfits[1] < 0.1 * misfits[0]
    assert misfits[2] < 0.1 * misfits[1]
    low = harmonic_solve(v, [0.0, 1.0, 0.0], K=2)
    assert any("below the recommended" in w for w in low.warnings)
    with pytest.raises(DomainError):
        harmonic_solve(v, [0.0, 1.0, 0.0], K=0)
    with pytest.raises(DomainError):
        harmonic_solve(v, [0.0, 1.0], K=8)


def test_period_matrix_n1_oracle():
    pm = period_matrix(V1)
    assert abs(pm.Pi[0, 0] - annulus_period(3.0, 0.5)) < 1e-10
    assert pm.route_mismatch < 1e-10 and pm.representative_mismatch < 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_period_matrix_symmetric_imaginary_negative_definite(seed):
    v = random_domain(np.random.default_rng(50 + seed), 2 + seed % 2)
    pm = period_matrix(v)
    assert pm.max_real <= CERT_TOL and pm.asymmetry <= CERT_TOL
    assert pm.route_mismatch <= CERT_TOL and pm.representative_mismatch <= CERT_TOL
    assert np.max(np.linalg.eigvalsh(pm.Pi.imag)) < 0


def test_symmetric_domain_has_real_data():
    basis = eta_basis(SYM)
    # eta = i * (form with real coefficients): a-periods real, Pi imaginary
    assert all((f * -1j).coefficients_real() for f in basis.forms)
    assert all(h.dz_form().coefficients_real() for h in basis.measures)
    z = np.array([0.5 + 2j, 7 - 3j, -2 + 1.5j])
    for f in basis.forms:
        assert np.allclose(f(np.conj(z)), -np.conj(f(z)), atol=1e-12)


def test_eta_mirror_identity():
    v = random_domain(np.random.default_rng(9), 3)
    basis = eta_basis(v)
    assert max(f.mirror_residual("imag") for f in basis.forms) < 1e-6
    assert np.max(np.abs(basis.duality_matrix() - np.eye(3))) < 1e-10


@pytest.mark.parametrize("mult", [1, 2, 3])
def test_tau_residues_and_periods(mult):
    v = random_domain(np.random.default_rng(21), 2)
    w = divisor_points(v, np.random.default_rng(mult), 2)
    D = Divisor(((w[0], mult), (w[1], 1)))
    rep = form_report(tau_form(v, D))
    assert rep["passed"], rep
    assert rep["residues"]["max_error"] < 1e-10
    assert rep["a_periods"]["max"] < 1e-10


def test_kappa_swap_antisymmetry_and_residues():
    basis = eta_basis(SYM)
    D1 = Divisor(((2 + 3j, 2),))
    D2 = Divisor(((-1 - 4j, 1), (6 + 1j, 3)))
    k12 = kappa_form(SYM, D1, D2, basis=basis)
    k21 = kappa_form(SYM, D2, D1, basis=basis)
    z = np.array([0.5 + 2j, 7 - 3j, -6 + 0.5j])
    assert np.max(np.abs(k12(z) + k21(z))) < 1e-12
    assert abs(k12.residue(2 + 3j, 0.05) + 2) < 1e-12
    assert abs(k12.residue(6 + 1j, 0.05) - 3) < 1e-12
    rep = form_report(k12)
    assert rep["passed"], rep


def test_divisor_validation():
    with pytest.raises(DomainError):
        Divisor(((5.0, 0),))
    with pytest.raises(DomainError):
        Divisor(((3.505, 1),)).validate(V1)       # within eps_div of a_1
    with pytest.raises(DomainError):
        Divisor(((0.5, 1),)).validate(V1)         # inside the unit disk
    with pytest.raises(DomainError):
        Divisor(((5.0, 1), (5.001, 1))).validate(V1)
    with pytest.raises(DomainError):
        kappa_form(V1, Divisor(((5.0, 1),)), Divisor(((5.0, 1),)))
    assert Divisor(((5.0, 2), (6j, 1))).degree == 3


def test_b_paths_stay_in_domain():
    v = DomainParams((4.0, 2.0 + 0.0j + 2.5j), (0.5, 0.4))
    for j in (1, 2):
        reps = b_paths(v, j)
        assert len(reps) == 2
        for verts in reps:
            assert abs(abs(verts[0]) - 1) < 1e-12
            assert abs(abs(verts[-1] - v.centers[j]) - v.radii[j]) < 1e-12
            for a, b in zip(verts[:-1], verts[1:]):
                t = np.linspace(0.01, 0.99, 200)
                assert all(v.in_omega(p) for p in a + t * (b - a))


def test_blocked_straight_path_uses_detour():
    # a_2 sits right behind a_1 as seen from the unit circle
    v = DomainParams((2.5, 5.0), (0.6, 0.6))
    reps = b_paths(v, 2)
    assert all(len(verts) == 3 for verts in reps)
    pm = period_matrix(v)
    assert pm.representative_mismatch < 1e-8 and pm.asymmetry < 1e-8


def test_certificates_and_csv(tmp_path):
    rep = domain_certificates(V1, 24, [Divisor(((5.0 + 2j, 3),))],
                              [(Divisor(((-4.0, 1),)), Divisor(((4j, 2),)))])
    assert rep["passed"]
    Pi = rep.pop("_Pi")
    path = tmp_path / "pi.csv"
    write_period_csv(Pi, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "re_1,im_1"
    re, im = (float(x) for x in lines[1].split(","))
    assert complex(re, im) == Pi[0, 0]
    low = domain_certificates(V1, 2)
    assert not low["passed"] and not low["certificates"]["misfit"]["passed"]
    assert math.isfinite(low["certificates"]["misfit"]["value"])
