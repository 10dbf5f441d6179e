"""Runtime checks of the hypotheses behind the explicit graph construction.

1. g has degree n + 1 on the double: counted as the total winding of g along
   the singular cycles (oriented as the boundary of Omega), which equals the
   number of zeros of g in Omega including the end.  Each cycle must carry
   winding +-1 (g injective on the cycle).
2. phi3 has at most a double pole at the end (Laurent fit in a local chart).
3. phi3 vanishes in Omega exactly where g has zeros or poles: both zero sets
   are located by argument-principle moments over Omega and compared.

Logarithmic derivatives are taken by central differences with the sheet
continued to the neighbouring points, so any evaluator can be checked,
including corrupted ones.
"""

from __future__ import annotations

import numpy as np

from .curve import nearest_root
from .quadrature import AccuracyError, adaptive_integral
from .weierstrass import CorruptedEvaluator, StandoffError


class HypothesisError(RuntimeError):
    """The checks could not be carried out on any perturbed contour."""


def _dlog(ev, which: str):
    """(z, w) -> d/dz log F for F = g or phi3, by central differences."""
    fn = ev.g if which == "g" else ev.phi3

    def f(z, w):
        h = 1e-5 * (1 + np.abs(z))
        zp, zm = z + h, z - h
        if ev.branched:
            wp = nearest_root(ev.radicand(zp), w)
            wm = nearest_root(ev.radicand(zm), w)
        else:
            wp = wm = None
        return np.atleast_2d((fn(zp, wp) - fn(zm, wm)) / (2 * h * fn(z, w)))
    return f


def _moment_integrand(base, k_max, scale):
    def f(z, w):
        d = base(z, w)[0]
        u = z / scale
        return np.stack([d * u ** k for k in range(k_max + 1)])
    return f


def _contour_moments(ev, which, loops, k_max, tol, scale=1.0):
    """sum over signed loops of (1/2 pi i) oint (z/scale)^k F'/F dz, k = 0..k_max."""
    total = np.zeros(k_max + 1, dtype=complex)
    func = _moment_integrand(_dlog(ev, which), k_max, scale)
    for loop, sign in loops:
        w0 = ev.sheet_w(loop[0]) if ev.branched else None
        res = adaptive_integral(func, loop, tol, radicand=ev.radicand if ev.branched else None,
                                start_w=w0, rel_tol=tol, max_depth=24, max_panels=20000)
        total += sign * res.value
    return total / (2j * np.pi)


def _omega_loops(ev, standoff, big):
    """Oriented boundary of a compact piece of Omega (loops, orientation)."""
    loops = [(ev.cycle_loop(j, standoff), ev.cycle_sign) for j in range(ev.n_cycles)]
    loops.append((ev.end_loop(big, n=128), ev.end_sign))
    return loops


def _root_bound(ev) -> float:
    """Radius enclosing every finite zero of g (Cauchy bound on R(z) = 1)."""
    if not ev.branched:
        return 1.0
    p = ev.params
    num = np.poly(p.zeros)
    den = np.poly(p.poles)
    P = np.trim_zeros(np.polysub(num, den), "f")
    if len(P) <= 1:
        bound = 0.0
    else:
        bound = 1 + float(np.max(np.abs(P[1:] / P[0])))
    return max(bound, float(np.max(np.abs(p.branch_values))) + 1.0)


def _laurent_order(ev, n_pts: int = 32, k_lo: int = -4, k_hi: int = 12, thresh: float = 1e-6):
    """Pole order of phi3 at the end from a least-squares Laurent fit in t."""
    if ev.branched:
        rho1 = 1.0 / (8 * _root_bound(ev))
    else:
        rho1 = 0.25
    rows, vals = [], []
    for rho in (rho1, 0.5 * rho1):
        t = rho * np.exp(2j * np.pi * (np.arange(n_pts) + 0.5) / n_pts)
        if ev.branched:
            z = 1 / t
            w = ev.sheet_w(z)
            dens = -ev.phi3(z, w) / t ** 2
        else:
            dens = ev.phi3(t)
        rows.append(np.stack([t ** k for k in range(k_lo, k_hi + 1)], axis=1))
        vals.append(dens)
    A = np.concatenate(rows)
    y = np.concatenate(vals)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    ks = np.arange(k_lo, k_hi + 1)
    mag = np.abs(coef) * rho1 ** ks.astype(float)
    mag = mag / mag.max()
    neg = [int(-k) for k, m in zip(ks, mag) if k < 0 and m > thresh]
    order = max(neg) if neg else 0
    return order, {int(k): float(m) for k, m in zip(ks, mag) if k < 0}


def validate_hypotheses(ev, tol: float = 1e-8, attempts: int = 3) -> dict:
    """Check the three hypotheses numerically; see the module docstring.

    ``tol`` is the quadrature tolerance of the contour integrals.  The finite
    difference derivative limits it to about 1e-9, which is ample since only
    integers and low moments are read off.
    """
    expected_degree = ev.n_cycles if ev.kind == "riemann" else getattr(ev, "m", 1)
    base_standoff = 0.05 * ev.params.min_gap if ev.branched else 0.05
    base_big = 2 * _root_bound(ev) if ev.branched else 0.02
    last_err = None
    for attempt in range(attempts):
        standoff = base_standoff * (1.37 ** attempt)
        big = base_big * (1.13 ** attempt) if ev.branched else base_big / (1.13 ** attempt)
        try:
            return _validate_once(ev, tol, standoff, big, expected_degree)
        except (AccuracyError, StandoffError, _Retry) as exc:
            last_err = exc
    raise HypothesisError(f"hypothesis checks failed on {attempts} perturbed contours: {last_err}")


class _Retry(Exception):
    pass


def _validate_once(ev, tol, standoff, big, expected_degree):
    checks = []

    # (1) degree via windings of g along the singular cycles
    windings = []
    for j in range(ev.n_cycles):
        m = _contour_moments(ev, "g", [(ev.cycle_loop(j, standoff), 1)], 0, tol)
        windings.append(m[0])
    resid = max(abs(wv.real - round(wv.real)) + abs(wv.imag) for wv in windings)
    if resid >= 0.1:
        raise _Retry(f"non-integer winding (residual {resid:.3g})")
    wint = [int(round(wv.real)) for wv in windings]
    degree = int(sum(ev.cycle_sign * wv for wv in wint))
    injective = all(abs(wv) == 1 for wv in wint)
    checks.append({"name": "degree", "passed": bool(degree == expected_degree and injective),
                   "value": degree, "expected": int(expected_degree),
                   "cycle_windings": wint, "residual": float(resid)})

    # (2) pole order of phi3 at the end
    order, mags = _laurent_order(ev)
    checks.append({"name": "end_pole_order", "passed": bool(order <= 2), "value": int(order),
                   "expected": "<= 2", "tail": mags})

    # (3) zeros of phi3 in Omega against zeros and poles of g
    loops = _omega_loops(ev, standoff, big)
    k_max = 4
    scale = max(1.0, big)
    mf = _contour_moments(ev, "phi3", loops, k_max, tol, scale)
    mg = _contour_moments(ev, "g", loops, k_max, tol, scale)
    rf = abs(mf[0].real - round(mf[0].real)) + abs(mf[0].imag)
    rg = abs(mg[0].real - round(mg[0].real)) + abs(mg[0].imag)
    if max(rf, rg) >= 0.1:
        raise _Retry("non-integer zero count")
    nf, ng = int(round(mf[0].real)), int(round(mg[0].real))
    # g has no poles in Omega (|g| < 1), so its signed count is its zero count
    kk = min(k_max, max(nf, ng, 1))
    mom_diff = max(abs(mf[k] - mg[k]) for k in range(1, kk + 1))
    ok3 = nf == ng and mom_diff < 1e-4
    checks.append({"name": "phi3_zeros_at_g_zeros_poles", "passed": bool(ok3),
                   "phi3_zero_count": nf, "g_zero_count": ng,
                   "moment_mismatch": float(mom_diff)})
    return {"evaluator": repr(ev), "hypotheses": checks,
            "passed": all(c["passed"] for c in checks),
            "contour": {"standoff": float(standoff), "outer": float(big)}}


def corrupted(ev, z0: complex) -> CorruptedEvaluator:
    return CorruptedEvaluator(ev, z0)
