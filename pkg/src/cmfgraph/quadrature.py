"""Adaptive Gauss-Kronrod integration of the Weierstrass forms along polylines.

The branch of w = sqrt(R) is carried through every panel: within a panel the
root nearest the value at the panel start is taken at each node, and a panel
whose values jump by more than half their size is bisected before any error
test.  Subdivision is depth first, left half before right half, so the
sequence of panels (and every floating point operation) is fixed by the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre

from .curve import nearest_root, _segment_clearance

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
WK = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
# Gauss nodes sit at the odd positions of the ascending 15-point list
_GIDX = np.array([1, 3, 5, 7, 9, 11, 13])
WG = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])


def _cumulative_matrix() -> np.ndarray:
    """S with (S f)_i = integral from -1 to NODES[i] of the interpolant of f."""
    V = legendre.legvander(NODES, 14)
    Q = np.empty_like(V)
    for j in range(15):
        c = np.zeros(15)
        c[j] = 1.0
        ic = legendre.legint(c, lbnd=-1.0)
        Q[:, j] = legendre.legval(NODES, ic)
    return Q @ np.linalg.inv(V)


CUMULATIVE = _cumulative_matrix()


class AccuracyError(RuntimeError):
    """Tolerance not reached; carries the best estimate."""

    def __init__(self, msg, value=None, error=None):
        super().__init__(msg)
        self.value = value
        self.error = error


@dataclass
class TrackedPath:
    vertices: Sequence[complex]
    start_w: complex | None = None
    refinement: float | None = None
    allow_cut_crossing: bool = False

    def __post_init__(self):
        v = [complex(x) for x in self.vertices]
        if len(v) < 2:
            raise ValueError("a path needs at least two vertices")
        for a, b in zip(v[:-1], v[1:]):
            if a == b:
                raise ValueError("consecutive path vertices must be distinct")
        self.vertices = v

    def reversed(self, end_w=None) -> "TrackedPath":
        return TrackedPath(self.vertices[::-1], end_w, self.refinement, self.allow_cut_crossing)

    @property
    def length(self) -> float:
        v = np.asarray(self.vertices)
        return float(np.sum(np.abs(np.diff(v))))

    def segments(self):
        """Vertices split so that no piece is longer than ``refinement``."""
        out = [self.vertices[0]]
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            m = 1
            if self.refinement:
                m = max(1, int(np.ceil(abs(b - a) / self.refinement)))
            for i in range(1, m + 1):
                out.append(a + (b - a) * i / m)
        return out


@dataclass
class Panel:
    a: complex
    b: complex
    z: np.ndarray       # 15 Kronrod nodes
    w: np.ndarray | None
    f: np.ndarray       # (m, 15) integrand values
    dzw: np.ndarray     # complex weights so that sum(f * dzw) = integral

    @property
    def half(self) -> complex:
        return 0.5 * (self.b - self.a)

    def cumulative(self) -> np.ndarray:
        """Integral from a to each node, shape (m, 15)."""
        return self.half * (self.f @ CUMULATIVE.T)


@dataclass
class PathIntegral:
    value: np.ndarray
    error: np.ndarray
    end_w: complex | None
    panels: list | None = None
    n_panels: int = 0


@dataclass
class PeriodSet:
    """a-cycle periods (P1, P2, P3) per cycle, each with an error estimate."""

    periods: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    tol: float = 1e-10

    def max_real_ratio(self) -> float:
        worst = 0.0
        for P in self.periods:
            for p in P:
                worst = max(worst, abs(p.real) / (1 + abs(p)))
        return worst

    def certified(self, bound: float | None = None) -> bool:
        if bound is None:
            # never ask for more than round-off allows
            bound = max(10 * self.tol, 1e3 * np.finfo(float).eps)
        return self.max_real_ratio() <= bound


def adaptive_integral(func: Callable, vertices: Sequence[complex], tol: float = 1e-10,
                      radicand: Callable | None = None, start_w=None,
                      keep_panels: bool = False, max_depth: int = 40,
                      max_panels: int = 200000, rel_tol: float = 0.0) -> PathIntegral:
    """Integrate func(z, w) -> (m, N) along a polyline in the z-plane.

    When ``radicand`` is given, w is continued from ``start_w`` as a square
    root of radicand(z).  The absolute tolerance is shared between pieces in
    proportion to their length.
    """
    verts = [complex(v) for v in vertices]
    total = sum(abs(b - a) for a, b in zip(verts[:-1], verts[1:]))
    if total == 0:
        raise ValueError("degenerate path")
    branched = radicand is not None
    w_cur = complex(start_w) if branched else None
    acc = None
    err = None
    panels = [] if keep_panels else None
    state = {"count": 0, "failed": False}

    def kronrod(a, b, w_a):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        z = mid + half * NODES
        w = None
        if branched:
            r = radicand(z)
            w = np.empty(15, dtype=complex)
            prev = w_a
            # march through the nodes in order so each pick is local
            for i in range(15):
                w[i] = nearest_root(r[i], prev)
                if abs(w[i] - prev) >= 0.5 * abs(prev):
                    return None
                prev = w[i]
        f = np.atleast_2d(func(z, w))
        return z, w, f, half

    def recurse(a, b, w_a, depth):
        nonlocal acc, err
        out = kronrod(a, b, w_a)
        if out is None:
            if depth >= max_depth:
                raise AccuracyError("branch tracking failed: cannot resolve the square root "
                                    "near %r" % (0.5 * (a + b)), acc, err)
            m = 0.5 * (a + b)
            w_m = recurse(a, m, w_a, depth + 1)
            return recurse(m, b, w_m, depth + 1)
        z, w, f, half = out
        K = half * (f @ WK)
        G = half * (f[:, _GIDX] @ WG)
        e = np.abs(K - G)
        allowed = tol * abs(b - a) / total
        floor = 50 * np.finfo(float).eps * np.abs(half) * (np.abs(f) @ WK)
        ok = np.all(e <= np.maximum(max(allowed, rel_tol * np.max(np.abs(K))), floor))
        if not ok and depth < max_depth and state["count"] < max_panels:
            m = 0.5 * (a + b)
            w_m = recurse(a, m, w_a, depth + 1)
            return recurse(m, b, w_m, depth + 1)
        if not ok:
            state["failed"] = True
        state["count"] += 1
        acc = K if acc is None else acc + K
        err = e if err is None else err + e
        if panels is not None:
            panels.append(Panel(a, b, z, w, f, half * WK))
        if not branched:
            return None
        return complex(nearest_root(radicand(b), w[-1]))

    for a, b in zip(verts[:-1], verts[1:]):
        w_cur = recurse(a, b, w_cur, 0)
    if state["failed"]:
        raise AccuracyError(f"tolerance {tol:g} not reached within subdivision limits "
                            f"(estimated error {np.max(err):.3g})", acc, err)
    return PathIntegral(acc, err, w_cur, panels, state["count"])


def _check_path(ev, path: TrackedPath, eps: float | None):
    eps = ev.eps if eps is None else eps
    pts = ev.avoid_points
    verts = path.vertices
    for a, b in zip(verts[:-1], verts[1:]):
        if len(pts) and _segment_clearance(a, b, pts) < eps:
            from .weierstrass import StandoffError
            raise StandoffError(f"segment {a} -> {b} passes within {eps:g} of a singular value")
        if not path.allow_cut_crossing:
            ev.check_segment(a, b)


def integrate_path(ev, path: TrackedPath, tol: float = 1e-10, keep_panels: bool = False,
                   eps: float | None = None, **kw) -> PathIntegral:
    """All three Weierstrass forms along ``path`` in one pass."""
    _check_path(ev, path, eps)
    start_w = path.start_w
    if ev.branched and start_w is None:
        start_w = ev.sheet_w(path.vertices[0])
    return adaptive_integral(ev.forms, path.segments(), tol,
                             radicand=ev.radicand if ev.branched else None,
                             start_w=start_w, keep_panels=keep_panels, **kw)


def integrate_form(ev, which: int, path: TrackedPath, tol: float = 1e-10):
    """Integral of phi_which (1, 2 or 3) along the path: (value, error estimate)."""
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    res = integrate_path(ev, path, tol)
    return complex(res.value[which - 1]), float(res.error[which - 1])


def cycle_period(ev, j: int, tol: float = 1e-10, standoff: float | None = None,
                 shape: str = "stadium"):
    """Periods of (phi1, phi2, phi3) over the ccw loop around singular cycle j."""
    if not 0 <= j < ev.n_cycles:
        raise IndexError(f"cycle index {j} out of range")
    s = 2 * ev.eps if standoff is None else standoff
    if ev.branched:
        loop = ev.cycle_loop(j, s, shape=shape)
    else:
        loop = ev.cycle_loop(j, max(s, 1e-2))
    res = integrate_path(ev, TrackedPath(loop), tol, eps=0.5 * s)
    return tuple(complex(v) for v in res.value), res.error


def period_set(ev, tol: float = 1e-10, **kw) -> PeriodSet:
    ps = PeriodSet(tol=tol)
    for j in range(ev.n_cycles):
        P, e = cycle_period(ev, j, tol, **kw)
        ps.periods.append(P)
        ps.errors.append(e)
    return ps


def winding_number(func: Callable, vertices: Sequence[complex], radicand: Callable | None = None,
                   start_w=None, max_step: float = np.pi / 8, max_points: int = 2_000_000) -> float:
    """Winding of func(z, w) around 0 along a closed polyline, by arg unwrapping.

    Consecutive samples are refined until their arguments differ by less
    than ``max_step``; the returned value is real so callers can test how
    close it is to an integer.
    """
    verts = [complex(v) for v in vertices]
    total_angle = 0.0
    w = complex(start_w) if radicand is not None else None
    count = 0

    def value(z, w_ref):
        if radicand is None:
            return complex(np.asarray(func(np.array([z]), None)).ravel()[0]), None
        w_new = complex(nearest_root(radicand(z), w_ref))
        return complex(np.asarray(func(np.array([z]), np.array([w_new]))).ravel()[0]), w_new

    f_prev, w = value(verts[0], w)
    for a, b in zip(verts[:-1], verts[1:]):
        t = 0.0
        h = 1.0 / 16
        while t < 1.0:
            h = min(h, 1.0 - t)
            z = a + (t + h) * (b - a)
            f_new, w_new = value(z, w)
            step = np.angle(f_new / f_prev) if f_prev != 0 and f_new != 0 else np.inf
            jump_ok = w is None or abs(w_new - w) < 0.5 * abs(w)
            if abs(step) < max_step and jump_ok:
                total_angle += step
                f_prev, w, t = f_new, w_new, t + h
                h *= 1.5
            else:
                h *= 0.5
                if h < 1e-15:
                    raise AccuracyError(f"winding number undefined: function vanishes near {z}")
            count += 1
            if count > max_points:
                raise AccuracyError("winding number: too many samples")
    return total_angle / (2 * np.pi)
