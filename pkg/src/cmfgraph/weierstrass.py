"""Weierstrass data (g, phi3) for the three surface families.

Every evaluator exposes the same small interface:

* ``g(z, w)``, ``phi3(z, w)``: Gauss map and the density of phi3 w.r.t. dz;
* ``forms(z, w)``: stacked densities of (phi1, phi2, phi3), shape (3, ...);
* ``conformal_factor(z, w)``: density of the induced metric w.r.t. |dz|^2;
* geometry of the parameter domain Omega: singular cycles, loops around them,
  a loop around the end, a base point, and the points to stay away from.

The Riemann family lives on the curve w^2 = R(z) and is "branched": callers
pass the sheet value w alongside z.  The other two families ignore w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import (CurveParams, CurveError, eval_R, fixed_locus_intervals,
                    _segment_clearance)
from .lorentz import INF, is_inf


class StandoffError(ValueError):
    """A requested point or path comes too close to a cut or a pole."""


def _circle(center: complex, radius: float, n: int, start: float = 0.0) -> list:
    t = start + 2 * np.pi * np.arange(n + 1) / n
    pts = center + radius * np.exp(1j * t)
    pts[-1] = pts[0]
    return [complex(p) for p in pts]


class WeierstrassEvaluator:
    kind = "abstract"
    branched = False
    n_cycles = 1
    # orientation of the ccw cycle/end loops as boundaries of the compact part
    cycle_sign = 1
    end_sign = 1

    # --- data -----------------------------------------------------------
    def radicand(self, z):
        raise NotImplementedError

    def g(self, z, w=None):
        raise NotImplementedError

    def phi3(self, z, w=None):
        raise NotImplementedError

    def f_over_g(self, z, w=None):
        return self.phi3(z, w) / self.g(z, w)

    def f_times_g(self, z, w=None):
        return self.phi3(z, w) * self.g(z, w)

    def forms(self, z, w=None):
        fg_inv = self.f_over_g(z, w)
        fg = self.f_times_g(z, w)
        f = self.phi3(z, w)
        return np.stack([0.5j * (fg_inv - fg), -0.5 * (fg_inv + fg), f * np.ones_like(fg)])

    def conformal_factor(self, z, w=None):
        lam = 0.5 * (np.abs(self.f_over_g(z, w)) - np.abs(self.f_times_g(z, w)))
        return lam ** 2

    # --- domain -----------------------------------------------------------
    def sheet_w(self, z):
        return None

    def in_omega(self, z) -> bool:
        raise NotImplementedError

    @property
    def avoid_points(self) -> np.ndarray:
        return np.zeros(0, dtype=complex)

    @property
    def eps(self) -> float:
        raise NotImplementedError

    def base_point(self):
        raise NotImplementedError

    def cycle_loop(self, j: int, standoff: float, shape: str = "stadium") -> list:
        raise NotImplementedError

    def end_loop(self, size: float | None = None) -> list:
        raise NotImplementedError

    def check_segment(self, a: complex, b: complex):
        """Raise StandoffError when the open segment leaves Omega."""


# ---------------------------------------------------------------------------
# Riemann-type family on w^2 = R(z)

class RiemannFamily(WeierstrassEvaluator):
    """g = (w-1)/(w+1), phi3 = (1/w - w) dz on the component Omega with |g| < 1.

    Omega is the z-plane minus the real intervals where R <= 0, with w the
    principal square root.  For interlaced parameters this is exactly the
    sheet where Re w > 0; for the others the construction breaks down (|g|
    reaches 1 off the real axis), and ``strict`` refuses them.
    """

    kind = "riemann"
    branched = True
    cycle_sign = -1
    end_sign = 1

    def __init__(self, params: CurveParams, strict: bool = True):
        self.params = params
        self.intervals = fixed_locus_intervals(params)
        if any(iv.wraps for iv in self.intervals):
            raise CurveError("fixed-locus interval through infinity")
        if strict and not params.is_interlaced():
            raise CurveError("branch values are not interlaced: each cut must join a zero "
                             "of R to a pole of R for |g| < 1 to hold on Omega")
        self.n_cycles = params.n + 1
        bv = params.branch_values
        self._lo, self._hi = float(bv[0]), float(bv[-1])
        self.scale = max(1.0, self._hi - self._lo)

    def __repr__(self):
        p = self.params
        return f"RiemannFamily(n={p.n}, c={list(p.c)}, b={list(p.b)})"

    def radicand(self, z):
        return eval_R(self.params, z)

    def sheet_w(self, z):
        if is_inf(z):
            return 1.0 + 0j
        r = eval_R(self.params, z)
        if np.ndim(z) == 0:
            if is_inf(r):
                return INF
            return complex(np.sqrt(complex(r)))
        return np.sqrt(np.asarray(r, dtype=complex))

    def _w(self, z, w):
        return self.sheet_w(z) if w is None else w

    def g(self, z, w=None):
        w = self._w(z, w)
        if is_inf(w):
            return -1.0 + 0j
        return (w - 1) / (w + 1)

    def phi3(self, z, w=None):
        w = self._w(z, w)
        if is_inf(w) or (np.ndim(w) == 0 and w == 0):
            return INF
        return 1 / w - w

    # closed forms, free of the 0 * inf cancellation at g = 0
    def f_over_g(self, z, w=None):
        w = self._w(z, w)
        return -((1 + w) ** 2) / w

    def f_times_g(self, z, w=None):
        w = self._w(z, w)
        return -((w - 1) ** 2) / w

    def forms(self, z, w=None):
        w = np.asarray(self._w(z, w), dtype=complex)
        inv = 1 / w
        return np.stack([np.full_like(w, -2j), w + inv, inv - w])

    def conformal_factor(self, z, w=None):
        w = self._w(z, w)
        return 4 * np.real(w) ** 2 / np.abs(w) ** 2

    # domain geometry
    @property
    def eps(self) -> float:
        return self.params.eps_branch

    @property
    def avoid_points(self) -> np.ndarray:
        return self.params.branch_values.astype(complex)

    def on_cut(self, x: float) -> bool:
        return any(iv.lo <= x <= iv.hi for iv in self.intervals)

    def in_omega(self, z) -> bool:
        z = complex(z)
        return z.imag != 0 or not self.on_cut(z.real)

    def check_segment(self, a: complex, b: complex):
        a, b = complex(a), complex(b)
        if a.imag == b.imag == 0:
            lo, hi = sorted((a.real, b.real))
            for iv in self.intervals:
                if lo < iv.hi and hi > iv.lo:
                    raise StandoffError(f"segment {a} -> {b} runs along a cut")
            return
        if a.imag * b.imag >= 0:
            return
        t = a.imag / (a.imag - b.imag)
        x = a.real + t * (b.real - a.real)
        if self.on_cut(x):
            raise StandoffError(f"segment {a} -> {b} crosses the cut at x={x:.6g}")

    def base_point(self):
        z = complex(self._hi + 1.0)
        return z, complex(np.sqrt(complex(eval_R(self.params, z))))

    def gap_points(self) -> list:
        """Real points between consecutive cuts (and beyond both ends)."""
        ivs = sorted(self.intervals, key=lambda iv: iv.lo)
        pts = [ivs[0].lo - 1.0]
        pts += [0.5 * (u.hi + v.lo) for u, v in zip(ivs[:-1], ivs[1:])]
        pts.append(ivs[-1].hi + 1.0)
        return pts

    def cycle_loop(self, j: int, standoff: float, shape: str = "stadium", n_arc: int = 24) -> list:
        """Counter-clockwise loop around the j-th cut."""
        iv = self.intervals[j]
        lo, hi, s = iv.lo, iv.hi, float(standoff)
        if shape == "rectangle":
            return [complex(lo - s, -s), complex(hi + s, -s), complex(hi + s, s),
                    complex(lo - s, s), complex(lo - s, -s)]
        if shape != "stadium":
            raise ValueError(f"unknown loop shape {shape!r}")
        th = np.linspace(-np.pi / 2, np.pi / 2, n_arc + 1)
        right = hi + s * np.exp(1j * th)
        left = lo + s * np.exp(1j * (th + np.pi))
        pts = [complex(p) for p in right] + [complex(p) for p in left]
        pts.append(pts[0])
        return pts

    def end_loop(self, size: float | None = None, n: int = 64) -> list:
        mid = 0.5 * (self._lo + self._hi)
        radius = size if size is not None else 4.0 * self.scale
        return _circle(mid, radius, n)

    def end_chart(self, t):
        """z as a function of the local parameter t = 1/z at the end."""
        return 1.0 / t


# ---------------------------------------------------------------------------
# Local models and the catenoid on 0 < |z| < 1

@dataclass(frozen=True)
class LocalModelParams:
    m: int
    k: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m!r}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be an integer >= 0, got {self.k!r}")


class LocalModel(WeierstrassEvaluator):
    """g = z^m with phi3 = i (z^{2k} - 1) / z^{k+1} dz (k >= 1) or dz/z (k = 0).

    The singular cycle is the unit circle; Omega is the punctured unit disc.
    """

    kind = "local"
    cycle_sign = 1
    end_sign = -1

    def __init__(self, m: int, k: int = 0):
        self.lp = LocalModelParams(int(m), int(k))
        self.m, self.k = self.lp.m, self.lp.k
        self.n_cycles = 1
        self.scale = 1.0

    def __repr__(self):
        return f"LocalModel(m={self.m}, k={self.k})"

    def g(self, z, w=None):
        if is_inf(z):
            return INF
        return np.asarray(z) ** self.m if np.ndim(z) else complex(z) ** self.m

    def phi3(self, z, w=None):
        if is_inf(z):
            return INF
        if np.ndim(z) == 0 and z == 0:
            return INF
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        if self.k == 0:
            return 1 / z
        return 1j * (z ** (2 * self.k) - 1) / z ** (self.k + 1)

    def f_over_g(self, z, w=None):
        return self.phi3(z) * z ** (-self.m)

    def f_times_g(self, z, w=None):
        return self.phi3(z) * z ** self.m

    @property
    def eps(self) -> float:
        return 1e-3

    def in_omega(self, z) -> bool:
        return 0 < abs(complex(z)) < 1

    def check_segment(self, a: complex, b: complex):
        # the pole at 0 is the end, so the standoff from it is relative
        if abs(a) > 1 + 1e-12 or abs(b) > 1 + 1e-12:
            raise StandoffError(f"segment {a} -> {b} leaves the closed unit disc")
        if _segment_clearance(a, b, np.zeros(1)) < 0.5 * min(abs(a), abs(b)):
            raise StandoffError(f"segment {a} -> {b} passes too close to the end at 0")

    def base_point(self):
        return 1.0 + 0j, None

    def cycle_loop(self, j: int = 0, standoff: float = 1e-3, shape: str = "circle", n: int = 64) -> list:
        if j != 0:
            raise IndexError("local models have a single singular cycle")
        return _circle(0.0, 1.0 - standoff, n)

    def end_loop(self, size: float | None = None, n: int = 64) -> list:
        return _circle(0.0, 0.5 if size is None else size, n)

    def end_chart(self, t):
        return t


class Catenoid(LocalModel):
    """Lorentzian catenoid: g = z, phi3 = dz/z."""

    kind = "catenoid"

    def __init__(self):
        super().__init__(1, 0)

    def __repr__(self):
        return "Catenoid()"


class CorruptedEvaluator(WeierstrassEvaluator):
    """Wraps an evaluator and multiplies phi3 (hence phi1, phi2) by (z - z0).

    Used as a seeded defect: the extra zero of phi3 is not a zero of g, the
    periods pick up real parts and the balance laws stop holding.
    """

    def __init__(self, base: WeierstrassEvaluator, z0: complex):
        self.base = base
        self.z0 = complex(z0)
        self.kind = base.kind
        self.branched = base.branched
        self.n_cycles = base.n_cycles
        self.cycle_sign = base.cycle_sign
        self.end_sign = base.end_sign
        self.scale = getattr(base, "scale", 1.0)

    def __repr__(self):
        return f"Corrupted({self.base!r}, z0={self.z0})"

    def __getattr__(self, name):
        # geometry and anything else not overridden comes from the base
        return getattr(self.__dict__["base"], name)

    # the base class stubs shadow __getattr__, so geometry is forwarded by hand
    def radicand(self, z):
        return self.base.radicand(z)

    def sheet_w(self, z):
        return self.base.sheet_w(z)

    def in_omega(self, z):
        return self.base.in_omega(z)

    @property
    def avoid_points(self):
        return self.base.avoid_points

    @property
    def eps(self):
        return self.base.eps

    def base_point(self):
        return self.base.base_point()

    def cycle_loop(self, j, standoff, **kw):
        return self.base.cycle_loop(j, standoff, **kw)

    def end_loop(self, size=None, **kw):
        return self.base.end_loop(size, **kw)

    def check_segment(self, a, b):
        return self.base.check_segment(a, b)

    def _fac(self, z):
        return np.asarray(z, dtype=complex) - self.z0 if np.ndim(z) else complex(z) - self.z0

    def g(self, z, w=None):
        return self.base.g(z, w)

    def phi3(self, z, w=None):
        return self.base.phi3(z, w) * self._fac(z)

    def f_over_g(self, z, w=None):
        return self.base.f_over_g(z, w) * self._fac(z)

    def f_times_g(self, z, w=None):
        return self.base.f_times_g(z, w) * self._fac(z)

    def forms(self, z, w=None):
        return self.base.forms(z, w) * self._fac(z)

    def conformal_factor(self, z, w=None):
        return self.base.conformal_factor(z, w) * np.abs(self._fac(z)) ** 2


def make_evaluator(family: str, **kw) -> WeierstrassEvaluator:
    family = family.lower()
    if family in ("riemann", "riemann_family"):
        params = kw.get("params") or CurveParams(int(kw["n"]), tuple(kw["c"]), tuple(kw["b"]))
        return RiemannFamily(params, strict=kw.get("strict", True))
    if family in ("catenoid",):
        return Catenoid()
    if family in ("local", "local_model"):
        return LocalModel(int(kw.get("m", 1)), int(kw.get("k", 0)))
    raise ValueError(f"unknown family {family!r}")


def g_eval(ev: WeierstrassEvaluator, z, w=None):
    return ev.g(z, w)


def phi3_eval(ev: WeierstrassEvaluator, z, w=None):
    return ev.phi3(z, w)


def conformal_factor(ev: WeierstrassEvaluator, z, w=None):
    return ev.conformal_factor(z, w)


def generic_forms(g, f):
    """(phi1, phi2, phi3) densities from g and phi3 by the defining formulas."""
    return np.stack([0.5j * f * (1 / g - g), -0.5 * f * (1 / g + g), f])
