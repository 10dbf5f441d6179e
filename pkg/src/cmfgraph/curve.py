"""The hyperelliptic-type curve w^2 = R(z) carrying the Riemann-type graphs.

    R(z) = (z - 1) prod_j (z - c_j) / ((z + 1) prod_j (z - b_j))

Points of the curve are carried as (z, w) pairs; the sheet is never stored
globally, it is continued along paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lorentz import INF, is_inf


class CurveError(ValueError):
    """Invalid curve parameters."""


class ContinuationError(RuntimeError):
    """Analytic continuation of w = sqrt(R) failed."""


@dataclass(frozen=True)
class CurveParams:
    n: int
    c: tuple
    b: tuple
    zeros: np.ndarray = field(init=False, repr=False, compare=False)
    poles: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        b = tuple(float(x) for x in self.b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        if int(self.n) != self.n or self.n < 1:
            raise CurveError(f"n must be a positive integer, got {self.n!r}")
        if len(c) != self.n or len(b) != self.n:
            raise CurveError(f"expected {self.n} values for c and b, got {len(c)} and {len(b)}")
        vals = (1.0, -1.0) + c + b
        if not all(math.isfinite(v) for v in vals):
            raise CurveError("branch values must be finite")
        if len(set(vals)) != len(vals):
            raise CurveError("branch values 1, -1, c_j, b_j must be pairwise distinct")
        object.__setattr__(self, "zeros", np.array((1.0,) + c))
        object.__setattr__(self, "poles", np.array((-1.0,) + b))

    @property
    def branch_values(self) -> np.ndarray:
        return np.sort(np.concatenate([self.zeros, self.poles]))

    @property
    def min_gap(self) -> float:
        return float(np.min(np.diff(self.branch_values)))

    @property
    def eps_branch(self) -> float:
        return 1e-3 * self.min_gap

    @property
    def log_growth(self) -> float:
        """Closed-form logarithmic growth 2 + sum(c) - sum(b) of the end."""
        return 2.0 + sum(self.c) - sum(self.b)

    def is_interlaced(self) -> bool:
        """True when every fixed-locus interval joins a zero of R to a pole of R.

        Only then does R take negative real values exclusively on the real
        intervals, which is what makes |g| < 1 on the whole component.
        """
        pts = self.branch_values
        zset = set(self.zeros.tolist())
        for lo, hi in zip(pts[0::2], pts[1::2]):
            if (lo in zset) == (hi in zset):
                return False
        return True


@dataclass(frozen=True)
class SheetPoint:
    z: complex
    w: complex

    def residual(self, params: CurveParams) -> float:
        r = eval_R(params, self.z)
        return abs(self.w ** 2 - r) / (1.0 + abs(r))


@dataclass(frozen=True)
class RealInterval:
    """Closed interval of R u {inf}; wraps through infinity when lo > hi."""

    lo: float
    hi: float

    @property
    def wraps(self) -> bool:
        return self.lo > self.hi

    @property
    def mid(self) -> float:
        if self.wraps:
            return INF
        return 0.5 * (self.lo + self.hi)

    @property
    def half_length(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def contains(self, x: float) -> bool:
        if self.wraps:
            return x >= self.lo or x <= self.hi
        return self.lo <= x <= self.hi


def eval_R(params: CurveParams, z):
    """Defining rational function; returns INF at poles for scalar input."""
    if is_inf(z):
        return 1.0 + 0j
    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    num = np.prod(zz[..., None] - params.zeros, axis=-1)
    den = np.prod(zz[..., None] - params.poles, axis=-1)
    if scalar:
        if den == 0:
            return INF
        return complex(num / den)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


def fixed_locus_intervals(params: CurveParams) -> list:
    """The n+1 real intervals where R <= 0, with the one touching 1 first."""
    pts = params.branch_values
    intervals = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if eval_R(params, 0.5 * (lo + hi)).real < 0:
            intervals.append(RealInterval(float(lo), float(hi)))
    # R(inf) = 1, but keep the sign chart honest
    far = abs(pts).max() * 2 + 1
    if eval_R(params, far).real < 0:
        intervals.append(RealInterval(float(pts[-1]), float(pts[0])))
    if len(intervals) != params.n + 1:
        raise CurveError(f"found {len(intervals)} fixed-locus intervals, expected {params.n + 1}")
    first = [iv for iv in intervals if iv.contains(1.0)]
    rest = sorted((iv for iv in intervals if not iv.contains(1.0)), key=lambda iv: iv.lo)
    return first + rest


def nearest_root(r, w_ref):
    """Square root of r closest to w_ref (elementwise)."""
    s = np.sqrt(np.asarray(r, dtype=complex))
    ref = np.asarray(w_ref, dtype=complex)
    return np.where(np.abs(s - ref) <= np.abs(s + ref), s, -s)


def _segment_clearance(a: complex, b: complex, pts: np.ndarray) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return float(np.min(np.abs(pts - a)))
    t = np.clip(((pts - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return float(np.min(np.abs(pts - (a + t * d))))


def continue_branch(params: CurveParams, path: Sequence[complex], w_start: complex,
                    eps: float | None = None, tol: float = 1e-8) -> complex:
    """Continue w = sqrt(R) along a polyline, picking the nearest root each step.

    Steps are bisected until the relative jump between consecutive values is
    below 0.5.
    """
    eps = params.eps_branch if eps is None else eps
    verts = [complex(p) for p in path]
    r0 = eval_R(params, verts[0])
    if is_inf(r0) or abs(w_start ** 2 - r0) > tol * (1.0 + abs(r0)):
        raise CurveError("w_start is not a square root of R at the path start")
    bv = params.branch_values.astype(complex)
    w = complex(w_start)
    for a, b in zip(verts[:-1], verts[1:]):
        if _segment_clearance(a, b, bv) < eps:
            raise ContinuationError(f"segment {a} -> {b} passes within {eps:g} of a branch value")
        t, h = 0.0, 1.0 / 8
        while t < 1.0:
            h = min(h, 1.0 - t)
            z = a + (t + h) * (b - a)
            w_new = complex(nearest_root(eval_R(params, z), w))
            if abs(w_new - w) < 0.5 * abs(w):
                w, t = w_new, t + h
                h *= 2.0
            else:
                h *= 0.5
                if h < 1e-14:
                    raise ContinuationError("step size underflow during continuation")
    return w


def involution_J(p: SheetPoint) -> SheetPoint:
    return SheetPoint(complex(p.z).conjugate(), -complex(p.w).conjugate())


def is_fixed_by_J(params: CurveParams, p: SheetPoint, tol: float = 1e-12) -> bool:
    q = involution_J(p)
    return abs(q.z - p.z) <= tol * (1 + abs(p.z)) and abs(q.w - p.w) <= tol * (1 + abs(p.w))


def random_interlaced_params(rng: np.random.Generator, n: int, span: float = 6.0,
                             min_sep: float = 0.4, max_tries: int = 10000) -> CurveParams:
    """Random parameters whose fixed-locus intervals each join a zero to a pole."""
    for _ in range(max_tries):
        extra = rng.uniform(-span, span, size=2 * n)
        pts = np.sort(np.concatenate([[-1.0, 1.0], extra]))
        if np.min(np.diff(pts)) < min_sep:
            continue
        zeros, poles = [], []
        for lo, hi in zip(pts[0::2], pts[1::2]):
            pair = {lo, hi}
            if 1.0 in pair and -1.0 in pair:
                continue
            if 1.0 in pair:
                poles.append((pair - {1.0}).pop())
            elif -1.0 in pair:
                zeros.append((pair - {-1.0}).pop())
            elif rng.random() < 0.5:
                zeros.append(lo)
                poles.append(hi)
            else:
                zeros.append(hi)
                poles.append(lo)
        return CurveParams(n, tuple(zeros), tuple(poles))
    raise RuntimeError("could not draw separated parameters")
