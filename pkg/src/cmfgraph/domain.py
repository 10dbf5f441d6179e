"""Harmonic functions and normalized 1-forms on marked circular domains.

Omega(v) is the Riemann sphere minus the closed disks B_1(0) and
B_{r_j}(c_j), j = 1..n; it contains infinity.  Its Schottky double N(v) is a
compact surface of genus n whose a-cycles are the boundary circles.

Harmonic functions are represented by the ansatz

    h(z) = alpha0 + sum_j beta_j log|z - c_j| + sum_{j,k} Re(gamma_jk u_j(z)^k),
    u_j(z) = r_j / (z - c_j),   sum_j beta_j = 0,

fitted by least squares collocation on the circles.  Every 1-form used here
is a finite combination of

    1/(z - c_j),   u_j(z)^k / (z - c_j),   1/(z - p)   (p a divisor point),

so it has a closed-form antiderivative; the numerical certificates integrate
the same forms by quadrature instead.

Orientation: a_k is oriented as part of the boundary of Omega (clockwise
around its disk).  b_j is gamma_j from a_0 to a_j followed by the mirror of
gamma_j backwards, so pi_jk = 2i Im int_gamma_j eta_k.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quadrature import adaptive_integral

log = logging.getLogger(__name__)

K_DEFAULT = 24
OVERSAMPLE = 8
MISFIT_TOL = 1e-8
CERT_TOL = 1e-8
# tangential derivatives on the circles lose about a factor K against the
# boundary values, so the mirror test is looser than the misfit test
MIRROR_TOL = 1e-6
RESIDUE_TOL = 1e-6


class DomainError(ValueError):
    """Invalid circle configuration or divisor."""


class DegeneracyError(RuntimeError):
    """The a-period matrix of the harmonic-measure forms is singular."""


class RoutingError(RuntimeError):
    """No admissible path between two boundary circles was found."""


@dataclass(frozen=True)
class DomainParams:
    c: tuple            # c_1..c_n (c_1 real and > 1)
    r: tuple            # r_1..r_n

    def __post_init__(self):
        c = tuple(complex(x) for x in self.c)
        r = tuple(float(x) for x in self.r)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)
        self.validate()

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def centers(self) -> np.ndarray:
        """c_0 = 0 first."""
        return np.array((0j,) + self.c)

    @property
    def radii(self) -> np.ndarray:
        return np.array((1.0,) + self.r)

    def validate(self):
        if len(self.c) == 0:
            raise DomainError("at least one inner circle is required (n >= 1)")
        if len(self.c) != len(self.r):
            raise DomainError(f"{len(self.c)} centers but {len(self.r)} radii")
        for x in self.c + tuple(complex(v) for v in self.r):
            if not (math.isfinite(x.real) and math.isfinite(x.imag)):
                raise DomainError("non-finite circle parameter")
        if any(x <= 0 for x in self.r):
            raise DomainError("radii must be positive")
        c1 = self.c[0]
        if c1.imag != 0 or c1.real <= 1:
            raise DomainError(f"c_1 must be real and > 1, got {c1}")
        cs, rs = self.centers, self.radii
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                if abs(cs[i] - cs[j]) <= rs[i] + rs[j]:
                    raise DomainError(f"closed disks {i} and {j} intersect")

    def gap(self) -> float:
        """Smallest distance between two boundary circles."""
        cs, rs = self.centers, self.radii
        return min(abs(cs[i] - cs[j]) - rs[i] - rs[j]
                   for i in range(len(cs)) for j in range(i + 1, len(cs)))

    @property
    def eps_div(self) -> float:
        return float(np.max(self.radii)) / 100

    def in_omega(self, z) -> bool:
        return bool(np.all(np.abs(z - self.centers) > self.radii))

    def circle_points(self, j: int, m: int, offset: float = 0.5) -> np.ndarray:
        th = 2 * np.pi * (np.arange(m) + offset) / m
        return self.centers[j] + self.radii[j] * np.exp(1j * th)


def random_domain(rng: np.random.Generator, n: int, min_gap: float = 0.3,
                  max_tries: int = 10000) -> DomainParams:
    """A random valid configuration with every circle gap at least ``min_gap``."""
    for _ in range(max_tries):
        r = rng.uniform(0.2, 0.7, size=n)
        c = [complex(rng.uniform(1.6, 3.5) + r[0])]
        for _j in range(1, n):
            rad = rng.uniform(2.0, 4.0 + n)
            c.append(rad * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        cs = np.array([0j] + c)
        rs = np.concatenate([[1.0], r])
        ok = all(abs(cs[i] - cs[j]) - rs[i] - rs[j] >= min_gap
                 for i in range(n + 1) for j in range(i + 1, n + 1))
        if ok:
            return DomainParams(tuple(c), tuple(r))
    raise RuntimeError("could not draw a valid domain")


@dataclass(frozen=True)
class Divisor:
    points: tuple       # ((w, multiplicity), ...)

    def __post_init__(self):
        pts = tuple((complex(w), int(m)) for w, m in self.points)
        for _w, m in pts:
            if m <= 0:
                raise DomainError("divisor multiplicities must be positive integers")
        object.__setattr__(self, "points", pts)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.points)

    def validate(self, v: DomainParams):
        cs, rs = v.centers, v.radii
        e = v.eps_div
        for w, _ in self.points:
            d = np.abs(w - cs) - rs
            if np.any(d < e):
                raise DomainError(f"divisor point {w} is within {e:g} of a boundary circle "
                                  "or outside Omega")
        ws = [w for w, _ in self.points]
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                if abs(ws[i] - ws[j]) < e:
                    raise DomainError("divisor points must be distinct")


# ---------------------------------------------------------------- harmonic solve

@dataclass
class HarmonicRep:
    v: DomainParams
    alpha0: float
    beta: np.ndarray        # (n+1,), sums to 0
    gamma: np.ndarray       # (n+1, K) coefficients of u_j^k
    misfit: float
    cond: float
    warnings: list = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.gamma.shape[1]

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        cs, rs = self.v.centers, self.v.radii
        out = np.full(z.shape, self.alpha0, dtype=float)
        for j in range(len(cs)):
            d = z - cs[j]
            out += self.beta[j] * np.log(np.abs(d))
            u = rs[j] / d
            out += np.real(np.polyval(np.concatenate([self.gamma[j][::-1], [0]]), u))
        return out

    def dz_form(self, factor: complex = 0.5) -> "Form":
        """factor * d/dz (h + i h*) as a Form; factor 0.5 gives d_z h."""
        k = np.arange(1, self.K + 1)
        return Form(self.v, factor * self.beta.astype(complex), -factor * self.gamma * k)


def _basis(v: DomainParams, z: np.ndarray, K: int) -> np.ndarray:
    """Real design matrix for the ansatz at points z."""
    cs, rs = v.centers, v.radii
    cols = [np.ones(z.size)]
    for j in range(1, len(cs)):
        cols.append(np.log(np.abs(z - cs[j])) - np.log(np.abs(z)))
    for j in range(len(cs)):
        u = rs[j] / (z - cs[j])
        p = np.ones_like(u)
        for _k in range(K):
            p = p * u
            cols.append(p.real)
            cols.append(-p.imag)
    return np.stack(cols, axis=1)


def _unpack(v: DomainParams, x: np.ndarray, K: int):
    n = v.n
    alpha0 = float(x[0])
    b = x[1:n + 1]
    beta = np.concatenate([[-np.sum(b)], b])
    g = x[n + 1:].reshape(n + 1, K, 2)
    gamma = g[..., 0] + 1j * g[..., 1]
    return alpha0, beta, gamma


def harmonic_solve(v: DomainParams, boundary_data, K: int = K_DEFAULT,
                   oversample: int = OVERSAMPLE) -> HarmonicRep:
    """Least-squares collocation for the bounded harmonic function on Omega(v).

    ``boundary_data`` is a sequence of n+1 callables (circle j -> values at
    complex points) or one callable ``f(j, z)``.
    """
    if K < 1:
        raise DomainError("truncation K must be at least 1")
    warnings = []
    if K < 4:
        warnings.append(f"truncation K={K} is below the recommended minimum 4")
    data = _data_fn(boundary_data, v.n)
    M = oversample * K
    z = np.concatenate([v.circle_points(j, M) for j in range(v.n + 1)])
    rhs = np.concatenate([np.asarray(data(j, v.circle_points(j, M)), dtype=float)
                          for j in range(v.n + 1)])
    A = _basis(v, z, K)
    x, _res, _rank, sv = np.linalg.lstsq(A, rhs, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    alpha0, beta, gamma = _unpack(v, x, K)
    rep = HarmonicRep(v, alpha0, beta, gamma, 0.0, cond, warnings)
    # misfit on points interleaved with the collocation points
    mis = 0.0
    for j in range(v.n + 1):
        zc = v.circle_points(j, 2 * M, offset=0.25)
        mis = max(mis, float(np.max(np.abs(rep(zc) - np.asarray(data(j, zc), dtype=float)))))
    rep.misfit = mis
    if cond > 1e10 or v.gap() < 0.02 * float(np.min(v.radii)):
        msg = f"ill-conditioned collocation (cond {cond:.3g}, circle gap {v.gap():.3g})"
        warnings.append(msg)
        log.warning(msg)
    return rep


def _data_fn(boundary_data, n):
    if callable(boundary_data):
        return boundary_data
    seq = list(boundary_data)
    if len(seq) != n + 1:
        raise DomainError(f"need boundary data on {n + 1} circles, got {len(seq)}")
    fns = [f if callable(f) else (lambda z, c=float(f): np.full(np.shape(z), c)) for f in seq]
    return lambda j, z: fns[j](z)


def harmonic_measure(v: DomainParams, j: int, K: int = K_DEFAULT) -> HarmonicRep:
    """h with h = 1 on a_j and 0 on the other circles."""
    return harmonic_solve(v, [1.0 if i == j else 0.0 for i in range(v.n + 1)], K)


# ---------------------------------------------------------------- 1-forms

@dataclass
class Form:
    """f(z) dz with f a combination of the poles listed in the module docstring."""

    v: DomainParams
    cres: np.ndarray                # (n+1,) residues at the centers
    lau: np.ndarray                 # (n+1, K) coefficients of u_j^k / (z - c_j)
    pts: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    pres: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.cres = np.asarray(self.cres, dtype=complex)
        self.lau = np.asarray(self.lau, dtype=complex)
        self.pts = np.asarray(self.pts, dtype=complex)
        self.pres = np.asarray(self.pres, dtype=complex)

    def _merge_pts(self, other):
        pts = list(self.pts)
        pres = list(self.pres)
        for p, r in zip(other.pts, other.pres):
            hit = [i for i, q in enumerate(pts) if q == p]
            if hit:
                pres[hit[0]] += r
            else:
                pts.append(p)
                pres.append(r)
        return np.array(pts, dtype=complex), np.array(pres, dtype=complex)

    def __add__(self, other: "Form") -> "Form":
        K = max(self.lau.shape[1], other.lau.shape[1])
        la = np.zeros((self.lau.shape[0], K), complex)
        la[:, :self.lau.shape[1]] += self.lau
        la[:, :other.lau.shape[1]] += other.lau
        pts, pres = self._merge_pts(other)
        return Form(self.v, self.cres + other.cres, la, pts, pres)

    def __mul__(self, s: complex) -> "Form":
        return Form(self.v, self.cres * s, self.lau * s, self.pts.copy(), self.pres * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Form":
        return self * -1

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        cs, rs = self.v.centers, self.v.radii
        out = np.zeros(z.shape, dtype=complex)
        for j in range(len(cs)):
            d = z - cs[j]
            u = rs[j] / d
            poly = np.polyval(np.concatenate([self.lau[j][::-1], [0]]), u)
            out += (self.cres[j] + poly) / d
        for p, r in zip(self.pts, self.pres):
            out += r / (z - p)
        return out

    def coefficients_real(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.lau), initial=0)), float(np.max(np.abs(self.cres))))
        return bool(np.max(np.abs(self.lau.imag), initial=0) <= tol * scale
                    and np.max(np.abs(self.cres.imag)) <= tol * scale)

    # closed form route -------------------------------------------------
    def a_period_exact(self, k: int) -> complex:
        """Integral over a_k from residues: clockwise around disk k."""
        inside = self.cres[k]
        for p, r in zip(self.pts, self.pres):
            if abs(p - self.v.centers[k]) < self.v.radii[k]:
                inside += r
        return complex(-2j * np.pi * inside)

    def integral_exact(self, verts: Sequence[complex]) -> complex:
        """Integral along a polyline via the antiderivative, logs continued segment by segment."""
        verts = np.asarray(verts, dtype=complex)
        cs, rs = self.v.centers, self.v.radii
        a, b = verts[0], verts[-1]
        total = 0j
        for j in range(len(cs)):
            ua, ub = rs[j] / (a - cs[j]), rs[j] / (b - cs[j])
            k = np.arange(1, self.lau.shape[1] + 1)
            total += np.sum(-self.lau[j] / k * (ub ** k - ua ** k))
            total += self.cres[j] * _log_increment(verts, cs[j])
        for p, r in zip(self.pts, self.pres):
            total += r * _log_increment(verts, p)
        return complex(total)

    # quadrature route --------------------------------------------------
    def a_period(self, k: int, m: int = 512) -> complex:
        """Trapezoid rule on a_k (spectrally accurate for these integrands)."""
        th = 2 * np.pi * np.arange(m) / m
        c, r = self.v.centers[k], self.v.radii[k]
        z = c + r * np.exp(-1j * th)                       # clockwise
        dz = -1j * r * np.exp(-1j * th) * (2 * np.pi / m)
        return complex(np.sum(self(z) * dz))

    def residue(self, w: complex, radius: float, m: int = 256) -> complex:
        th = 2 * np.pi * np.arange(m) / m
        e = np.exp(1j * th)
        z = w + radius * e
        return complex(np.mean(self(z) * radius * e))

    def integral(self, verts: Sequence[complex], tol: float = 1e-13) -> complex:
        res = adaptive_integral(lambda z, w: self(z)[None, :], verts, tol, rel_tol=1e-15)
        return complex(res.value[0])

    def mirror_residual(self, part: str = "imag", m: int = 256) -> float:
        """max over circles of |Im| (or |Re|) of f(z) dz/ds, relative to max |f|.

        A form with J*w = conj w is real on every a_j; J*w = -conj w makes it
        imaginary there.
        """
        worst, size = 0.0, 0.0
        for j in range(self.v.n + 1):
            z = self.v.circle_points(j, m)
            t = 1j * (z - self.v.centers[j]) / self.v.radii[j]
            val = self(z) * t
            worst = max(worst, float(np.max(np.abs(val.imag if part == "imag" else val.real))))
            size = max(size, float(np.max(np.abs(val))))
        return worst / max(size, 1e-300)


def _log_increment(verts, c) -> complex:
    """Change of log(z - c) along a polyline that never passes through c."""
    d = np.asarray(verts, dtype=complex) - c
    dl = np.log(np.abs(d[-1]) / np.abs(d[0]))
    darg = float(np.sum(np.angle(d[1:] / d[:-1])))
    return complex(dl, darg)


# ---------------------------------------------------------------- eta, Pi

@dataclass
class EtaBasis:
    v: DomainParams
    forms: list                 # normalized eta_1..eta_n
    hat: list                   # eta-hat_1..n
    measures: list              # harmonic measures h_1..h_n
    P: np.ndarray               # P[h, j] = int_{a_h} eta-hat_j

    @property
    def misfit(self) -> float:
        return max(m.misfit for m in self.measures)

    @property
    def warnings(self) -> list:
        return sorted({w for m in self.measures for w in m.warnings})

    def duality_matrix(self) -> np.ndarray:
        """Quadrature a-periods: D[k, j] = int_{a_k} eta_j (should be identity)."""
        n = self.v.n
        return np.array([[self.forms[j].a_period(k + 1) for j in range(n)] for k in range(n)])


def eta_basis(v: DomainParams, K: int = K_DEFAULT) -> EtaBasis:
    n = v.n
    measures = [harmonic_measure(v, j, K) for j in range(1, n + 1)]
    hat = [m.dz_form() for m in measures]
    P = np.array([[hat[j].a_period_exact(h + 1) for j in range(n)] for h in range(n)])
    if np.linalg.cond(P) > 1e12:
        raise DegeneracyError("a-period matrix of the harmonic-measure forms is singular")
    C = np.linalg.inv(P)
    forms = []
    for j in range(n):
        f = hat[0] * C[0, j]
        for l in range(1, n):
            f = f + hat[l] * C[l, j]
        forms.append(f)
    return EtaBasis(v, forms, hat, measures, P)


def normalize_a_periods(form: Form, basis: EtaBasis) -> Form:
    """form - sum_h (int_{a_h} form) eta_h."""
    out = form
    for h in range(basis.v.n):
        out = out - basis.forms[h] * form.a_period_exact(h + 1)
    return out


def _segment_clear(a, b, v: DomainParams, skip=()) -> bool:
    cs, rs = v.centers, v.radii
    ab = b - a
    L2 = abs(ab) ** 2
    for i in range(len(cs)):
        t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((cs[i] - a) * np.conj(ab)).real / L2))
        d = abs(a + t * ab - cs[i])
        lim = rs[i] * (1 - 1e-9) if i in skip else rs[i] * 1.02
        if d < lim:
            return False
    return True


def b_paths(v: DomainParams, j: int, count: int = 2) -> list:
    """Polylines from a_0 to a_j inside Omega; the first ``count`` admissible ones.

    Each is start point on a_0, optional waypoint, end point on a_j, with the
    end points chosen facing the next vertex so no segment re-enters its disk.
    """
    c0, cj = 0j, v.centers[j]
    d = cj - c0
    perp = 1j * d / abs(d)
    mid = 0.5 * (c0 + cj)
    waypoints = [None]
    for t in (0.35, -0.35, 0.7, -0.7, 1.2, -1.2, 2.0, -2.0, 3.5, -3.5):
        waypoints.append(mid + t * abs(d) * perp)
    out = []
    for wp in waypoints:
        tgt0 = cj if wp is None else wp
        tgtj = c0 if wp is None else wp
        s = v.radii[0] * (tgt0 - c0) / abs(tgt0 - c0)
        e = cj + v.radii[j] * (tgtj - cj) / abs(tgtj - cj)
        verts = [s, e] if wp is None else [s, wp, e]
        if wp is not None and not v.in_omega(wp):
            continue
        ok = all(_segment_clear(a, b, v, skip=(0, j))
                 for a, b in zip(verts[:-1], verts[1:]))
        if ok:
            out.append(verts)
        if len(out) == count:
            return out
    if not out:
        raise RoutingError(f"no admissible path from a_0 to a_{j}")
    return out


@dataclass
class PeriodMatrix:
    Pi: np.ndarray
    Pi_quadrature: np.ndarray
    Pi_alternate: np.ndarray
    paths: list

    @property
    def max_real(self) -> float:
        return float(np.max(np.abs(self.Pi.real)))

    @property
    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.Pi - self.Pi.T)))

    @property
    def route_mismatch(self) -> float:
        return float(np.max(np.abs(self.Pi - self.Pi_quadrature)))

    @property
    def representative_mismatch(self) -> float:
        return float(np.max(np.abs(self.Pi - self.Pi_alternate)))


def period_matrix(v: DomainParams, K: int = K_DEFAULT, basis: EtaBasis | None = None) -> PeriodMatrix:
    """pi_jk = int_{b_j} eta_k = 2i Im int_{gamma_j} eta_k, by two routes and two paths."""
    basis = basis or eta_basis(v, K)
    n = v.n
    Pi = np.zeros((n, n), complex)
    Pq = np.zeros((n, n), complex)
    Pa = np.zeros((n, n), complex)
    paths = []
    for j in range(n):
        reps = b_paths(v, j + 1, count=2)
        paths.append(reps[0])
        alt = reps[-1]
        for k in range(n):
            f = basis.forms[k]
            Pi[j, k] = 2j * f.integral_exact(reps[0]).imag
            Pq[j, k] = 2j * f.integral(reps[0]).imag
            Pa[j, k] = 2j * f.integral_exact(alt).imag
    return PeriodMatrix(Pi, Pq, Pa, paths)


# ---------------------------------------------------------------- tau, kappa

def _single_arg(z, w, c):
    """Branch of arg(z - w) continuous on the circle around c (which excludes w)."""
    return np.angle((z - w) / (c - w))


def tau_form(v: DomainParams, D: Divisor, K: int = K_DEFAULT,
             basis: EtaBasis | None = None) -> Form:
    """Residue -m at each w, +m at the mirror point, zero a-periods.

    The auxiliary function is sum m log|(z - w)/z|: harmonic at infinity, so
    the form has no pole there.
    """
    D.validate(v)
    basis = basis or eta_basis(v, K)

    def A(z):
        out = np.zeros(np.shape(z))
        for w, m in D.points:
            out += m * (np.log(np.abs(z - w)) - np.log(np.abs(z)))
        return out

    h = harmonic_solve(v, lambda j, z: A(z), K)
    form = h.dz_form(1.0)
    form = form + Form(v, np.zeros(v.n + 1, complex), np.zeros((v.n + 1, 1), complex),
                       [w for w, _ in D.points], [-float(m) for _, m in D.points])
    form.cres[0] += D.degree
    out = normalize_a_periods(form, basis)
    out.meta = {"kind": "tau", "misfit": h.misfit, "cond": h.cond, "warnings": list(h.warnings),
                "divisor": D}
    return out


def kappa_form(v: DomainParams, D1: Divisor, D2: Divisor, K: int = K_DEFAULT,
               basis: EtaBasis | None = None) -> Form:
    """Residue -m at D1 points and +n at D2 points (same at their mirrors)."""
    D1.validate(v)
    D2.validate(v)
    s1 = {w for w, _ in D1.points}
    if any(abs(w - u) < v.eps_div for w, _ in D2.points for u in s1):
        raise DomainError("D1 and D2 must have disjoint supports")
    basis = basis or eta_basis(v, K)
    cs = v.centers

    def A(j, z):
        # Im of the primitive of sum n/(z-w2) - sum m/(z-w1), one branch per circle
        out = np.zeros(np.shape(z))
        for w, nn in D2.points:
            out += nn * _single_arg(z, w, cs[j])
        for w, m in D1.points:
            out -= m * _single_arg(z, w, cs[j])
        return out

    h = harmonic_solve(v, A, K)
    form = h.dz_form(-1j)          # -2i d_z h
    pts = [w for w, _ in D2.points] + [w for w, _ in D1.points]
    res = [float(nn) for _, nn in D2.points] + [-float(m) for _, m in D1.points]
    form = form + Form(v, np.zeros(v.n + 1, complex), np.zeros((v.n + 1, 1), complex), pts, res)
    out = normalize_a_periods(form, basis)
    out.meta = {"kind": "kappa", "misfit": h.misfit, "cond": h.cond, "warnings": list(h.warnings),
                "D1": D1, "D2": D2}
    return out


# ---------------------------------------------------------------- certificates

def residue_certificate(form: Form, expected: dict, radius: float) -> dict:
    errs = {}
    for w, val in expected.items():
        r = form.residue(w, radius)
        errs[repr(complex(w))] = float(abs(r - val))
    worst = max(errs.values(), default=0.0)
    return {"errors": errs, "max_error": worst, "passed": bool(worst <= RESIDUE_TOL)}


def a_period_certificate(form: Form) -> dict:
    vals = [abs(form.a_period(k)) for k in range(1, form.v.n + 1)]
    worst = max(vals)
    return {"values": [float(x) for x in vals], "max": float(worst), "passed": bool(worst <= CERT_TOL)}


def form_report(form: Form) -> dict:
    v = form.v
    meta = form.meta
    if meta.get("kind") == "tau":
        expected = {w: -m for w, m in meta["divisor"].points}
        mirror = form.mirror_residual("real")
    else:
        expected = {w: -m for w, m in meta["D1"].points}
        expected.update({w: nn for w, nn in meta["D2"].points})
        mirror = form.mirror_residual("imag")
    rc = residue_certificate(form, expected, v.eps_div / 2)
    ap = a_period_certificate(form)
    return {"kind": meta.get("kind"), "residues": rc, "a_periods": ap,
            "misfit": float(meta["misfit"]), "mirror_residual": float(mirror),
            "warnings": meta.get("warnings", []),
            "passed": bool(rc["passed"] and ap["passed"] and meta["misfit"] <= MISFIT_TOL
                           and mirror <= MIRROR_TOL)}


def domain_certificates(v: DomainParams, K: int = K_DEFAULT, divisors: Sequence[Divisor] = (),
                        pairs: Sequence[tuple] = ()) -> dict:
    """Everything the domain command reports: eta duality, Pi, tau and kappa checks."""
    basis = eta_basis(v, K)
    pm = period_matrix(v, K, basis)
    dual = basis.duality_matrix()
    dual_err = float(np.max(np.abs(dual - np.eye(v.n))))
    mirror = max(f.mirror_residual("imag") for f in basis.forms)
    certs = {
        "misfit": {"value": basis.misfit, "tol": MISFIT_TOL, "passed": bool(basis.misfit <= MISFIT_TOL)},
        "eta_duality": {"value": dual_err, "tol": CERT_TOL, "passed": bool(dual_err <= CERT_TOL)},
        "eta_mirror": {"value": mirror, "tol": MIRROR_TOL, "passed": bool(mirror <= MIRROR_TOL)},
        "pi_imaginary": {"value": pm.max_real, "tol": CERT_TOL, "passed": bool(pm.max_real <= CERT_TOL)},
        "pi_symmetric": {"value": pm.asymmetry, "tol": CERT_TOL, "passed": bool(pm.asymmetry <= CERT_TOL)},
        "pi_routes": {"value": pm.route_mismatch, "tol": CERT_TOL,
                      "passed": bool(pm.route_mismatch <= CERT_TOL)},
        "pi_representatives": {"value": pm.representative_mismatch, "tol": CERT_TOL,
                               "passed": bool(pm.representative_mismatch <= CERT_TOL)},
    }
    forms = []
    for D in divisors:
        forms.append(form_report(tau_form(v, D, K, basis)))
    for D1, D2 in pairs:
        forms.append(form_report(kappa_form(v, D1, D2, K, basis)))
    passed = all(c["passed"] for c in certs.values()) and all(f["passed"] for f in forms)
    return {"n": v.n, "K": K, "c": [[x.real, x.imag] for x in v.c], "r": list(v.r),
            "certificates": certs, "forms": forms, "warnings": basis.warnings,
            "condition_number": max(m.cond for m in basis.measures),
            "period_matrix": [[[z.real, z.imag] for z in row] for row in pm.Pi],
            "passed": bool(passed), "_Pi": pm.Pi}


def write_period_csv(Pi: np.ndarray, path) -> None:
    n = Pi.shape[0]
    head = ",".join(f"re_{j + 1},im_{j + 1}" for j in range(n))
    lines = [head]
    for row in Pi:
        # + 0.0 turns the -0.0 of an exactly imaginary entry into 0
        lines.append(",".join(f"{z.real + 0.0:.17g},{z.imag + 0.0:.17g}" for z in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
