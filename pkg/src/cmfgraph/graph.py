"""The maximal immersion X = Re int (phi1, phi2, phi3) and what we measure on it.

X is integrated from a fixed base point along planned routes.  For the
Riemann family the base is a real point to the right of every cut; two hubs
straight above and below it are cached, and a target in the upper (lower)
half plane is reached by a straight segment from the upper (lower) hub, so
routes never cross the real axis.  The alternate route crosses the axis in a
different gap, which makes it non-homotopic to the first one and a genuine
test of the imaginary-period property.

For local models and the catenoid the base point is z = 1 on the singular
circle, and targets are reached along chords of the unit circle followed by
a radial segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import nearest_root
from .lorentz import Vec3L, stereographic_array
from .quadrature import (AccuracyError, PeriodSet, TrackedPath, adaptive_integral,
                         integrate_path, period_set)
from .weierstrass import StandoffError, WeierstrassEvaluator


class SingularityCollapseError(RuntimeError):
    """Sampled limits of X on a singular cycle do not agree."""


class FitError(RuntimeError):
    pass


class MeshSpecError(ValueError):
    pass


@dataclass
class AsymptoticFit:
    c: float
    b: float
    a1: float
    a2: float
    residual_norm: float
    radii: list = field(default_factory=list)
    annulus_residuals: list = field(default_factory=list)

    def decay_ratios(self):
        r = self.annulus_residuals
        return [r[i] / r[i + 1] for i in range(len(r) - 1) if r[i + 1] > 0]


@dataclass
class MeshSpec:
    radial: int = 32
    angular: int = 32
    rings: int = 8
    r_min: float = 0.05
    r_max: float = 0.95

    @classmethod
    def parse(cls, text: str, **kw) -> "MeshSpec":
        if not text or not str(text).strip():
            raise MeshSpecError("empty mesh spec")
        try:
            a, b = str(text).lower().split("x")
            return cls(radial=int(a), angular=int(b), **kw)
        except ValueError as exc:
            raise MeshSpecError(f"mesh spec must look like 32x32, got {text!r}") from exc

    def validate(self):
        if self.radial < 2 or self.angular < 3:
            raise MeshSpecError("mesh needs at least 2 radial and 3 angular samples")
        if self.rings < 0:
            raise MeshSpecError("ring count must be nonnegative")
        if not 0 < self.r_min < self.r_max < 1:
            raise MeshSpecError("need 0 < r_min < r_max < 1")


@dataclass
class MeshSample:
    z: np.ndarray
    X: np.ndarray
    faces: np.ndarray
    abs_g: np.ndarray
    conformal: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.z)


def _grid_faces(n_rad: int, n_ang: int, offset: int = 0) -> np.ndarray:
    """Triangles of a radial x periodic-angular grid, vertex index i*n_ang + j."""
    faces = []
    for i in range(n_rad - 1):
        for j in range(n_ang):
            a = offset + i * n_ang + j
            b = offset + i * n_ang + (j + 1) % n_ang
            c = a + n_ang
            d = b + n_ang
            faces.append((a, b, d))
            faces.append((a, d, c))
    return np.array(faces, dtype=np.int64).reshape(-1, 3)


class MaximalGraph:
    def __init__(self, ev: WeierstrassEvaluator, tol: float = 1e-11, normalize: bool = True,
                 check_periods: bool = True):
        self.ev = ev
        self.tol = tol
        self.base_z, self.base_w = ev.base_point()
        self.offset = np.zeros(3)
        self.periods: PeriodSet = period_set(ev, tol=min(tol, 1e-10)) if check_periods else None
        self._hubs = {}
        if ev.branched:
            self.H = 0.5 * ev.scale
            for side in (1, -1):
                hz = self.base_z + 1j * side * self.H
                res = self._integrate([self.base_z, hz], self.base_w)
                self._hubs[side] = (hz, np.real(res.value), res.end_w)
        self._q = None
        if normalize:
            q0 = self.singular_point(0, raw=True)
            self.offset = -np.asarray(q0)

    # ------------------------------------------------------------------
    def _integrate(self, verts, w0, tol=None, keep=False, rel_tol=0.0):
        ev = self.ev
        path = TrackedPath(verts, w0)
        return integrate_path(ev, path, self.tol if tol is None else tol, keep_panels=keep,
                              eps=0.5 * ev.eps, rel_tol=rel_tol)

    def route(self, z: complex, route: int = 0, side: int | None = None) -> list:
        """Vertices of the planned path from the base point to z."""
        z = complex(z)
        ev = self.ev
        if ev.branched:
            if side is None:
                side = 1 if z.imag >= 0 else -1
            hub = self._hubs[side][0]
            if route == 0:
                return [self.base_z, hub, z]
            xg = ev.gap_points()[0]
            other = self._hubs[-side][0]
            return [self.base_z, other, xg - 1j * side * self.H, xg + 1j * side * self.H, z]
        # disc models
        r, th = abs(z), math.atan2(z.imag, z.real)
        if route == 0:
            steps = max(1, int(math.ceil(abs(th) / (math.pi / 16))))
            arc = [complex(np.exp(1j * th * i / steps)) for i in range(steps + 1)]
            return _dedupe(arc + [z])
        # go in to |z| = 1/2 and around the other way
        r0 = 0.5
        target = th - 2 * math.pi if th >= 0 else th + 2 * math.pi
        steps = max(1, int(math.ceil(abs(target) / (math.pi / 16))))
        arc = [r0 * complex(np.exp(1j * target * i / steps)) for i in range(steps + 1)]
        return _dedupe([self.base_z] + arc + [z])

    def raw_X(self, z: complex, route: int = 0, side: int | None = None, with_w: bool = False):
        """X(z) before normalization, and the sheet value reached."""
        z = complex(z)
        verts = self.route(z, route, side)
        ev = self.ev
        if ev.branched and route == 0:
            s = verts[1]
            key = 1 if s.imag > 0 else -1
            hz, hx, hw = self._hubs[key]
            if z == hz:
                X, w = hx.copy(), hw
            else:
                res = self._integrate([hz, z], hw)
                X, w = hx + np.real(res.value), res.end_w
        else:
            verts = _dedupe(verts)
            if len(verts) == 1:
                X, w = np.zeros(3), self.base_w
            else:
                res = self._integrate(verts, self.base_w)
                X, w = np.real(res.value), res.end_w
        return (X, w) if with_w else X

    def evaluate_X(self, z: complex, route: int = 0, side: int | None = None) -> Vec3L:
        return Vec3L.of(self.raw_X(z, route, side) + self.offset)

    def X_and_w(self, z, route=0, side=None):
        X, w = self.raw_X(z, route, side, with_w=True)
        return X + self.offset, w

    # ------------------------------------------------------------------
    def cycle_samples(self, j: int, count: int = 64):
        """(z, side) pairs on the singular cycle j, away from its endpoints."""
        ev = self.ev
        if ev.branched:
            iv = ev.intervals[j]
            half = count // 2
            th = np.linspace(0.1 * np.pi, 0.9 * np.pi, half)
            xs = 0.5 * (iv.lo + iv.hi) + iv.half_length * np.cos(th)
            return [(complex(x), 1) for x in xs] + [(complex(x), -1) for x in xs]
        th = 2 * np.pi * np.arange(count) / count - np.pi + np.pi / count
        return [(complex(np.exp(1j * t)), None) for t in th]

    def singular_point(self, j: int, raw: bool = False, count: int = 64) -> Vec3L:
        """Limit value of X on the singular cycle j, with a spread certificate."""
        if not 0 <= j < self.ev.n_cycles:
            raise IndexError(f"cycle index {j} out of range")
        vals = np.array([self.raw_X(z, 0, side) for z, side in self.cycle_samples(j, count)])
        diff = vals[:, None, :] - vals[None, :, :]
        spread = float(np.max(np.linalg.norm(diff, axis=-1)))
        # quadrature stops refining at round-off, so the bound does too
        size = max(1.0, getattr(self.ev, "scale", 1.0), float(np.max(np.abs(vals))))
        bound = max(100 * self.tol, 1e3 * np.finfo(float).eps) * size
        if spread > bound:
            raise SingularityCollapseError(
                f"X is not constant on cycle {j}: spread {spread:.3g} exceeds {bound:.3g}")
        q = vals.mean(axis=0)
        return Vec3L.of(q if raw else q + self.offset)

    def singular_points(self) -> list:
        if self._q is None:
            self._q = [self.singular_point(j) for j in range(self.ev.n_cycles)]
        return self._q

    # ------------------------------------------------------------------
    def cone_check(self, j: int, standoffs=(1e-2, 1e-3), count: int = 32) -> dict:
        """Deviation of X near q_j from the light cone through q_j."""
        ev = self.ev
        q = np.asarray(self.singular_points()[j])
        devs, pointing = [], []
        for d in standoffs:
            pts = self._standoff_points(j, d, count)
            worst = 0.0
            signs = []
            for z, side in pts:
                X = self.evaluate_X(z, 0, side)
                dx3 = X[2] - q[2]
                if abs(dx3) < 1e-300:
                    continue
                rho = math.hypot(X[0] - q[0], X[1] - q[1])
                worst = max(worst, abs(rho / abs(dx3) - 1))
                signs.append(np.sign(dx3))
            devs.append(worst)
            pointing.append(float(np.mean(signs)) if signs else 0.0)
        dev_small = devs[int(np.argmin(standoffs))]
        order = np.argsort(standoffs)[::-1]
        monotone = all(devs[order[i + 1]] < devs[order[i]] for i in range(len(order) - 1))
        # surface below q means the singularity points upward
        direction = "up" if pointing[-1] < 0 else "down"
        return {"cycle": j, "standoffs": list(standoffs), "deviation": devs,
                "monotone": monotone, "passed": bool(dev_small < 1e-2 and monotone),
                "pointing": direction}

    def _standoff_points(self, j, d, count):
        ev = self.ev
        if ev.branched:
            iv = ev.intervals[j]
            xs = iv.lo + (iv.hi - iv.lo) * np.linspace(0.1, 0.9, count // 2)
            return [(complex(x, d), 1) for x in xs] + [(complex(x, -d), -1) for x in xs]
        th = 2 * np.pi * np.arange(count) / count - np.pi + np.pi / count
        return [(complex((1 - d) * np.exp(1j * t)), None) for t in th]

    # ------------------------------------------------------------------
    def march(self, verts, X0, w0, tol=None):
        """X at every vertex of a polyline, integrating edge by edge."""
        out_X = [np.asarray(X0, dtype=float)]
        out_w = [w0]
        X, w = np.asarray(X0, dtype=float), w0
        for a, b in zip(verts[:-1], verts[1:]):
            res = self._integrate([a, b], w, tol)
            X = X + np.real(res.value)
            w = res.end_w
            out_X.append(X)
            out_w.append(w)
        return np.array(out_X), out_w

    def projected_winding(self, loop, center=(0.0, 0.0), max_step: float = np.pi / 8,
                          max_depth: int = 40) -> float:
        """Winding of (x1, x2) - center along the image of a closed loop.

        Each edge is bisected until the argument changes by less than
        ``max_step`` across it, with X carried along incrementally.
        """
        cx, cy = center
        X0, w0 = self.X_and_w(loop[0])
        total = 0.0

        def proj(X):
            return complex(X[0] - cx, X[1] - cy)

        def edge(a, b, Xa, wa, depth):
            res = self._integrate([a, b], wa)
            Xb = Xa + np.real(res.value)
            step = np.angle(proj(Xb) / proj(Xa))
            if abs(step) > max_step:
                if depth >= max_depth:
                    raise AccuracyError("winding: projection passes through the center")
                m = 0.5 * (a + b)
                s1, Xm, wm = edge(a, m, Xa, wa, depth + 1)
                s2, Xb, wb = edge(m, b, Xm, wm, depth + 1)
                return s1 + s2, Xb, wb
            return step, Xb, res.end_w

        X, w = X0, w0
        for a, b in zip(loop[:-1], loop[1:]):
            st, X, w = edge(a, b, X, w, 0)
            total += st
        return total / (2 * np.pi)

    def covering_degree(self, j: int = 0, d: float = 1e-3, n: int = 64) -> int:
        """Winding of x1 + i x2 around pi(q_j) along a loop at standoff d."""
        q = np.asarray(self.singular_points()[j])
        vals = [self.projected_winding(self._standoff_loop(j, d, m), (q[0], q[1]))
                for m in (n, 2 * n)]
        a, b = vals
        if abs(a - round(a)) > 1e-3 or round(a) != round(b):
            raise AccuracyError(f"winding not integer-stable under refinement: {a}, {b}")
        return abs(int(round(a)))

    def _standoff_loop(self, j, d, m):
        ev = self.ev
        if ev.branched:
            return ev.cycle_loop(j, d, n_arc=max(8, m // 8))
        t = 2 * np.pi * np.arange(m + 1) / m
        loop = [complex((1 - d) * np.exp(1j * x)) for x in t]
        loop[-1] = loop[0]
        return loop

    # ------------------------------------------------------------------
    def interior_samples(self, count: int, rng: np.random.Generator):
        ev = self.ev
        if ev.branched:
            lo, hi = ev._lo, ev._hi
            span = hi - lo
            out = []
            while len(out) < count:
                z = complex(rng.uniform(lo - span, hi + span), rng.uniform(-span, span))
                if abs(z.imag) > 10 * ev.eps and np.min(np.abs(ev.avoid_points - z)) > 10 * ev.eps:
                    out.append(z)
            return np.array(out)
        r = np.sqrt(rng.uniform(0.05 ** 2, 0.999 ** 2, count))
        t = rng.uniform(-np.pi, np.pi, count)
        return r * np.exp(1j * t)

    def graph_certificate(self, count: int = 2000, seed: int = 0) -> dict:
        """Sampled necessary conditions for X to be an entire spacelike graph."""
        ev = self.ev
        rng = np.random.default_rng(seed)
        z = self.interior_samples(count, rng)
        w = ev.sheet_w(z) if ev.branched else None
        P = ev.forms(z, w)
        det = np.imag(P[0] * np.conj(P[1]))
        lam = ev.conformal_factor(z, w)
        ratio = det / lam
        g = np.abs(ev.g(z, w))
        sign = np.sign(ratio)
        report = {"samples": int(count), "jacobian_sign": int(sign[0]),
                  "min_abs_ratio": float(np.min(np.abs(ratio))),
                  "max_abs_g": float(np.max(g))}
        bad = np.nonzero(sign != sign[0])[0]
        ok = len(bad) == 0 and report["min_abs_ratio"] >= 1 - 1e-9 and report["max_abs_g"] < 1
        if len(bad):
            report["counterexample"] = [float(z[bad[0]].real), float(z[bad[0]].imag)]
        if ev.kind == "local" or ev.kind == "catenoid":
            deg = self.covering_degree(0)
            report["covering_degree"] = deg
            ok = ok and deg == 1
        if ev.kind in ("riemann", "catenoid"):
            report["end_winding"] = self.end_winding()
            ok = ok and abs(report["end_winding"]) == 1
        report["passed"] = bool(ok)
        return report

    def end_winding(self, n: int = 64) -> int:
        """Degree of the horizontal projection along a loop around the end."""
        return int(round(self.projected_winding(self.ev.end_loop(n=n))))

    # ------------------------------------------------------------------
    def _end_seed(self, target: complex, z_prev: complex, t_prev: complex) -> complex:
        """Guess for the parameter hitting horizontal target (x1 + i x2)."""
        ev = self.ev
        if ev.branched:
            # x1 = 2 Im z + const, x2 ~ 2 Re z + const in the far field
            d = target - t_prev
            return z_prev + (d.imag + 1j * d.real) / 2
        # catenoid-type end: x1 + i x2 ~ -i/(2 z) conj-ish, so rescale the previous point
        return z_prev * abs(t_prev) / abs(target) * np.exp(1j * (np.angle(target) - np.angle(t_prev)))

    def _newton(self, target: complex, z: complex, X: np.ndarray, w, max_iter: int = 20):
        ev = self.ev
        scale = abs(target)
        for _ in range(max_iter):
            err = complex(X[0] - target.real, X[1] - target.imag)
            if abs(err) <= 1e-12 * max(1.0, scale):
                return z, X, w
            P = ev.forms(np.array([z]), None if w is None else np.array([w]))[:, 0]
            J = np.array([[P[0].real, -P[0].imag], [P[1].real, -P[1].imag]])
            dx, dy = np.linalg.solve(J, [-err.real, -err.imag])
            step = complex(dx, dy)
            # keep steps modest relative to the distance from the origin of the chart
            lim = 0.5 * abs(z) if not ev.branched else 0.5 * abs(z) + 1.0
            if abs(step) > lim:
                step *= lim / abs(step)
            z_new = z + step
            res = self._integrate([z, z_new], w, tol=1e-12, rel_tol=1e-14)
            X = X + np.real(res.value)
            z, w = z_new, res.end_w
        raise FitError(f"Newton inversion did not converge for target {target}")

    def asymptotic_fit(self, radii=None, n_angles: int = 32) -> AsymptoticFit:
        """Least-squares fit of u = c log R + b + (a1 x1 + a2 x2)/R^2 far out."""
        ev = self.ev
        if ev.kind == "local":
            raise FitError("local models have no graph-like end")
        qs = np.array([np.asarray(q) for q in self.singular_points()])
        extent = max(1.0, float(np.max(np.hypot(qs[:, 0], qs[:, 1]))))
        if radii is None:
            # far enough out that the neglected R^-2 terms bias b by < 1e-7
            radii = [1e4 * extent * 2 ** i for i in range(3)]
        radii = sorted(float(r) for r in radii)
        if len(radii) < 2:
            raise FitError("need at least two annuli")
        if radii[0] < 10 * extent:
            raise FitError(f"radii must be at least {10 * extent:g}")
        # start from a far point reached by the router
        if ev.branched:
            z = complex(0.0, radii[0] / 2) + 0.5 * (ev._lo + ev._hi)
        else:
            z = complex(0.0, 0.5 / radii[0])
        X, w = self.X_and_w(z)
        t_prev = complex(X[0], X[1])
        samples = []
        alphas = 2 * np.pi * np.arange(n_angles) / n_angles + np.pi / 2
        for R in radii:
            for a in alphas:
                target = R * complex(np.cos(a), np.sin(a))
                z_seed = self._end_seed(target, z, t_prev)
                res = self._integrate([z, z_seed], w, tol=1e-12, rel_tol=1e-14)
                X, w, z = X + np.real(res.value), res.end_w, z_seed
                z, X, w = self._newton(target, z, X, w)
                t_prev = complex(X[0], X[1])
                samples.append((R, X[0], X[1], X[2]))
        S = np.array(samples)
        rho = np.hypot(S[:, 1], S[:, 2])
        A = np.column_stack([np.log(rho), np.ones_like(rho), S[:, 1] / rho ** 2, S[:, 2] / rho ** 2])
        if np.linalg.matrix_rank(A) < 4:
            raise FitError("degenerate sampling for the asymptotic fit")
        coef, *_ = np.linalg.lstsq(A, S[:, 3], rcond=None)
        resid = S[:, 3] - A @ coef
        per = [float(np.max(np.abs(resid[S[:, 0] == R]))) for R in radii]
        return AsymptoticFit(float(coef[0]), float(coef[1]), float(coef[2]), float(coef[3]),
                             float(np.sqrt(np.mean(resid ** 2))), radii, per)

    # ------------------------------------------------------------------
    def sample_mesh(self, spec: MeshSpec | None) -> MeshSample:
        if spec is None:
            raise MeshSpecError("empty mesh spec")
        spec.validate()
        ev = self.ev
        if ev.branched:
            patches = [self._ellipse_patch(j, spec) for j in range(ev.n_cycles)]
            if spec.rings >= 2:
                patches.append(self._far_patch(spec))
        else:
            r = np.linspace(spec.r_max, spec.r_min, spec.radial)
            t = 2 * np.pi * (np.arange(spec.angular) + 0.5) / spec.angular - np.pi
            grid = r[:, None] * np.exp(1j * t[None, :])
            patches = [grid]
        zs, Xs, faces = [], [], []
        offset = 0
        for grid in patches:
            Xg, wg = self._march_grid(grid)
            zs.append(grid.ravel())
            Xs.append(Xg.reshape(-1, 3))
            faces.append(_grid_faces(grid.shape[0], grid.shape[1], offset))
            offset += grid.size
        z = np.concatenate(zs)
        w = ev.sheet_w(z) if ev.branched else None
        return MeshSample(z, np.concatenate(Xs), np.concatenate(faces),
                          np.abs(ev.g(z, w)), ev.conformal_factor(z, w))

    def _march_grid(self, grid: np.ndarray):
        """X on a (radial, angular) grid: first ring around, then each spoke."""
        n_r, n_a = grid.shape
        X = np.empty((n_r, n_a, 3))
        W = np.empty((n_r, n_a), dtype=complex)
        ring = [complex(z) for z in grid[0]] + [complex(grid[0, 0])]
        X0, w0 = self.X_and_w(ring[0])
        Xr, wr = self.march(ring, X0, w0)
        for j in range(n_a):
            X[0, j] = Xr[j]
            W[0, j] = wr[j] if wr[j] is not None else np.nan
            spoke = [complex(z) for z in grid[:, j]]
            Xs, ws = self.march(spoke, Xr[j], wr[j])
            X[:, j] = Xs
        return X, W

    def _ellipse_patch(self, j: int, spec: MeshSpec) -> np.ndarray:
        ev = self.ev
        iv = ev.intervals[j]
        m, h = 0.5 * (iv.lo + iv.hi), iv.half_length
        # room to the neighbouring cuts along the axis
        gaps = [abs(v) for v in ev.avoid_points.real - m if abs(v) > h * (1 + 1e-12)]
        room = min(gaps) - h if gaps else h
        mu_max = math.acosh(1 + 0.45 * room / h)
        mu_min = math.acosh(1 + 2 * ev.eps / h) * 1.01
        if mu_min >= mu_max:
            raise MeshSpecError("standoff leaves no room for an elliptic patch")
        mu = np.linspace(mu_max, mu_min, spec.radial)
        nu = 2 * np.pi * (np.arange(spec.angular) + 0.5) / spec.angular
        return m + h * np.cosh(mu[:, None] + 1j * nu[None, :])

    def _far_patch(self, spec: MeshSpec) -> np.ndarray:
        ev = self.ev
        mid = 0.5 * (ev._lo + ev._hi)
        r0 = 0.5 * (ev._hi - ev._lo) + 0.5 * ev.scale
        radii = r0 * 2.0 ** np.arange(spec.rings)
        t = 2 * np.pi * (np.arange(spec.angular) + 0.5) / spec.angular
        return mid + radii[:, None] * np.exp(1j * t[None, :])


def _dedupe(verts):
    out = [complex(verts[0])]
    for v in verts[1:]:
        if complex(v) != out[-1]:
            out.append(complex(v))
    return out


def write_obj(mesh: MeshSample, path):
    with open(path, "w") as fh:
        for x in mesh.X:
            fh.write("v %.17g %.17g %.17g\n" % tuple(x))
        for f in mesh.faces:
            fh.write("f %d %d %d\n" % tuple(f + 1))


def write_csv(mesh: MeshSample, path):
    with open(path, "w") as fh:
        fh.write("re_z,im_z,x1,x2,x3,abs_g\n")
        for z, x, g in zip(mesh.z, mesh.X, mesh.abs_g):
            fh.write("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n" % (z.real, z.imag, x[0], x[1], x[2], g))


def lipschitz_check(mesh: MeshSample, pairs: int = 1000, seed: int = 0) -> dict:
    """|u(x) - u(y)| < |x - y| on random vertex pairs of a mesh."""
    rng = np.random.default_rng(seed)
    n = mesh.n_vertices
    i = rng.integers(0, n, pairs)
    j = (i + rng.integers(1, n, pairs)) % n       # never equal to i
    X = mesh.X
    du = np.abs(X[i, 2] - X[j, 2])
    dx = np.hypot(X[i, 0] - X[j, 0], X[i, 1] - X[j, 1])
    ok = du < dx
    return {"pairs": int(len(i)), "violations": int(np.sum(~ok)),
            "max_ratio": float(np.max(du / dx)), "passed": bool(np.all(ok))}


def build_graph(ev: WeierstrassEvaluator, tol: float = 1e-11) -> MaximalGraph:
    return MaximalGraph(ev, tol)
