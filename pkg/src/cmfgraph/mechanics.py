"""Flux and torque along closed curves, the balance laws, and the vertical-flux probe.

The flux along a curve bounding a compact piece of the surface is the
integral of the exterior unit conormal.  Two independent routes are used:

* conormal route: nu ds = dX ^ n with n = sigma(-conj g) the unit normal;
* conjugate route: nu ds = Im(Phi' dz) (the harmonic conjugate of X).

Both are accumulated over the same quadrature panels; the torque reuses the
panels too, with X at the Kronrod nodes obtained by cumulative integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import MaximalGraph
from .lorentz import Vec3L, causal_class, lorentz_wedge, minkowski_inner, stereographic_array
from .quadrature import TrackedPath, integrate_path

TOL_BALANCE = 1e-6


@dataclass
class LoopMechanics:
    label: str
    F: np.ndarray
    T: np.ndarray
    F_conj: np.ndarray
    T_conj: np.ndarray

    @property
    def mismatch(self) -> float:
        return float(max(np.max(np.abs(self.F - self.F_conj)), np.max(np.abs(self.T - self.T_conj))))


@dataclass
class FluxTorque:
    cycles: list
    end: LoopMechanics
    origin: np.ndarray
    balance_residual_flux: float
    balance_residual_torque: float
    route_mismatch: float
    periods_ok: bool
    tol_balance: float = TOL_BALANCE
    end_growth: float | None = None
    consistency: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def fluxes(self):
        return [c.F for c in self.cycles]

    @property
    def torques(self):
        return [c.T for c in self.cycles]

    @property
    def passed(self) -> bool:
        return bool(self.periods_ok and self.balance_residual_flux <= self.tol_balance
                    and self.balance_residual_torque <= self.tol_balance
                    and self.route_mismatch <= 1e-8)

    def to_json(self) -> dict:
        def vec(v):
            return [float(x) for x in v]
        loops = self.cycles + [self.end]
        out = {
            "fluxes": [{"cycle": c.label, "vector": vec(c.F)} for c in loops],
            "torques": [{"cycle": c.label, "vector": vec(c.T)} for c in loops],
            "balance_residual_flux": float(self.balance_residual_flux),
            "balance_residual_torque": float(self.balance_residual_torque),
            "end_growth": None if self.end_growth is None else float(self.end_growth),
            "consistency": None if self.consistency is None else float(self.consistency),
            "origin": vec(self.origin),
            "route_mismatch": float(self.route_mismatch),
            "periods_imaginary": bool(self.periods_ok),
            "tol_balance": float(self.tol_balance),
            "singular_flux_causal": [causal_class(c.F) for c in self.cycles],
            "passed": self.passed,
        }
        out.update(self.extra)
        return out


def loop_mechanics(graph: MaximalGraph, loop, orientation: int = 1, origin=(0.0, 0.0, 0.0),
                   tol: float = 1e-12, label: str = "") -> LoopMechanics:
    """Flux and torque along a closed polyline, with ``orientation`` = +-1."""
    ev = graph.ev
    origin = np.asarray(origin, dtype=float)
    X0, w0 = graph.X_and_w(loop[0])
    scale = getattr(ev, "scale", 1.0)
    res = integrate_path(ev, TrackedPath(loop, w0), tol * scale, keep_panels=True,
                         eps=0.25 * ev.eps)
    F = np.zeros(3)
    Fc = np.zeros(3)
    T = np.zeros(3)
    Tc = np.zeros(3)
    Xcur = np.asarray(X0, dtype=float)
    for p in res.panels:
        inc = p.f * p.dzw                      # (3, 15) complex increments
        dX = np.real(inc).T                    # (15, 3)
        nu_conj = np.imag(inc).T
        g = ev.g(p.z, p.w)
        n = stereographic_array(-np.conj(g))
        nu = lorentz_wedge(dX, n)
        Xn = Xcur[None, :] + np.real(p.cumulative()).T - origin
        F += nu.sum(axis=0)
        Fc += nu_conj.sum(axis=0)
        T += lorentz_wedge(Xn, nu).sum(axis=0)
        Tc += lorentz_wedge(Xn, nu_conj).sum(axis=0)
        Xcur = Xcur + np.real(inc.sum(axis=1))
    s = float(orientation)
    return LoopMechanics(label, s * F, s * T, s * Fc, s * Tc)


def flux(graph: MaximalGraph, loop, orientation: int = 1, **kw) -> Vec3L:
    return Vec3L.of(loop_mechanics(graph, loop, orientation, **kw).F)


def torque(graph: MaximalGraph, loop, origin, orientation: int = 1, **kw) -> Vec3L:
    return Vec3L.of(loop_mechanics(graph, loop, orientation, origin=origin, **kw).T)


def default_standoff(ev) -> float:
    if ev.branched:
        return 0.1 * ev.params.min_gap
    return 0.1


def cycle_loop(graph: MaximalGraph, j: int, standoff: float | None = None, shape: str = "stadium"):
    ev = graph.ev
    s = default_standoff(ev) if standoff is None else standoff
    if ev.branched:
        return ev.cycle_loop(j, s, shape=shape)
    return ev.cycle_loop(j, s)


def balance_report(graph: MaximalGraph, origin=None, standoff: float | None = None,
                   tol_balance: float = TOL_BALANCE, tol: float = 1e-12) -> FluxTorque:
    ev = graph.ev
    if origin is None:
        origin = np.asarray(graph.singular_points()[0])
    origin = np.asarray(origin, dtype=float)
    cycles = []
    for j in range(ev.n_cycles):
        loop = cycle_loop(graph, j, standoff)
        cycles.append(loop_mechanics(graph, loop, ev.cycle_sign, origin, tol, label=str(j)))
    end = loop_mechanics(graph, ev.end_loop(), ev.end_sign, origin, tol, label="inf")
    Fsum = end.F + sum(c.F for c in cycles)
    Tsum = end.T + sum(c.T for c in cycles)
    fscale = max(np.linalg.norm(c.F) for c in cycles)
    r1 = float(np.linalg.norm(Fsum) / fscale)
    r2 = float(np.linalg.norm(Tsum) / fscale)
    mismatch = max(c.mismatch for c in cycles + [end]) / max(1.0, fscale)
    periods_ok = graph.periods.certified() if graph.periods is not None else True
    rep = FluxTorque(cycles, end, origin, r1, r2, float(mismatch), periods_ok, tol_balance)
    rep.extra["F_inf_from_cycles"] = [float(x) for x in -sum(c.F for c in cycles)]
    return rep


def end_growth_consistency(report: FluxTorque, c_fit: float) -> float:
    """|F_inf.x3 - 2 pi c| / (1 + |2 pi c|)."""
    F = report.end.F
    two_pi_c = 2 * math.pi * c_fit
    report.end_growth = float(c_fit)
    report.consistency = float(abs(F[2] - two_pi_c) / (1 + abs(two_pi_c)))
    report.extra["end_flux_horizontal"] = float(math.hypot(F[0], F[1]))
    return report.consistency


def torque_identity_residuals(graph: MaximalGraph, report: FluxTorque) -> list:
    """Relative |T_j - (q_j - origin) ^ F_j| per singularity."""
    out = []
    for c, q in zip(report.cycles, graph.singular_points()):
        pred = lorentz_wedge(np.asarray(q) - report.origin, c.F)
        scale = max(np.linalg.norm(c.F) * max(1.0, np.linalg.norm(np.asarray(q) - report.origin)), 1e-300)
        out.append(float(np.linalg.norm(c.T - pred) / scale))
    return out


def catenoid_characterization_probe(graphs: list, labels: list | None = None,
                                    vertical_tol: float = 1e-8) -> dict:
    """Horizontal singular fluxes and singularity directions across a family.

    A surface has 'all singular fluxes vertical' when every horizontal flux
    component is below ``vertical_tol`` relative to the flux size.
    """
    labels = labels or [repr(g.ev) for g in graphs]
    rows = []
    for label, graph in zip(labels, graphs):
        rep = balance_report(graph)
        horiz = [float(math.hypot(c.F[0], c.F[1])) for c in rep.cycles]
        size = max(np.linalg.norm(c.F) for c in rep.cycles)
        pointing = [graph.cone_check(j)["pointing"] for j in range(graph.ev.n_cycles)]
        c = float(rep.end.F[2] / (2 * math.pi))
        planar = abs(c) < 1e-9
        same = len(set(pointing)) == 1
        violation = False
        if same:
            if planar:
                violation = True
            elif c > 0 and pointing[0] == "up":
                violation = True
            elif c < 0 and pointing[0] == "down":
                violation = True
        rows.append({"surface": label, "kind": graph.ev.kind, "horizontal_flux": horiz,
                     "max_horizontal_flux": max(horiz),
                     "all_vertical": bool(max(horiz) <= vertical_tol * size),
                     "pointing": pointing, "log_growth": c,
                     "timelike": [minkowski_inner(cc.F, cc.F) < 0 for cc in rep.cycles],
                     "end_direction_violation": violation})
    vertical = [r for r in rows if r["all_vertical"]]
    return {"rows": rows,
            "only_catenoid_vertical": all(r["kind"] == "catenoid" for r in vertical),
            "violations": [r["surface"] for r in rows if r["end_direction_violation"]]}
