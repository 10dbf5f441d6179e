"""Command line front end.

    cmfgraph build     family=riemann n=1 c=2 b=3 mesh=32x32 out=r1.obj
    cmfgraph mechanics family=catenoid
    cmfgraph domain    c=3 r=0.5 K=24 out=pi.csv
    cmfgraph sweep     c1=1.5:4:5 b1=4.5:8:5 out=sweep.csv

Settings come from ``--config FILE`` (key=value lines, '#' comments,
comma-separated lists), then key=value arguments, then flags.  Exit codes:
0 success, 2 invalid input, 3 certificate failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import domain as dom
from . import report
from .curve import ContinuationError, CurveError, CurveParams
from .graph import (FitError, MaximalGraph, MeshSpec, MeshSpecError, SingularityCollapseError,
                    lipschitz_check, write_csv, write_obj)
from .hypotheses import HypothesisError, validate_hypotheses
from .lorentz import causal_class, minkowski_inner
from .mechanics import TOL_BALANCE, balance_report, end_growth_consistency, torque_identity_residuals
from .quadrature import AccuracyError
from .weierstrass import Catenoid, LocalModel, RiemannFamily, StandoffError

EXIT_OK, EXIT_INVALID, EXIT_CERT, EXIT_NUMERIC = 0, 2, 3, 4

COMMON = {"out", "tol", "format", "threads"}
FAMILY_KEYS = {"family", "n", "c", "b", "m", "k", "strict"}
KEYS = {
    "build": COMMON | FAMILY_KEYS | {"mesh", "rings", "hypotheses", "lipschitz_pairs"},
    "mechanics": COMMON | FAMILY_KEYS | {"tol_balance", "fit", "standoff"},
    "domain": COMMON | {"n", "c", "r", "K", "divisor", "kappa_d1", "kappa_d2"},
    "sweep": COMMON | {"family", "n", "tol_balance"},
}
NUMERIC = {"n", "m", "k", "tol", "threads", "rings", "tol_balance", "standoff", "K",
           "lipschitz_pairs"}


class ConfigError(ValueError):
    pass


class CertificateFailure(RuntimeError):
    pass


# ---------------------------------------------------------------- config

def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_tokens(tokens) -> dict:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ConfigError(f"expected key=value, got {t!r}")
        k, v = t.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _is_sweep_key(cmd, key):
    return cmd == "sweep" and len(key) > 1 and key[0] in "cb" and key[1:].isdigit()


def check_keys(cmd: str, cfg: dict) -> None:
    allowed = KEYS[cmd]
    for key, val in cfg.items():
        if key not in allowed and not _is_sweep_key(cmd, key):
            raise ConfigError(f"unknown key {key!r} for {cmd}")
        if key in NUMERIC:
            x = _float(key, val)
            if not math.isfinite(x):
                raise ConfigError(f"{key} must be finite")
            if key in ("tol", "tol_balance") and x <= 0:
                raise ConfigError(f"{key} must be positive")
        if key in ("c", "b", "r"):
            for x in _list(val):
                z = _complex(key, x)
                if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                    raise ConfigError(f"{key} must be finite")


def _float(key, val) -> float:
    try:
        return float(val)
    except ValueError:
        raise ConfigError(f"{key}={val!r} is not a number") from None


def _int(cfg, key, default=None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    x = _float(key, cfg[key])
    if x != int(x):
        raise ConfigError(f"{key} must be an integer")
    return int(x)


def _list(val: str) -> list:
    return [s.strip() for s in str(val).split(",") if s.strip()]


def _complex(key, s) -> complex:
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"{key}: {s!r} is not a number") from None


def _bool(cfg, key, default) -> bool:
    if key not in cfg:
        return default
    v = str(cfg[key]).lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean")


def make_family(cfg: dict):
    fam = str(cfg.get("family", "riemann")).lower()
    if fam == "riemann":
        c = [float(_complex("c", x).real) for x in _list(cfg.get("c", ""))]
        b = [float(_complex("b", x).real) for x in _list(cfg.get("b", ""))]
        n = _int(cfg, "n", len(c) or 1)
        params = CurveParams(n, tuple(c), tuple(b))
        return RiemannFamily(params, strict=_bool(cfg, "strict", True))
    if fam == "catenoid":
        return Catenoid()
    if fam == "local":
        return LocalModel(_int(cfg, "m", 1), _int(cfg, "k", 0))
    raise ConfigError(f"unknown family {fam!r}")


def _stem(path: str) -> str:
    root, _ext = os.path.splitext(path)
    return root


# ---------------------------------------------------------------- commands

def cmd_build(cfg: dict) -> int:
    ev = make_family(cfg)
    fmt = cfg.get("format", "obj")
    if fmt not in ("obj", "csv", "json"):
        raise ConfigError("format must be obj, csv or json")
    out = cfg.get("out", f"cmf_build.{fmt}")
    spec = MeshSpec.parse(cfg.get("mesh", "32x32"), rings=_int(cfg, "rings", 8))
    spec.validate()
    tol = _float("tol", cfg.get("tol", 1e-11))
    graph = MaximalGraph(ev, tol=tol)
    certs = {"periods_imaginary": {"value": graph.periods.max_real_ratio(),
                                   "passed": graph.periods.certified(1e-8)}}
    qs = graph.singular_points()
    table = []
    conelike = ev.kind in ("riemann", "catenoid") or (ev.m == 1 and ev.k == 0)
    for j, q in enumerate(qs):
        row = {"cycle": j, "q": [float(x) for x in q]}
        if conelike:
            cc = graph.cone_check(j)
            row.update({"standoffs": cc["standoffs"], "cone_slope_deviation": cc["deviation"],
                        "monotone": cc["monotone"], "pointing": cc["pointing"]})
            certs[f"cone_{j}"] = {"value": cc["deviation"][-1], "passed": cc["passed"]}
        table.append(row)
    if ev.kind == "local":
        deg = graph.covering_degree(0)
        certs["covering_degree"] = {"value": deg, "expected": ev.m + ev.k, "passed": deg == ev.m + ev.k}
        hyp = {"applicable": False, "reason": "local models are not built by the explicit construction"}
    else:
        gc = graph.graph_certificate()
        certs["entire_graph"] = gc
        hyp = validate_hypotheses(ev) if _bool(cfg, "hypotheses", True) else {"applicable": False}
        if "passed" in hyp:
            certs["hypotheses"] = {"passed": hyp["passed"]}
    mesh = graph.sample_mesh(spec)
    if ev.kind != "local":
        lc = lipschitz_check(mesh, _int(cfg, "lipschitz_pairs", 1000))
        certs["lipschitz"] = lc
    if fmt == "obj":
        write_obj(mesh, out)
    elif fmt == "csv":
        write_csv(mesh, out)
    else:
        report.write_json({"vertices": mesh.X, "faces": mesh.faces.tolist()}, out)
    stem = _stem(out)
    report.write_json({"family": repr(ev), "singularities": table}, stem + "_singularities.json")
    report.write_json(hyp, stem + "_hypotheses.json")
    passed = all(bool(c.get("passed")) for c in certs.values())
    report.write_json({"family": repr(ev), "vertices": mesh.n_vertices, "certificates": certs,
                       "passed": passed}, stem + "_report.json")
    from .plotting import plot_mesh
    plot_mesh(mesh, qs, stem + ".png", title=repr(ev))
    print(f"{out}: {mesh.n_vertices} vertices, {len(qs)} singularities")
    if not passed:
        bad = sorted(k for k, c in certs.items() if not c.get("passed"))
        raise CertificateFailure("certificates failed: " + ", ".join(bad))
    return EXIT_OK


def mechanics_report(ev, tol_balance=TOL_BALANCE, fit=True, standoff=None, tol=1e-11) -> dict:
    graph = MaximalGraph(ev, tol=tol)
    rep = balance_report(graph, standoff=standoff, tol_balance=tol_balance)
    if fit and ev.kind != "local":
        af = graph.asymptotic_fit()
        end_growth_consistency(rep, af.c)
        rep.extra["asymptotic_fit"] = {"c": af.c, "b": af.b, "a1": af.a1, "a2": af.a2,
                                       "radii": af.radii, "annulus_residuals": af.annulus_residuals}
    rep.extra["torque_identity"] = torque_identity_residuals(graph, rep)
    rep.extra["singular_points"] = [[float(x) for x in q] for q in graph.singular_points()]
    out = rep.to_json()
    out["family"] = repr(ev)
    out["timelike"] = [bool(minkowski_inner(c.F, c.F) < 0) for c in rep.cycles]
    return out


def cmd_mechanics(cfg: dict) -> int:
    ev = make_family(cfg)
    tol_b = _float("tol_balance", cfg.get("tol_balance", TOL_BALANCE))
    standoff = _float("standoff", cfg["standoff"]) if "standoff" in cfg else None
    out = mechanics_report(ev, tol_b, _bool(cfg, "fit", True), standoff,
                           _float("tol", cfg.get("tol", 1e-11)))
    text = report.dumps(out)
    if "out" in cfg:
        with open(cfg["out"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not out["passed"]:
        raise CertificateFailure(
            f"balance residuals {out['balance_residual_flux']:.3g} (flux), "
            f"{out['balance_residual_torque']:.3g} (torque) exceed tol_balance={tol_b:g}")
    return EXIT_OK


def _divisor(key, text) -> dom.Divisor:
    pts = []
    for item in _list(text):
        if ":" in item:
            w, m = item.rsplit(":", 1)
            pts.append((_complex(key, w), int(_float(key, m))))
        else:
            pts.append((_complex(key, item), 1))
    return dom.Divisor(tuple(pts))


def cmd_domain(cfg: dict) -> int:
    c = [_complex("c", x) for x in _list(cfg.get("c", ""))]
    r = [float(_complex("r", x).real) for x in _list(cfg.get("r", ""))]
    n = _int(cfg, "n", len(c))
    if n != len(c):
        raise ConfigError(f"n={n} but {len(c)} centers given")
    v = dom.DomainParams(tuple(c), tuple(r))
    K = _int(cfg, "K", dom.K_DEFAULT)
    divisors = [_divisor("divisor", cfg["divisor"])] if "divisor" in cfg else []
    pairs = []
    if ("kappa_d1" in cfg) != ("kappa_d2" in cfg):
        raise ConfigError("kappa_d1 and kappa_d2 go together")
    if "kappa_d1" in cfg:
        pairs.append((_divisor("kappa_d1", cfg["kappa_d1"]), _divisor("kappa_d2", cfg["kappa_d2"])))
    for D in divisors + [d for p in pairs for d in p]:
        D.validate(v)
    rep = dom.domain_certificates(v, K, divisors, pairs)
    Pi = rep.pop("_Pi")
    out = cfg.get("out", "period_matrix.csv")
    dom.write_period_csv(Pi, out)
    stem = _stem(out)
    report.write_json(rep, stem + "_certificates.json")
    from .plotting import plot_domain
    paths = [dom.b_paths(v, j + 1, 1)[0] for j in range(v.n)]
    pts = [w for D in divisors + [d for p in pairs for d in p] for w, _ in D.points]
    plot_domain(v, stem + ".png", paths, pts)
    for w in rep["warnings"]:
        print("warning:", w, file=sys.stderr)
    if not rep["passed"]:
        bad = sorted(k for k, cc in rep["certificates"].items() if not cc["passed"])
        bad += [f"{f['kind']}" for f in rep["forms"] if not f["passed"]]
        raise CertificateFailure(f"certificates failed: {', '.join(bad)} "
                                 f"(boundary misfit {rep['certificates']['misfit']['value']:.3g})")
    return EXIT_OK


def _parse_range(key, text) -> list:
    parts = str(text).split(":")
    if len(parts) == 1:
        return [_float(key, parts[0])]
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected lo:hi:steps, got {text!r}")
    lo, hi = _float(key, parts[0]), _float(key, parts[1])
    steps = int(_float(key, parts[2]))
    if steps < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"{key}: bad range {text!r}")
    if steps == 1:
        return [lo]
    return [float(x) for x in np.linspace(lo, hi, steps)]


def sweep_grid(cfg: dict):
    n = _int(cfg, "n", 1)
    keys = [f"c{j}" for j in range(1, n + 1)] + [f"b{j}" for j in range(1, n + 1)]
    for key in cfg:
        if _is_sweep_key("sweep", key) and key not in keys:
            raise ConfigError(f"{key} is out of range for n={n}")
    values = {}
    for key in keys:
        if key not in cfg:
            raise ConfigError(f"missing sweep key {key!r}")
        values[key] = _parse_range(key, cfg[key])
    axes = [k for k in keys if len(values[k]) > 1]
    points = [{}]
    for key in keys:
        points = [dict(p, **{key: x}) for p in points for x in values[key]]
    return n, keys, axes, points


def sweep_point(args) -> dict:
    index, n, point, tol_balance = args
    row = {"index": index, **point}
    try:
        params = CurveParams(n, tuple(point[f"c{j}"] for j in range(1, n + 1)),
                             tuple(point[f"b{j}"] for j in range(1, n + 1)))
        graph = MaximalGraph(RiemannFamily(params), tol=1e-11)
        rep = balance_report(graph, tol_balance=tol_balance)
        row["log_growth"] = float(rep.end.F[2] / (2 * math.pi))
        row["log_growth_formula"] = float(params.log_growth)
        for j, c in enumerate(rep.cycles):
            for a, x in zip(("x1", "x2", "x3"), c.F):
                row[f"F{j}_{a}"] = float(x)
            row[f"F{j}_class"] = causal_class(c.F)
        row["F_inf_x3"] = float(rep.end.F[2])
        row["balance_flux"] = rep.balance_residual_flux
        row["balance_torque"] = rep.balance_residual_torque
        row["horizontal_flux_max"] = max(float(math.hypot(c.F[0], c.F[1])) for c in rep.cycles)
        row["status"] = "ok" if rep.passed else "balance"
    except Exception as exc:        # recorded in the row, the sweep goes on
        row["status"] = f"error:{type(exc).__name__}"
        row["message"] = str(exc).replace("\n", " ")[:200]
    return row


def cmd_sweep(cfg: dict) -> int:
    if str(cfg.get("family", "riemann")).lower() != "riemann":
        raise ConfigError("sweep supports family=riemann only")
    n, keys, axes, points = sweep_grid(cfg)
    tol_b = _float("tol_balance", cfg.get("tol_balance", TOL_BALANCE))
    threads = _int(cfg, "threads", 1)
    if threads < 1:
        raise ConfigError("threads must be at least 1")
    jobs = [(i, n, p, tol_b) for i, p in enumerate(points)]
    if threads == 1:
        rows = [sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(sweep_point, jobs))      # map keeps input order
    header = ["index", "status"] + keys + ["log_growth", "log_growth_formula"]
    for j in range(n + 1):
        header += [f"F{j}_x1", f"F{j}_x2", f"F{j}_x3", f"F{j}_class"]
    header += ["F_inf_x3", "balance_flux", "balance_torque", "horizontal_flux_max", "message"]
    out = cfg.get("out", "sweep.csv")
    report.write_rows(out, header, rows)
    from .plotting import plot_sweep
    plot_sweep(rows, axes, _stem(out) + ".png")
    ok = sum(r["status"] == "ok" for r in rows)
    print(f"{out}: {len(rows)} rows, {ok} ok")
    if ok < 0.9 * len(rows):
        raise CertificateFailure(f"only {ok} of {len(rows)} sweep points succeeded")
    return EXIT_OK


COMMANDS = {"build": cmd_build, "mechanics": cmd_mechanics, "domain": cmd_domain, "sweep": cmd_sweep}


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmfgraph", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("settings", nargs="*", help="key=value settings")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="output path")
    p.add_argument("--tol", type=float, help="quadrature tolerance")
    p.add_argument("--threads", type=int, help="worker processes for sweep")
    p.add_argument("--format", choices=("obj", "csv", "json"), help="mesh format for build")
    return p


def load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    cfg.update(parse_tokens(args.settings))
    for key in ("out", "tol", "threads", "format"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = str(val)
    check_keys(args.command, cfg)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except CertificateFailure as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except SingularityCollapseError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (AccuracyError, StandoffError, ContinuationError, FitError, HypothesisError,
            dom.RoutingError, dom.DegeneracyError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, CurveError, MeshSpecError, dom.DomainError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
