"""PNG figures written next to the text outputs (Agg backend, no timestamps)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.tri import Triangulation  # noqa: E402

# PNG metadata would otherwise carry the matplotlib version string
_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)


def plot_mesh(mesh, singular_points, path, title: str = ""):
    """Height x3 over the horizontal plane, singular points marked."""
    fig, ax = plt.subplots(figsize=(6, 5))
    X = mesh.X
    tri = Triangulation(X[:, 0], X[:, 1], mesh.faces)
    cs = ax.tripcolor(tri, X[:, 2], shading="gouraud", cmap="viridis")
    fig.colorbar(cs, ax=ax, label="x3")
    q = np.array([np.asarray(p) for p in singular_points])
    if len(q):
        ax.plot(q[:, 0], q[:, 1], "r^", ms=7, label="singular points")
        ax.legend(loc="upper right", fontsize="small")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_domain(v, path, paths=(), divisor_points=()):
    fig, ax = plt.subplots(figsize=(5, 5))
    t = np.linspace(0, 2 * np.pi, 400)
    for j, (c, r) in enumerate(zip(v.centers, v.radii)):
        z = c + r * np.exp(1j * t)
        ax.fill(z.real, z.imag, color="0.85")
        ax.plot(z.real, z.imag, "k-", lw=1)
        ax.annotate(f"a{j}", (c.real, c.imag), ha="center", va="center")
    for p in paths:
        p = np.asarray(p)
        ax.plot(p.real, p.imag, "b-", lw=1)
    for w in divisor_points:
        ax.plot(w.real, w.imag, "rx")
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    _save(fig, path)


def plot_sweep(rows, axes, path, value: str = "horizontal_flux_max"):
    """Heat map for a two-parameter sweep, line plot otherwise."""
    ok = [r for r in rows if r.get("status") == "ok"]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if len(axes) == 2 and ok:
        xs = sorted({r[axes[0]] for r in rows})
        ys = sorted({r[axes[1]] for r in rows})
        Z = np.full((len(ys), len(xs)), np.nan)
        for r in ok:
            Z[ys.index(r[axes[1]]), xs.index(r[axes[0]])] = r[value]
        im = ax.imshow(Z, origin="lower", aspect="auto", cmap="magma",
                       extent=(xs[0], xs[-1], ys[0], ys[-1]) if len(xs) > 1 and len(ys) > 1 else None)
        fig.colorbar(im, ax=ax, label=value)
        ax.set_xlabel(axes[0])
        ax.set_ylabel(axes[1])
    else:
        idx = [r["index"] for r in ok]
        ax.plot(idx, [r[value] for r in ok], "o-")
        ax.set_xlabel("point")
        ax.set_ylabel(value)
    _save(fig, path)
