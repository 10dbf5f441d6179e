"""Shared test utilities."""

import numpy as np


def divisor_points(v, rng, count, clear=0.4, ratio=2.5):
    """Random points of Omega(v) well away from every boundary circle.

    Each point keeps a gap of ``clear`` to every circle and sits at least
    ``ratio`` radii from every center, which keeps the boundary data of
    tau and kappa resolved at K = 24.
    """
    cs, rs = v.centers, v.radii
    R = float(np.max(np.abs(cs) + rs)) + 1.5
    out = []
    for _ in range(100000):
        w = complex(rng.uniform(-R, R), rng.uniform(-R, R))
        d = np.abs(w - cs)
        if np.all(d - rs >= clear) and np.all(d >= ratio * rs) and all(abs(w - u) >= clear for u in out):
            out.append(w)
            if len(out) == count:
                return out
    raise RuntimeError("could not place divisor points")
