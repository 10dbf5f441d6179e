"""Independent closed forms used as test oracles.

The n = 1 circular domain (outside |z| = 1 and |z - c| = r, c > 1 real) is
sent to a concentric annulus by M(z) = (z - p)/(z - q), where p, q are the
common symmetric points of the two circles: p q = 1 and
(p - c)(q - c) = r^2, i.e. the roots of t^2 - s t + 1 with
s = (1 + c^2 - r^2)/c.
"""

import math

import numpy as np


def annulus_map(c: float, r: float):
    s = (1 + c * c - r * r) / c
    disc = math.sqrt(s * s - 4)
    t1, t2 = (s - disc) / 2, (s + disc) / 2
    p, q = (t1, t2) if abs(t1) < 1 else (t2, t1)
    rho0 = abs(1 - p) / abs(1 - q)
    rho1 = abs(c + r - p) / abs(c + r - q)
    return p, q, rho0, rho1


def annulus_harmonic_measure(c: float, r: float, z):
    """Harmonic measure of the inner-disk circle |z - c| = r."""
    p, q, rho0, rho1 = annulus_map(c, r)
    M = np.abs((np.asarray(z) - p) / (np.asarray(z) - q))
    return np.log(M / rho0) / math.log(rho1 / rho0)


def annulus_period(c: float, r: float) -> complex:
    """pi_11 with a_1 oriented as boundary of the domain, b_1 from a_0 to a_1."""
    _p, _q, rho0, rho1 = annulus_map(c, r)
    return -1j / math.pi * math.log(rho1 / rho0)


def catenoid_X(z):
    """X for g = z, phi3 = dz/z on the punctured unit disc with X = 0 on |z| = 1.

    Primitives: int phi1 = (i/2)(-1/z - z), int phi2 = (1/2)(1/z - z),
    int phi3 = log z, so with z = r e^{it}
    x1 = -(sin t / 2)(1/r - r), x2 = (cos t / 2)(1/r - r), x3 = log r.
    """
    z = np.asarray(z, dtype=complex)
    r, t = np.abs(z), np.angle(z)
    s = 0.5 * (1 / r - r)
    return np.stack([-np.sin(t) * s, np.cos(t) * s, np.log(r)], axis=-1)


def catenoid_end_fit():
    """(c, b) of x3 = c log rho + b + o(1) for the surface above.

    rho = sinh(-x3) = (e^{-x3} - e^{x3})/2, so x3 = -log(2 rho) + O(rho^-2):
    c = -1, b = -log 2.  The mirror image in a horizontal plane has c = 1,
    b = log 2.
    """
    return -1.0, -math.log(2.0)
