"""Linear algebra of Lorentz-Minkowski 3-space L^3 = (R^3, dx1^2 + dx2^2 - dx3^2)."""

from __future__ import annotations

import math
from typing import NamedTuple, Union

import numpy as np


class _Infinity:
    """The point at infinity of the extended complex plane."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtendedComplex = Union[complex, _Infinity]


def is_inf(z) -> bool:
    return z is INF


class Vec3L(NamedTuple):
    x1: float
    x2: float
    x3: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x1, self.x2, self.x3], dtype=dtype or float)

    def __add__(self, other):
        return Vec3L(*(np.asarray(self) + np.asarray(other)))

    def __sub__(self, other):
        return Vec3L(*(np.asarray(self) - np.asarray(other)))

    def scale(self, s: float) -> "Vec3L":
        return Vec3L(s * self.x1, s * self.x2, s * self.x3)

    @classmethod
    def of(cls, v) -> "Vec3L":
        a = np.asarray(v, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))


METRIC = np.diag([1.0, 1.0, -1.0])


def minkowski_inner(u, v):
    """<u, v> = u1 v1 + u2 v2 - u3 v3.  Broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]
    return float(out) if out.ndim == 0 else out


def causal_class(v, atol: float = 0.0) -> str:
    """'spacelike', 'timelike' or 'lightlike'; the zero vector is spacelike."""
    a = np.asarray(v, dtype=float)
    if not np.any(a):
        return "spacelike"
    q = minkowski_inner(a, a)
    if q > atol:
        return "spacelike"
    if q < -atol:
        return "timelike"
    return "lightlike"


def lorentz_wedge(u, v):
    """Lorentzian exterior product, fixed by <u ^ v, w> = det[u v w].

    The Euclidean cross product c satisfies c . w = det[u v w], so flipping
    the sign of the third component converts it to the Lorentz pairing.
    """
    c = np.cross(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    c[..., 2] *= -1.0
    return c


def stereographic(z) -> Vec3L:
    """Stereographic projection of the extended plane minus |z| = 1 onto H^2."""
    if is_inf(z):
        return Vec3L(0.0, 0.0, 1.0)
    z = complex(z)
    m = abs(z) ** 2
    d = m - 1.0
    if d == 0.0:
        raise ValueError("stereographic projection undefined on |z| = 1")
    return Vec3L(2.0 * z.imag / d, 2.0 * z.real / d, (m + 1.0) / d)


def stereographic_array(z):
    """Vectorised version for finite complex arrays; returns shape (..., 3)."""
    z = np.asarray(z, dtype=complex)
    m = np.abs(z) ** 2
    d = m - 1.0
    if np.any(d == 0.0):
        raise ValueError("stereographic projection undefined on |z| = 1")
    return np.stack([2.0 * z.imag / d, 2.0 * z.real / d, (m + 1.0) / d], axis=-1)


# Similarity group helpers (vertical rotations, translations, homotheties,
# reflection in a horizontal plane).  Used by the tests.

def rotate_vertical(v, angle: float):
    a = np.asarray(v, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    out = a.copy()
    out[..., 0] = c * a[..., 0] - s * a[..., 1]
    out[..., 1] = s * a[..., 0] + c * a[..., 1]
    return out


def reflect_horizontal(v):
    out = np.array(v, dtype=float)
    out[..., 2] *= -1.0
    return out


def homothety(v, factor: float, center=(0.0, 0.0, 0.0)):
    c = np.asarray(center, dtype=float)
    return c + factor * (np.asarray(v, dtype=float) - c)
