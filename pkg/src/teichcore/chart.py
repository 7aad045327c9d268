"""Upper half-plane chart of the SL(2,R)-orbit of an origami.

A point ``z = x + iy`` stands for the flat structure obtained by applying

    A_z = (n y)^(-1/2) * [[1, -x], [0, y]]

to the unit-square tiling, so an integer holonomy ``(a, b)`` has length
``|a - b z| / sqrt(n y)``.  The chart is equivariant: for ``M`` in SL(2,R),
``l_{M z}(M w) = l_z(w)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import NonUnimodular, ZeroVector
from .origami import Origami

DET_TOL = 1e-9


@dataclass(frozen=True)
class DiscPoint:
    x: float
    y: float
    surface: Origami

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"imaginary part must be positive, got {self.y}")

    @property
    def z(self) -> complex:
        return complex(float(self.x), float(self.y))

    @classmethod
    def from_complex(cls, z: complex, surface: Origami) -> "DiscPoint":
        return cls(z.real, z.imag, surface)


class ChartLength(NamedTuple):
    length: float
    horizontal: float
    vertical: float


def _xy(z):
    if isinstance(z, DiscPoint):
        return z.x, z.y
    if isinstance(z, complex):
        return z.real, z.imag
    return z


def length_at(z: DiscPoint, w, n: int | None = None) -> ChartLength:
    a, b = w
    if a == 0 and b == 0:
        raise ZeroVector("length of the zero vector")
    if n is None:
        n = z.surface.n
    x, y = (float(t) for t in _xy(z))
    scale = math.sqrt(n * y)
    horiz = (a - b * x) / scale
    vert = b * y / scale
    return ChartLength(math.hypot(horiz, vert), horiz, vert)


def chart_length(z: complex, w, n: int) -> float:
    """Plain-float version of ``length_at`` for hot loops."""
    a, b = w
    return abs(a - b * z) / math.sqrt(n * z.imag)


def length_squared_exact(x, y, w, n: int) -> Fraction:
    """Squared chart length with exact rational arithmetic."""
    a, b = w
    x, y = Fraction(x), Fraction(y)
    return ((a - b * x) ** 2 + (b * y) ** 2) / (n * y)


def matrix_entries(m):
    """(p, q, r, s) from an IntMatrix, nested rows, or a flat 4-tuple."""
    if hasattr(m, "p") and hasattr(m, "s"):
        return m.p, m.q, m.r, m.s
    try:
        (p, q), (r, s) = m
    except (TypeError, ValueError):
        p, q, r, s = m
    return p, q, r, s


def check_det(m, tol: float = DET_TOL):
    p, q, r, s = matrix_entries(m)
    det = p * s - q * r
    if isinstance(det, (int, Fraction)):
        ok = det == 1
    else:
        ok = abs(det - 1) <= tol
    if not ok:
        raise NonUnimodular(f"determinant {det} != 1")
    return p, q, r, s


def mobius_xy(m, x, y):
    """Image of ``x + iy`` under the Moebius map of ``m``.

    Works on any field type; with Fractions the result is exact.
    """
    p, q, r, s = check_det(m)
    den = (r * x + s) ** 2 + (r * y) ** 2
    re = ((p * x + q) * (r * x + s) + p * r * y * y) / den
    im = y / den
    return re, im


def apply_matrix(z: DiscPoint, m) -> DiscPoint:
    x, y = z.x, z.y
    if not isinstance(x, Fraction):
        x, y = float(x), float(y)
    xx, yy = mobius_xy(m, x, y)
    return DiscPoint(xx, yy, z.surface)


def geodesic_flow(t: float):
    return ((math.exp(t / 2), 0.0), (0.0, math.exp(-t / 2)))


def unipotent_flow(s: float):
    return ((1.0, s), (0.0, 1.0))


def act_on_vector(m, w):
    p, q, r, s = matrix_entries(m)
    a, b = w
    return (p * a + q * b, r * a + s * b)
