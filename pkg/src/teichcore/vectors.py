"""Integer vectors and unimodular integer matrices.

Matrices act on column vectors.  Equality of ``IntMatrix`` is projective,
so ``M == -M``; this is the arithmetic of PSL(2, Z).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import NamedTuple

from .errors import NonPrimitive, NonUnimodular, ZeroVector


class Holonomy(NamedTuple):
    """An integer displacement ``(a, b)`` measured in square units."""

    a: int
    b: int

    def wedge(self, other) -> int:
        return self.a * other[1] - self.b * other[0]

    @property
    def content(self) -> int:
        return gcd(self.a, self.b)

    def norm2(self) -> int:
        return self.a * self.a + self.b * self.b

    def is_primitive(self) -> bool:
        return self.content == 1

    def primitive(self) -> "Holonomy":
        g = self.content
        if g == 0:
            raise ZeroVector("zero vector has no direction")
        return Holonomy(self.a // g, self.b // g)

    def normalized(self) -> "Holonomy":
        """Representative of ``±self`` with b > 0, or b == 0 and a > 0."""
        if self.b < 0 or (self.b == 0 and self.a < 0):
            return Holonomy(-self.a, -self.b)
        return self

    def scaled(self, k: int) -> "Holonomy":
        return Holonomy(k * self.a, k * self.b)

    def __str__(self):
        return f"({self.a},{self.b})"


def as_holonomy(w) -> Holonomy:
    if isinstance(w, Holonomy):
        return w
    a, b = w
    if int(a) != a or int(b) != b:
        raise ValueError(f"holonomy entries must be integers, got {w!r}")
    return Holonomy(int(a), int(b))


def primitive_direction(w) -> Holonomy:
    """Validate that ``w`` is a primitive vector and return its normal form."""
    w = as_holonomy(w)
    if w == (0, 0):
        raise ZeroVector("direction (0,0)")
    if not w.is_primitive():
        raise NonPrimitive(f"direction {w} is not primitive")
    return w.normalized()


@dataclass(frozen=True, eq=False)
class IntMatrix:
    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise NonUnimodular(f"determinant of {self.rows()} is not 1")

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        (p, q), (r, s) = rows
        for x in (p, q, r, s):
            if int(x) != x:
                raise NonUnimodular(f"non-integer entry {x!r}")
        return cls(int(p), int(q), int(r), int(s))

    def rows(self):
        return [[self.p, self.q], [self.r, self.s]]

    def key(self) -> tuple[int, int, int, int]:
        """Sign-normalized entries: the first nonzero entry is positive."""
        t = (self.p, self.q, self.r, self.s)
        for x in t:
            if x:
                return t if x > 0 else tuple(-y for y in t)
        raise AssertionError("zero matrix")

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def inverse(self) -> "IntMatrix":
        return IntMatrix(self.s, -self.q, -self.r, self.p)

    def __pow__(self, k: int) -> "IntMatrix":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def apply(self, w) -> Holonomy:
        a, b = w
        return Holonomy(self.p * a + self.q * b, self.r * a + self.s * b)

    @property
    def trace(self) -> int:
        return self.p + self.s

    def is_identity(self) -> bool:
        return self.key() == (1, 0, 0, 1)

    def size(self) -> int:
        return abs(self.p) + abs(self.q) + abs(self.r) + abs(self.s)

    def __repr__(self):
        return f"IntMatrix([[{self.p},{self.q}],[{self.r},{self.s}]])"


IDENTITY = IntMatrix(1, 0, 0, 1)
S = IntMatrix(0, -1, 1, 0)
T = IntMatrix(1, 1, 0, 1)


def st_word(m: IntMatrix) -> list[tuple[str, int]]:
    """Write ``m`` projectively as a product of S and powers of T.

    Returns a list of letters ``("S", 1)`` or ``("T", k)`` whose product,
    read left to right, equals ``m`` up to sign.
    """
    p, q, r, s = m.p, m.q, m.r, m.s
    undo: list[tuple[str, int]] = []
    while r != 0:
        k = p // r
        # left-multiply by T^-k, then by S
        p, q = p - k * r, q - k * s
        p, q, r, s = -r, -s, p, q
        undo.append(("T", k))
        undo.append(("S", 1))
    # now the matrix is +-[[1, t], [0, 1]]
    tail = q * p  # p = s = +-1
    word = [x for x in undo if not (x[0] == "T" and x[1] == 0)]
    if tail:
        word.append(("T", tail))
    return word


def word_product(word) -> IntMatrix:
    out = IDENTITY
    for name, k in word:
        out = out @ (S if name == "S" else T ** k)
    return out


def to_e1(w) -> IntMatrix:
    """A unimodular matrix sending the primitive vector ``w`` to (1, 0)."""
    a, b = w
    g, u, v = _ext_gcd(a, b)
    if g == -1:
        g, u, v = 1, -u, -v
    if g != 1:
        raise NonPrimitive(f"{w} is not primitive")
    return IntMatrix(u, v, -b, a)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k = a // b
        a, b = b, a - k * b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0
