"""Square-tiled surfaces given by a pair of permutations.

Squares are labelled ``0..n-1`` internally; every text or JSON format uses
the customary labels ``1..n``.  ``h[i]`` is the square to the right of
square ``i`` and ``v[i]`` the square on top of it.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from math import pi

from .errors import Disconnected, NonPermutation, ParseError

Perm = tuple[int, ...]

CORNERS = ("bl", "br", "tl", "tr")


def perm_from_cycles(n: int, cycles) -> Perm:
    """Build a 0-based permutation tuple from 1-based cycles."""
    img = list(range(n))
    seen = set()
    for cyc in cycles:
        cyc = list(cyc)
        for x in cyc:
            if not isinstance(x, int) or isinstance(x, bool) or not 1 <= x <= n:
                raise NonPermutation(f"label {x!r} outside 1..{n}")
            if x in seen:
                raise NonPermutation(f"label {x} appears twice")
            seen.add(x)
        for i, x in enumerate(cyc):
            img[x - 1] = cyc[(i + 1) % len(cyc)] - 1
    return tuple(img)


def check_perm(p, n: int) -> Perm:
    p = tuple(p)
    if len(p) != n or sorted(p) != list(range(n)):
        raise NonPermutation(f"{p} is not a permutation of 0..{n - 1}")
    return p


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def cycles_of(p: Perm) -> list[tuple[int, ...]]:
    """Cycles of ``p`` (0-based), each starting at its least element."""
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def cycle_notation(p: Perm) -> str:
    parts = ["(" + " ".join(str(x + 1) for x in c) + ")" for c in cycles_of(p) if len(c) > 1]
    return "".join(parts) or "()"


@dataclass(frozen=True)
class Origami:
    n: int
    h: Perm
    v: Perm
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise NonPermutation("an origami needs at least one square")
        object.__setattr__(self, "h", check_perm(self.h, self.n))
        object.__setattr__(self, "v", check_perm(self.v, self.n))
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in (self.h[i], self.v[i]):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != self.n:
            raise Disconnected(f"squares reachable from 1: {len(seen)} of {self.n}")

    @cached_property
    def h_inv(self) -> Perm:
        return inverse(self.h)

    @cached_property
    def v_inv(self) -> Perm:
        return inverse(self.v)

    @cached_property
    def commutator(self) -> Perm:
        """h, v, h^-1, v^-1 applied left to right.

        Square ``i`` goes to ``v^-1(h^-1(v(h(i))))``; the cycles group the
        top-right corners of squares into vertices of the surface.
        """
        h, v, hi, vi = self.h, self.v, self.h_inv, self.v_inv
        return tuple(vi[hi[v[h[i]]]] for i in range(self.n))

    @cached_property
    def vertex_cycles(self) -> list[tuple[int, ...]]:
        return cycles_of(self.commutator)

    @cached_property
    def _tr_vertex(self) -> tuple[int, ...]:
        out = [0] * self.n
        for k, cyc in enumerate(self.vertex_cycles):
            for i in cyc:
                out[i] = k
        return tuple(out)

    def corner_vertex(self, square: int, corner: str) -> int:
        """Index of the vertex at a corner ('bl', 'br', 'tl', 'tr') of a square."""
        if corner == "tr":
            sq = square
        elif corner == "tl":
            sq = self.h_inv[square]
        elif corner == "br":
            sq = self.v_inv[square]
        elif corner == "bl":
            sq = self.v_inv[self.h_inv[square]]
        else:
            raise ValueError(f"unknown corner {corner!r}")
        return self._tr_vertex[sq]

    @cached_property
    def cone_angles(self) -> tuple[int, ...]:
        """Cone angle of each vertex as a multiple of 2*pi."""
        return tuple(len(c) for c in self.vertex_cycles)

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertex_cycles) - self.n

    @property
    def genus(self) -> int:
        return 1 - self.euler_characteristic // 2

    @cached_property
    def marked(self) -> frozenset[int]:
        """Vertices treated as singularities.

        Cone points are always marked.  When there are none (a torus cover)
        every vertex is marked, so saddle connections still make sense.
        """
        sing = frozenset(k for k, a in enumerate(self.cone_angles) if a > 1)
        return sing if sing else frozenset(range(len(self.vertex_cycles)))

    def is_marked(self, vertex: int) -> bool:
        return vertex in self.marked

    def corner_marked(self, square: int, corner: str) -> bool:
        return self.corner_vertex(square, corner) in self.marked

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "h": [[x + 1 for x in c] for c in cycles_of(self.h)],
            "v": [[x + 1 for x in c] for c in cycles_of(self.v)],
            "label": self.label,
        }

    def __str__(self):
        return f"h={cycle_notation(self.h)} v={cycle_notation(self.v)}"


def build_origami(n: int, h, v, label: str = "") -> Origami:
    """Origami from 1-based cycle lists, e.g. ``build_origami(3, [[1, 2]], [[1, 3]])``."""
    return Origami(n, perm_from_cycles(n, h), perm_from_cycles(n, v), label)


@dataclass(frozen=True)
class VertexData:
    angles: tuple[int, ...]  # multiples of 2*pi
    genus: int
    stratum: tuple[int, ...]

    @property
    def angles_radians(self) -> tuple[float, ...]:
        return tuple(2 * pi * a for a in self.angles)

    def gauss_bonnet_defect(self) -> int:
        return sum(a - 1 for a in self.angles) - (2 * self.genus - 2)


def vertex_data(s: Origami) -> VertexData:
    angles = s.cone_angles
    stratum = tuple(sorted((a - 1 for a in angles if a > 1), reverse=True))
    return VertexData(angles, s.genus, stratum or (0,))


_CYCLE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(text: str):
    text = text.strip()
    if text in ("", "id", "()"):
        return []
    if _CYCLE.sub("", text).strip():
        raise ParseError(f"cannot read cycles from {text!r}")
    out = []
    for body in _CYCLE.findall(text):
        body = body.replace(",", " ").split()
        try:
            out.append([int(x) for x in body])
        except ValueError:
            raise ParseError(f"non-integer label in {text!r}") from None
    return out


def parse_origami(text: str, label: str = "") -> Origami:
    """Read either the JSON object format or ``h=(1 2)(3) v=(1 3)``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON: {exc}") from None
        return origami_from_json(data)
    m = re.fullmatch(r"h\s*=\s*(.*?)\s+v\s*=\s*(.*)", text, flags=re.S)
    if not m:
        raise ParseError(f"expected 'h=... v=...', got {text!r}")
    h, v = _parse_cycles(m.group(1)), _parse_cycles(m.group(2))
    labels = [x for c in h + v for x in c]
    n = max(labels, default=1)
    return build_origami(n, h, v, label)


def origami_from_json(data) -> Origami:
    if not isinstance(data, dict):
        raise ParseError("origami JSON must be an object")
    try:
        n = data["n"]
        h = data.get("h", [])
        v = data.get("v", [])
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("field n must be an integer")
    if not all(isinstance(c, list) for c in list(h) + list(v)):
        raise ParseError("h and v must be lists of cycles")
    return build_origami(n, h, v, str(data.get("label", "")))


def torus() -> Origami:
    return Origami(1, (0,), (0,), "torus")


def l_origami() -> Origami:
    return build_origami(3, [[1, 2]], [[1, 3]], "L")
