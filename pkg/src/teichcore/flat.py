"""Straight-line geometry on an origami.

Everything here is combinatorial and exact: lines are traced square by
square with integer or Fraction arithmetic, and chart lengths are only
taken at the very end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .chart import DiscPoint, chart_length
from .errors import BoundTooLarge, NotClosed
from .origami import Origami
from .vectors import Holonomy, as_holonomy, primitive_direction

# moves recorded in crossing words
RIGHT, LEFT, UP = "R", "L", "U"


def _step(s: Origami, sq: int, move: str) -> int:
    if move == RIGHT:
        return s.h[sq]
    if move == LEFT:
        return s.h_inv[sq]
    if move == UP:
        return s.v[sq]
    raise ValueError(move)


# --------------------------------------------------------------------------
# saddle connections


@dataclass(frozen=True)
class SaddleConnection:
    holonomy: Holonomy
    start: tuple[int, str]
    crossing_word: tuple[str, ...]
    start_vertex: int
    end_vertex: int

    @property
    def direction(self) -> Holonomy:
        return self.holonomy.primitive()

    @property
    def multiplier(self) -> int:
        return self.holonomy.content

    def length_at(self, z: DiscPoint) -> float:
        return chart_length(z.z, self.holonomy, z.surface.n)

    def base_length(self, n: int) -> float:
        return math.sqrt(self.holonomy.norm2() / n)


def _primitive_step_moves(a: int, b: int) -> list[str]:
    """Edge crossings of the segment from a corner to (a, b), endpoints excluded."""
    if b == 0 or a == 0:
        return []
    horiz = RIGHT if a > 0 else LEFT
    na = abs(a)
    moves = []
    k = l = 1
    # vertical line k/na versus horizontal line l/b; never equal for primitive (a, b)
    while k < na or l < b:
        if l >= b or (k < na and k * b < l * na):
            moves.append(horiz)
            k += 1
        else:
            moves.append(UP)
            l += 1
    return moves


def _direction_geometry(w: Holonomy):
    """Start corner, arrival corner and pass-through moves for a direction."""
    a, b = w
    if b == 0:
        return "bl", "br", (RIGHT,)
    if a == 0:
        return "bl", "tl", (UP,)
    if a > 0:
        return "bl", "tr", (RIGHT, UP)
    return "br", "tl", (LEFT, UP)


def saddle_connections_in_direction(s: Origami, direction) -> list[SaddleConnection]:
    """All saddle connections parallel to ``direction`` (one per outgoing sector)."""
    w = primitive_direction(direction)
    start_corner, end_corner, through = _direction_geometry(w)
    step = _primitive_step_moves(w.a, w.b)
    out = []
    for i in range(s.n):
        v0 = s.corner_vertex(i, start_corner)
        if v0 not in s.marked:
            continue
        sq = i
        moves: list[str] = []
        for k in range(1, s.n + 2):
            for mv in step:
                sq = _step(s, sq, mv)
            moves.extend(step)
            v1 = s.corner_vertex(sq, end_corner)
            if v1 in s.marked:
                out.append(SaddleConnection(w.scaled(k), (i, start_corner), tuple(moves), v0, v1))
                break
            # regular vertex: continue straight into the next square
            for mv in through:
                sq = _step(s, sq, mv)
            moves.extend(through)
        else:  # pragma: no cover - a separatrix always closes up within n steps
            raise RuntimeError("separatrix did not reach a marked vertex")
    return out


def replay_holonomy(sc: SaddleConnection) -> Holonomy:
    """Recover the holonomy of a saddle connection from its crossing word."""
    square, corner = sc.start
    dx = sum(1 for m in sc.crossing_word if m == RIGHT) - sum(1 for m in sc.crossing_word if m == LEFT)
    dy = sum(1 for m in sc.crossing_word if m == UP)
    x0 = 1 if corner == "br" else 0
    w = sc.direction
    _, end_corner, _ = _direction_geometry(w)
    ex = dx + (1 if end_corner in ("tr", "br") else 0)
    ey = dy + (1 if end_corner in ("tr", "tl") else 0)
    return Holonomy(ex - x0, ey)


def primitive_vectors(radius2: float):
    """Normalized primitive integer vectors with a^2 + b^2 <= radius2."""
    r = math.isqrt(int(math.floor(radius2)))
    for b in range(0, r + 1):
        for a in range(-r, r + 1):
            if b == 0 and a <= 0:
                continue
            if a * a + b * b <= radius2 and math.gcd(a, b) == 1:
                yield Holonomy(a, b)


def enumerate_saddle_connections(s: Origami, L: float, cap: int = 250_000) -> list[SaddleConnection]:
    """Every saddle connection of base length at most ``L`` (up to sign)."""
    if L <= 0:
        return []
    radius2 = L * L * s.n * (1 + 1e-12)
    estimate = 0.31 * s.n * radius2 + s.n
    if estimate > cap:
        raise BoundTooLarge(f"about {int(estimate)} saddle connections expected, cap is {cap}")
    out = []
    for w in primitive_vectors(radius2):
        out.extend(sc for sc in saddle_connections_in_direction(s, w) if sc.holonomy.norm2() <= radius2)
    out.sort(key=lambda sc: (sc.holonomy.norm2(), sc.holonomy.a, sc.holonomy.b, sc.start))
    return out


# --------------------------------------------------------------------------
# closed curves and cylinders


@dataclass(frozen=True)
class Curve:
    """A closed straight curve stored as its pieces inside squares.

    Each segment is ``(square, (x0, y0), (x1, y1))`` in local coordinates of
    the square, with Fraction entries in ``[0, 1]``.
    """

    segments: tuple
    holonomy: Holonomy
    closed: bool = True

    @property
    def crossing_word(self) -> tuple[int, ...]:
        return tuple(seg[0] for seg in self.segments)


@dataclass(frozen=True)
class Cylinder:
    direction: Holonomy
    index: int
    area: int
    circumference_multiplier: int
    squares: frozenset
    core: Curve = field(repr=False)

    @property
    def core_path(self) -> tuple[int, ...]:
        return self.core.crossing_word

    @property
    def core_holonomy(self) -> Holonomy:
        return self.direction.scaled(self.circumference_multiplier)

    def circumference_at(self, z: DiscPoint) -> float:
        return self.circumference_multiplier * chart_length(z.z, self.direction, z.surface.n)

    def height_at(self, z: DiscPoint) -> float:
        return (self.area / z.surface.n) / self.circumference_at(z)

    def modulus_at(self, z: DiscPoint) -> float:
        return self.height_at(z) / self.circumference_at(z)


def trace_segments(s: Origami, sq: int, x, y, p: int, q: int, t_total) -> tuple[list, int, Fraction, Fraction]:
    """Follow ``(x, y) + t (p, q)`` for ``0 <= t <= t_total`` (needs q >= 0).

    Returns the segments, the final square and the final local position.
    Passing exactly through a vertex is an error: only curves that avoid the
    vertices are traced this way.
    """
    x, y, t_left = Fraction(x), Fraction(y), Fraction(t_total)
    segs = []
    while t_left > 0:
        if p > 0 and x == 1:
            sq, x = s.h[sq], Fraction(0)
        elif p < 0 and x == 0:
            sq, x = s.h_inv[sq], Fraction(1)
        if q > 0 and y == 1:
            sq, y = s.v[sq], Fraction(0)
        dt_x = (1 - x) / p if p > 0 else (x / -p if p < 0 else None)
        dt_y = (1 - y) / q if q > 0 else None
        dt = t_left
        for cand in (dt_x, dt_y):
            if cand is not None and cand < dt:
                dt = cand
        nx, ny = x + p * dt, y + q * dt
        if dt > 0:
            segs.append((sq, (x, y), (nx, ny)))
        if nx in (0, 1) and ny in (0, 1) and t_left - dt > 0:
            raise ValueError("straight line runs into a vertex")
        x, y, t_left = nx, ny, t_left - dt
    return segs, sq, x, y


def _canonical_point(s: Origami, sq: int, x: Fraction, y: Fraction):
    if x == 1:
        sq, x = s.h[sq], Fraction(0)
    if y == 1:
        sq, y = s.v[sq], Fraction(0)
    return sq, x, y


def _same_point(s, a, b) -> bool:
    return _canonical_point(s, *a) == _canonical_point(s, *b)


def _horizontal_cylinders(s: Origami) -> list[tuple[list[int], int, list]]:
    from .origami import cycles_of

    cyc = cycles_of(s.h)
    owner = {}
    for k, c in enumerate(cyc):
        for i in c:
            owner[i] = k
    parent = list(range(len(cyc)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for k, c in enumerate(cyc):
        # top boundary of this row carries the top-right corners of its squares
        if not any(s.corner_vertex(i, "tr") in s.marked for i in c):
            parent[find(k)] = find(owner[s.v[c[0]]])
    groups: dict[int, list[int]] = {}
    for k in range(len(cyc)):
        groups.setdefault(find(k), []).append(k)
    out = []
    for ks in sorted(groups.values()):
        rows = [cyc[k] for k in ks]
        mult = len(rows[0])
        assert all(len(r) == mult for r in rows)
        first = rows[0]
        half = Fraction(1, 2)
        segs = tuple((i, (Fraction(0), half), (Fraction(1), half)) for i in first)
        squares = frozenset(i for r in rows for i in r)
        out.append((sorted(squares), mult, segs, sum(len(r) for r in rows)))
    return out


def _slot_cylinders(s: Origami, p: int, q: int):
    """Cylinders in direction (p, q) with q >= 1 via slots on bottom edges.

    Slot ``(sq, k)`` is the open interval ``(k/q, (k+1)/q)`` on the bottom
    edge of square ``sq``.  Flowing up one unit of height permutes slots.
    """
    n = s.n

    def hpow(sq, m):
        perm = s.h if m > 0 else s.h_inv
        for _ in range(abs(m)):
            sq = perm[sq]
        return sq

    def flow(sq, k):
        m = (k + p) // q
        return s.v[hpow(sq, m)], (k + p) % q

    nslots = n * q
    orbit_of = [-1] * nslots
    orbits = []
    for sq in range(n):
        for k in range(q):
            sid = sq * q + k
            if orbit_of[sid] >= 0:
                continue
            cur = (sq, k)
            members = []
            while orbit_of[cur[0] * q + cur[1]] < 0:
                orbit_of[cur[0] * q + cur[1]] = len(orbits)
                members.append(cur)
                cur = flow(*cur)
            orbits.append(members)

    parent = list(range(len(orbits)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def arrival_vertex(sq, k):
        m = (k + p) // q
        if p > 0:
            return s.corner_vertex(hpow(sq, m - 1), "tr")
        return s.corner_vertex(hpow(sq, m), "tl")

    for sq in range(n):
        for k in range(q):
            # leaf through the point k/q on the bottom edge of sq
            if k == 0 and s.corner_vertex(sq, "bl") in s.marked:
                continue
            cur = (sq, k)
            regular = True
            for _ in range(nslots + 1):
                nxt = flow(*cur)
                if nxt[1] == 0 and arrival_vertex(*cur) in s.marked:
                    regular = False
                    break
                cur = nxt
                if cur == (sq, k):
                    break
            if not regular:
                continue
            right = orbit_of[sq * q + k]
            left_slot = (sq, k - 1) if k > 0 else (s.h_inv[sq], q - 1)
            left = orbit_of[left_slot[0] * q + left_slot[1]]
            parent[find(right)] = find(left)

    groups: dict[int, list[int]] = {}
    for o in range(len(orbits)):
        groups.setdefault(find(o), []).append(o)
    out = []
    for os_ in sorted(groups.values()):
        lengths = {len(orbits[o]) for o in os_}
        assert len(lengths) == 1 and next(iter(lengths)) % q == 0
        mult = len(orbits[os_[0]]) // q
        area = sum(len(orbits[o]) for o in os_) // q
        sq0, k0 = orbits[os_[0]][0]
        x0 = (Fraction(k0) + Fraction(1, 2)) / q
        segs, end_sq, ex, ey = trace_segments(s, sq0, x0, 0, p, q, Fraction(mult))
        if not _same_point(s, (end_sq, ex, ey), (sq0, x0, Fraction(0))):
            raise NotClosed("core curve failed to close")
        squares = set()
        for o in os_:
            for sq, _ in orbits[o]:
                squares.add(sq)
        out.append((sorted(squares), mult, tuple(segs), area))
    return out


@lru_cache(maxsize=4096)
def _cylinders_cached(s: Origami, w: Holonomy) -> tuple[Cylinder, ...]:
    if w.b == 0:
        raw = _horizontal_cylinders(s)
    else:
        raw = _slot_cylinders(s, w.a, w.b)
    raw.sort(key=lambda t: (t[3], t[1], t[0]))
    out = []
    for idx, (squares, mult, segs, area) in enumerate(raw):
        core = Curve(segs, w.scaled(mult), True)
        out.append(Cylinder(w, idx, area, mult, frozenset(squares), core))
    return tuple(out)


def cylinder_decomposition(s: Origami, direction) -> list[Cylinder]:
    """Maximal cylinders in a rational direction, sorted by (area, multiplier)."""
    w = primitive_direction(direction)
    return list(_cylinders_cached(s, w))


# --------------------------------------------------------------------------
# intersection numbers


def _segment_crossing(a0, a1, b0, b1):
    """Intersection point of two non-parallel segments, or None."""
    dax, day = a1[0] - a0[0], a1[1] - a0[1]
    dbx, dby = b1[0] - b0[0], b1[1] - b0[1]
    den = dax * dby - day * dbx
    if den == 0:
        return None
    ex, ey = b0[0] - a0[0], b0[1] - a0[1]
    t = (ex * dby - ey * dbx) / den
    u = (ex * day - ey * dax) / den
    if 0 <= t <= 1 and 0 <= u <= 1:
        return a0[0] + t * dax, a0[1] + t * day
    return None


def crossing_points(s: Origami, segs1, segs2) -> set:
    """Distinct transverse intersection points, vertices excluded."""
    by_square: dict[int, list] = {}
    for seg in segs2:
        by_square.setdefault(seg[0], []).append(seg)
    pts = set()
    for sq, a0, a1 in segs1:
        for _, b0, b1 in by_square.get(sq, ()):
            hit = _segment_crossing(a0, a1, b0, b1)
            if hit is None:
                continue
            x, y = hit
            if x in (0, 1) and y in (0, 1):
                continue
            pts.add(_canonical_point(s, sq, Fraction(x), Fraction(y)))
    return pts


def intersection_number(s: Origami, c1, c2) -> int:
    """Geometric intersection number of two closed straight curves.

    Accepts ``Curve`` or ``Cylinder`` objects.  Straight representatives of
    non-parallel closed geodesics are in minimal position, so counting
    crossing points is exact.
    """
    c1 = c1.core if isinstance(c1, Cylinder) else c1
    c2 = c2.core if isinstance(c2, Cylinder) else c2
    for c in (c1, c2):
        if not isinstance(c, Curve) or not c.closed:
            raise NotClosed("intersection numbers need closed core curves")
    if c1.holonomy.wedge(c2.holonomy) == 0:
        return 0
    return len(crossing_points(s, c1.segments, c2.segments))


# --------------------------------------------------------------------------
# systoles


@dataclass(frozen=True)
class Systole:
    length: float
    curves: tuple[Cylinder, ...]

    @property
    def holonomies(self) -> list[Holonomy]:
        return [c.core_holonomy for c in self.curves]


def vectors_shorter_than(z: complex, n: int, bound: float):
    """Normalized primitive vectors w with chart length at most ``bound`` at z."""
    y = z.imag
    rho = bound * math.sqrt(n * y) * (1 + 1e-12)
    bmax = int(math.floor(rho / y))
    out = []
    for b in range(0, bmax + 1):
        half = math.sqrt(max(rho * rho - (b * y) ** 2, 0.0))
        lo = math.ceil(b * z.real - half)
        hi = math.floor(b * z.real + half)
        for a in range(lo, hi + 1):
            if b == 0 and a <= 0:
                continue
            if math.gcd(a, b) == 1:
                out.append(Holonomy(a, b))
    return out


def systole(z: DiscPoint, rel_tol: float = 1e-12) -> Systole:
    """Shortest cylinder core curves at ``z``.

    A core in direction w has length ``n_i * l_z(w) >= l_z(w)``, so once the
    best core length B is known only directions with ``l_z(w) <= B`` matter.
    """
    s, zc = z.surface, z.z
    best = math.inf
    for w in ((1, 0), (0, 1)):
        for c in cylinder_decomposition(s, w):
            best = min(best, c.circumference_at(z))
    found = []
    for w in vectors_shorter_than(zc, s.n, best):
        lw = chart_length(zc, w, s.n)
        for c in cylinder_decomposition(s, w):
            ell = c.circumference_multiplier * lw
            found.append((ell, c))
    best = min(e for e, _ in found)
    curves = tuple(c for e, c in found if e <= best * (1 + rel_tol) + 1e-15)
    return Systole(best, curves)


def as_direction(w) -> Holonomy:
    return as_holonomy(w).primitive().normalized()
