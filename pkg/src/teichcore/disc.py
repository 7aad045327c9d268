"""Hyperbolic geometry of the disc chart: horodiscs and core metrics.

A horodisc attached to the parabolic direction ``w`` with shortest
saddle connection ``k w`` is ``{z : l_z(k w)^2 <= eps}``; in the chart this
is a Euclidean disc tangent to the real line at ``a/b`` with diameter
``eps n / (k b)^2`` (a half-plane when b = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .chart import check_det, matrix_entries
from .errors import PointInsideHoroball, SameCusp
from .vectors import Holonomy, to_e1

TOL = 1e-9

# --------------------------------------------------------------------------
# Moebius maps on complex numbers; matrices are 4-tuples (p, q, r, s)


def mobius_apply(m, z: complex) -> complex:
    p, q, r, s = check_det(m)
    return (p * z + q) / (r * z + s)


def _mob(m, z: complex) -> complex:
    p, q, r, s = m
    return (p * z + q) / (r * z + s)


def _mul(a, b):
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _inv(m):
    p, q, r, s = m
    return (s, -q, -r, p)


def _vec(m, w):
    p, q, r, s = m
    return (p * w[0] + q * w[1], r * w[0] + s * w[1])


def _floatm(m):
    return tuple(float(x) for x in matrix_entries(m))


def hyp_distance(z: complex, w: complex) -> float:
    z, w = _c(z), _c(w)
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


def _c(z) -> complex:
    if isinstance(z, complex):
        return z
    if hasattr(z, "z"):
        return z.z
    return complex(z)


def horocycle_arc(d: float) -> float:
    """Length of the horocyclic arc joining two points at distance d."""
    return 2.0 * math.sinh(d / 2.0)


# --------------------------------------------------------------------------
# horodiscs


@dataclass(frozen=True)
class Horodisc:
    holonomy: Holonomy  # shortest saddle connection k * w
    level: float
    n: int
    class_index: int | None = None

    @property
    def direction(self) -> Holonomy:
        return self.holonomy.primitive().normalized()

    @property
    def k(self) -> int:
        return self.holonomy.content

    @property
    def cusp(self) -> Fraction | None:
        a, b = self.direction
        return None if b == 0 else Fraction(a, b)

    @property
    def cusp_float(self) -> float:
        c = self.cusp
        return math.inf if c is None else float(c)

    def value(self, z) -> float:
        """Squared chart length of the defining holonomy at z."""
        z = _c(z)
        a, b = self.holonomy
        return abs(a - b * z) ** 2 / (self.n * z.imag)

    def contains(self, z, tol: float = TOL) -> bool:
        return self.value(z) <= self.level * (1 + tol)

    def strictly_contains(self, z, tol: float = TOL) -> bool:
        return self.value(z) < self.level * (1 - tol)

    @property
    def diameter(self) -> float:
        """Euclidean diameter; for the cusp at infinity the height of the boundary line."""
        a, b = self.holonomy
        if b == 0:
            return a * a / (self.n * self.level)
        return self.level * self.n / (b * b)

    @property
    def is_halfplane(self) -> bool:
        return self.holonomy.b == 0

    @cached_property
    def normalizer(self):
        """Real unimodular matrix taking this horodisc onto {Im z >= 1}."""
        g = to_e1(self.direction)
        h0 = self.k * self.k / (self.n * self.level)
        r = math.sqrt(h0)
        scale = (1.0 / r, 0.0, 0.0, r)
        return _mul(scale, _floatm(g))

    def normalize(self, z) -> complex:
        return _mob(self.normalizer, _c(z))

    def unnormalize(self, z: complex) -> complex:
        return _mob(_inv(self.normalizer), z)

    def distance_to(self, z) -> float:
        y = self.normalize(z).imag
        return 0.0 if y >= 1.0 else math.log(1.0 / y)

    def projection(self, z) -> complex:
        """Nearest point of the horodisc (z itself when inside)."""
        w = self.normalize(z)
        if w.imag >= 1.0:
            return _c(z)
        return self.unnormalize(complex(w.real, 1.0))

    def boundary_point(self, t: float) -> complex:
        """Point of the boundary horocycle with normalized real part t."""
        return self.unnormalize(complex(t, 1.0))

    def summary(self) -> dict:
        c = self.cusp
        return {
            "cusp": "inf" if c is None else str(c),
            "holonomy": list(self.holonomy),
            "level": self.level,
            "class": self.class_index,
        }


def horodisc_of(cls, level: float, direction=None) -> Horodisc:
    """Horodisc of a parabolic class (or of a translate direction in the class)."""
    w = cls.direction if direction is None else Holonomy(*direction).normalized()
    return Horodisc(w.scaled(cls.k_short), level, cls.n, cls.index)


def wedge_unit(u: Horodisc, v: Horodisc) -> Fraction:
    return Fraction(abs(u.holonomy.wedge(v.holonomy)), u.n)


def horoball_gap(u: Horodisc, v: Horodisc) -> float:
    """Hyperbolic distance between two horodiscs (0 when they meet)."""
    wd = abs(u.holonomy.wedge(v.holonomy))
    if wd == 0:
        raise SameCusp(f"both horodiscs sit at the cusp {u.cusp}")
    g = 2.0 * math.log((wd / u.n) / math.sqrt(u.level * v.level))
    return max(0.0, g)


def signed_horoball_gap(u: Horodisc, v: Horodisc) -> float:
    wd = abs(u.holonomy.wedge(v.holonomy))
    if wd == 0:
        raise SameCusp("same cusp")
    return 2.0 * math.log((wd / u.n) / math.sqrt(u.level * v.level))


def overlap_diameter(u: Horodisc, v: Horodisc) -> float:
    """Hyperbolic diameter of the intersection of two horodiscs (0 if empty)."""
    big = math.exp(-signed_horoball_gap(u, v))
    if big <= 1.0:
        return 0.0
    return math.acosh(2.0 * big - 1.0)


def overlap_bound(t: float, min_gap: float = 1.0) -> float:
    """Diameter bound for U' cap U' when the level-eps pairs are ``min_gap`` apart and eps0 = e^t eps."""
    big = math.exp(2.0 * t - min_gap)
    return math.acosh(2.0 * big - 1.0) if big > 1.0 else 0.0


def _geodesic_between_cusps(p: float, q: float):
    """Matrix F with F(p) = 0, F(q) = infinity (p, q real or inf)."""
    if math.isinf(q):
        return (1.0, -p, 0.0, 1.0)
    if math.isinf(p):
        # z -> -1/(z - q) sends q to infinity and infinity to 0
        return (0.0, -1.0, 1.0, -q)
    m = (1.0, -p, 1.0, -q) if p > q else (-1.0, p, 1.0, -q)
    det = m[0] * m[3] - m[1] * m[2]
    r = math.sqrt(det)
    return tuple(x / r for x in m)


def numeric_horoball_gap(u: Horodisc, v: Horodisc) -> float:
    """Distance between horodiscs found by root finding along the connecting geodesic.

    Uses only membership values and the distance formula, never the wedge.
    """
    from scipy.optimize import brentq

    f = _geodesic_between_cusps(u.cusp_float, v.cusp_float)
    finv = _inv(f)

    def point(s):
        return _mob(finv, complex(0.0, math.exp(s)))

    def crossing(disc, sign):
        g = lambda s: math.log(disc.value(point(s))) - math.log(disc.level)
        a, b = -1.0, 1.0
        while g(a) * sign > 0:
            a -= 2.0
        while g(b) * sign < 0:
            b += 2.0
        return brentq(g, a, b, xtol=1e-14, rtol=1e-15, maxiter=500)

    # along s -> -inf we approach u's cusp, so u's value increases with s
    su = crossing(u, +1)
    sv = crossing(v, -1)
    if sv <= su:
        return 0.0
    return hyp_distance(point(su), point(sv))


def numeric_overlap_diameter(u: Horodisc, v: Horodisc, samples: int = 2000) -> float:
    """Brute-force diameter of U cap V from sampled boundary points."""
    # boundary of the intersection: arc of each horocycle lying in the other disc
    pts = []
    for a, b in ((u, v), (v, u)):
        # scan the boundary of a in its normalized chart
        span = 1.0
        while b.contains(a.boundary_point(span)) or b.contains(a.boundary_point(-span)):
            span *= 2
            if span > 1e6:
                break
        ts = np.linspace(-span, span, samples)
        for t in ts:
            z = a.boundary_point(float(t))
            if b.contains(z, tol=1e-12):
                pts.append(z)
    if len(pts) < 2:
        return 0.0
    best = 0.0
    arr = np.array(pts)
    for i, z in enumerate(arr):
        d = 2.0 * np.arcsinh(np.abs(z - arr) / (2.0 * np.sqrt(z.imag * arr.imag)))
        best = max(best, float(d.max()))
    return best


def cusp_winding(u: Horodisc, x, y) -> float:
    """Distance along the boundary of u between the projections of x and y."""
    a = u.normalize(_c(x))
    b = u.normalize(_c(y))
    return abs(a.real - b.real)


# --------------------------------------------------------------------------
# rationals


def rationals_between(lo: float, hi: float, max_den: int):
    """Fractions in [lo, hi] with denominator <= max_den, increasing.

    Each unit interval is walked as a Stern-Brocot tree, pruning subtrees
    whose interval misses [lo, hi] or whose denominators are too large.
    """
    if max_den < 1 or hi < lo:
        return
    for m in range(math.floor(lo), math.floor(hi) + 1):
        if lo <= m <= hi:
            yield Fraction(m)
        # in-order walk of the tree strictly between m/1 and (m+1)/1
        stack = [((m, 1), (m + 1, 1), False)]
        while stack:
            left, right, emit = stack.pop()
            if emit:
                yield Fraction(left[0], left[1])
                continue
            a = left[0] + right[0]
            b = left[1] + right[1]
            if b > max_den:
                continue
            if right[0] / right[1] < lo or left[0] / left[1] > hi:
                continue
            # push right subtree, node, left subtree (LIFO)
            stack.append(((a, b), right, False))
            if lo <= a / b <= hi:
                stack.append(((a, b), None, True))
            stack.append((left, (a, b), False))


# --------------------------------------------------------------------------
# families of horodiscs


@dataclass
class HoroFamily:
    """Horodiscs of every cusp of a group at levels eps (U) and eps0 (U')."""

    surface: object
    classes: list
    eps: float
    eps0: float
    lattice: bool
    classify: Callable = field(repr=False)
    max_denominator: int = 8
    window: tuple[float, float] = (-4.0, 4.0)
    word_radius: int = 12
    translates: dict | None = field(default=None, repr=False)
    notes: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.surface.n

    @cached_property
    def _kmin(self) -> int:
        return min(c.k_short for c in self.classes)

    def disc(self, direction, level: float | None = None) -> Horodisc | None:
        w = Holonomy(*direction).normalized()
        idx = self.classify(w)
        if idx is None:
            return None
        c = self.classes[idx]
        return Horodisc(w.scaled(c.k_short), self.eps if level is None else level, self.n, idx)

    def discs_meeting(self, x_lo: float, x_hi: float, y_min: float, level: float | None = None) -> list[Horodisc]:
        """Every family horodisc that can reach the box [x_lo, x_hi] x [y_min, inf)."""
        level = self.eps if level is None else level
        if not self.classes:
            return []
        out = []
        if self.lattice:
            inf_disc = self.disc((1, 0), level)
            if inf_disc is not None:
                out.append(inf_disc)
            k = self._kmin
            bmax = int(math.floor(math.sqrt(level * self.n / y_min) / k + 1e-9))
            margin = level * self.n / (2 * k * k)
            for f in rationals_between(x_lo - margin, x_hi + margin, bmax):
                d = self.disc((f.numerator, f.denominator), level)
                if d is None or d.diameter < y_min * (1 - 1e-12):
                    continue
                c, r = float(f), d.diameter / 2
                if c + r < x_lo or c - r > x_hi:
                    continue
                out.append(d)
            return out
        for w, idx in self.translates.items():
            c = self.classes[idx]
            d = Horodisc(w.scaled(c.k_short), level, self.n, idx)
            if d.is_halfplane:
                out.append(d)
                continue
            cc, r = float(d.cusp), d.diameter / 2
            if d.diameter >= y_min * (1 - 1e-12) and cc + r >= x_lo and cc - r <= x_hi:
                out.append(d)
        return out

    @cached_property
    def electric_nodes(self) -> list[Horodisc]:
        """The fixed candidate set used by electrified distances."""
        lo, hi = self.window
        if self.lattice:
            out = []
            inf_disc = self.disc((1, 0))
            if inf_disc is not None:
                out.append(inf_disc)
            for f in rationals_between(lo, hi, self.max_denominator):
                d = self.disc((f.numerator, f.denominator))
                if d is not None:
                    out.append(d)
            return out
        out = []
        for w, idx in sorted(self.translates.items(), key=lambda t: (t[0].b, t[0].a)):
            c = self.classes[idx]
            d = Horodisc(w.scaled(c.k_short), self.eps, self.n, idx)
            if d.is_halfplane or lo <= float(d.cusp) <= hi:
                out.append(d)
        return out

    @cached_property
    def _electric_graph(self):
        nodes = self.electric_nodes
        m = len(nodes)
        w = np.full((m, m), np.inf)
        for i in range(m):
            w[i, i] = 0.0
            for j in range(i + 1, m):
                g = horoball_gap(nodes[i], nodes[j]) + 1.0
                w[i, j] = w[j, i] = g
        if m == 0:
            return w, w, np.zeros((0, 0), dtype=int)
        dist, pred = shortest_path(w, method="D", directed=False, return_predecessors=True)
        return w, dist, pred

    def certificate(self) -> dict:
        out = {
            "lattice": self.lattice,
            "eps": self.eps,
            "eps0": self.eps0,
            "max_denominator": self.max_denominator,
            "window": list(self.window),
            "electric_nodes": len(self.electric_nodes),
            "candidate_enumeration": "Stern-Brocot, certified complete" if self.lattice else f"group-ball translates up to word length {self.word_radius} (best effort)",
        }
        out.update(self.notes)
        return out


def lattice_family(veech, eps: float, eps0: float, **kw) -> HoroFamily:
    classes = veech.cusp_classes
    cache: dict = {}

    def classify(w):
        r = cache.get(w)
        if r is None:
            r = cache[w] = veech.class_index(w)
        return r

    return HoroFamily(veech.surface, classes, eps, eps0, True, classify, **kw)


def subgroup_family(surface, group, classes, eps: float, eps0: float, word_radius: int = 6, **kw) -> HoroFamily:
    from .veech import group_ball

    translates: dict = {}
    ball = group_ball(group, word_radius)
    for e in ball:
        for c in classes:
            w = e.element.apply(c.direction).normalized()
            translates.setdefault(w, c.index)
    return HoroFamily(surface, classes, eps, eps0, False, translates.get, word_radius=word_radius, translates=translates, **kw)


# --------------------------------------------------------------------------
# paths and distances


class Piece(NamedTuple):
    kind: str  # "geodesic", "horocycle" or "electric"
    start: complex
    end: complex
    length: float
    disc: Horodisc | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "start": [self.start.real, self.start.imag],
            "end": [self.end.real, self.end.imag],
            "length": self.length,
            "cusp": None if self.disc is None else self.disc.summary()["cusp"],
        }


class PathResult(NamedTuple):
    distance: float
    path: list


def path_length(path) -> float:
    return sum(p.length for p in path)


def geodesic_frame(x: complex, y: complex):
    """Real unimodular F with F(x) = i and F(y) on the imaginary axis above i."""
    sx = math.sqrt(x.imag)
    f1 = (1.0 / sx, -x.real / sx, 0.0, sx)
    y1 = _mob(f1, y)
    u = (y1 - 1j) / (y1 + 1j)
    if abs(u) < 1e-300:
        return f1
    phi = math.atan2(u.imag, u.real)
    best = None
    for theta in (phi / 2, -phi / 2, phi / 2 + math.pi / 2, -phi / 2 + math.pi / 2):
        k = (math.cos(theta), math.sin(theta), -math.sin(theta), math.cos(theta))
        img = _mob(k, y1)
        score = abs(img.real) + (0.0 if img.imag >= 1 else 1e9)
        if best is None or score < best[0]:
            best = (score, k)
    return _mul(best[1], f1)


def penetration(disc: Horodisc, frame, dist: float):
    """Interval [s1, s2] of the geodesic s -> F^-1(i e^s), 0 <= s <= dist, inside the disc."""
    a, b = _vec(frame, disc.holonomy)
    en = disc.level * disc.n
    if b * b < 1e-300:
        if a == 0:
            return (0.0, dist)
        t1 = a * a / en
        lo = math.log(t1)
        return (lo, math.inf) if lo < dist else None
    disc2 = en * en - 4 * a * a * b * b
    if disc2 <= 0:
        return None
    root = math.sqrt(disc2)
    t2 = (en + root) / (2 * b * b)
    t1 = 2 * a * a / (en + root) if a != 0 else 0.0
    lo = math.log(t1) if t1 > 0 else -math.inf
    hi = math.log(t2)
    if hi <= 0 or lo >= dist:
        return None
    return (lo, hi)


def _candidates_for_segment(x: complex, y: complex, fam: HoroFamily):
    ymin = min(x.imag, y.imag)
    return fam.discs_meeting(min(x.real, y.real), max(x.real, y.real), ymin)


def truncated_distance(x, y, fam: HoroFamily) -> PathResult:
    """Length of the geodesic with each horodisc chord swapped for its horocyclic arc."""
    x, y = _c(x), _c(y)
    if x == y:
        return PathResult(0.0, [])
    discs = _candidates_for_segment(x, y, fam)
    for d in discs:
        for p in (x, y):
            if d.strictly_contains(p):
                raise PointInsideHoroball(f"{p} lies inside the horodisc at {d.cusp}")
    frame = geodesic_frame(x, y)
    finv = _inv(frame)
    dist = hyp_distance(x, y)
    hits = []
    for d in discs:
        iv = penetration(d, frame, dist)
        if iv is None:
            continue
        lo, hi = max(iv[0], 0.0), min(iv[1], dist)
        if hi - lo > 1e-15:
            hits.append((lo, hi, d))
    hits.sort(key=lambda t: t[0])
    pieces = []

    def at(s):
        if s <= 0:
            return x
        if s >= dist:
            return y
        return _mob(finv, complex(0.0, math.exp(s)))

    cur = 0.0
    for lo, hi, d in hits:
        lo = max(lo, cur)
        if hi <= lo:
            continue
        if lo <= cur + 1e-12:
            lo = cur
        else:
            pieces.append(Piece("geodesic", at(cur), at(lo), lo - cur))
        if hi >= dist - 1e-12:
            hi = dist
        pieces.append(Piece("horocycle", at(lo), at(hi), horocycle_arc(hi - lo), d))
        cur = hi
    if cur < dist:
        pieces.append(Piece("geodesic", at(cur), y, dist - cur))
    return PathResult(path_length(pieces), pieces)


def detour_constant(c: float) -> float:
    return math.sqrt(1.0 + (c / 2.0) ** 2)


def detour_bound(x, y, fam: HoroFamily, c: float = 2.0) -> float:
    """A_3(c) d(x, y) + sum over penetrated horodiscs of [winding]_c."""
    x, y = _c(x), _c(y)
    total = detour_constant(c) * hyp_distance(x, y)
    frame = geodesic_frame(x, y) if x != y else None
    if frame is None:
        return total
    dist = hyp_distance(x, y)
    for d in _candidates_for_segment(x, y, fam):
        if penetration(d, frame, dist) is not None:
            w = cusp_winding(d, x, y)
            total += w if w >= c else 0.0
    return total


def electrified_distance(x, y, fam: HoroFamily | None) -> PathResult:
    """Shortest path where crossing any family horodisc costs exactly 1."""
    x, y = _c(x), _c(y)
    if x == y:
        return PathResult(0.0, [])
    direct = hyp_distance(x, y)
    nodes = fam.electric_nodes if fam is not None else []
    if not nodes:
        return PathResult(direct, [Piece("geodesic", x, y, direct)])
    _, dist, pred = fam._electric_graph
    dx = np.array([d.distance_to(x) for d in nodes]) + 0.5
    dy = np.array([d.distance_to(y) for d in nodes]) + 0.5
    total = dx[:, None] + dist + dy[None, :]
    i, j = np.unravel_index(int(np.argmin(total)), total.shape)
    best = float(total[i, j])
    if direct <= best:
        return PathResult(direct, [Piece("geodesic", x, y, direct)])
    chain = [j]
    while chain[-1] != i:
        chain.append(int(pred[i, chain[-1]]))
    chain.reverse()
    pieces = []
    u = nodes[chain[0]]
    entry = u.projection(x)
    if entry != x:
        pieces.append(Piece("geodesic", x, entry, u.distance_to(x)))
    for a, b in zip(chain, chain[1:]):
        ua, ub = nodes[a], nodes[b]
        p, q = _gap_endpoints(ua, ub)
        pieces.append(Piece("electric", entry, p, 1.0, ua))
        pieces.append(Piece("geodesic", p, q, horoball_gap(ua, ub)))
        entry = q
    last = nodes[chain[-1]]
    exit_ = last.projection(y)
    pieces.append(Piece("electric", entry, exit_, 1.0, last))
    if exit_ != y:
        pieces.append(Piece("geodesic", exit_, y, last.distance_to(y)))
    return PathResult(best, pieces)


def _gap_endpoints(u: Horodisc, v: Horodisc):
    """Closest points of two horodiscs (a common point when they overlap)."""
    if v.is_halfplane:
        q, p = _gap_endpoints(v, u)
        return p, q
    # in u's normalized chart v is a disc tangent at c with top at height top
    g = v.holonomy
    a, b = _vec(u.normalizer, g)
    c = a / b
    top = v.level * v.n / (b * b)
    if top >= 1.0:
        pt = u.unnormalize(complex(c, 1.0))
        return pt, pt
    return u.unnormalize(complex(c, 1.0)), u.unnormalize(complex(c, top))


# --------------------------------------------------------------------------
# Nielsen core


@dataclass
class NielsenCore:
    lattice: bool
    limit_points: list[float]
    samples: int

    def member(self, z) -> bool:
        if self.lattice:
            return True
        z = _c(z)
        pts = self.limit_points
        if len(pts) < 3:
            return False
        # ideal polygon on the sorted limit points: inside the outer
        # semicircle, outside every consecutive one
        finite = sorted(pts)
        for a, b in zip(finite, finite[1:]):
            if abs(z - (a + b) / 2) < (b - a) / 2 * (1 - 1e-12):
                return False
        a, b = finite[0], finite[-1]
        return abs(z - (a + b) / 2) <= (b - a) / 2 * (1 + 1e-12)


def nielsen_core(G, samples: int = 4) -> NielsenCore:
    from .veech import check_non_elementary, classify_element, group_ball, hyperbolic_fixed_points

    if G.is_lattice:
        return NielsenCore(True, [], samples)
    check_non_elementary(G, min(samples, 3) if samples >= 1 else 1)
    pts = set()
    for e in group_ball(G, samples):
        m = e.element
        if classify_element(m) != "hyperbolic":
            continue
        for p in hyperbolic_fixed_points(m):
            pts.add(round(p, 12))
    return NielsenCore(False, sorted(pts), samples)
