"""Coarse bookkeeping: cutoffs, curve-graph estimates, spectra, constants
and the quasi-isometry experiments.
"""
from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .chart import DiscPoint, chart_length
from .disc import (
    HoroFamily,
    Horodisc,
    _c,
    cusp_winding,
    electrified_distance,
    horoball_gap,
    horodisc_of,
    hyp_distance,
    lattice_family,
    overlap_bound,
    overlap_diameter,
    penetration,
    geodesic_frame,
    subgroup_family,
    truncated_distance,
)
from .errors import BasepointInHoroball, EmptyGrid, EmptyParabolics, NoParabolics
from .flat import Cylinder, intersection_number, systole, vectors_shorter_than
from .origami import Origami
from .vectors import IDENTITY, Holonomy, IntMatrix, S, T
from .veech import FuchsianSubgroup, VeechGroup, cusp_classes, group_ball, veech_group


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("TEICHCORE_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items) -> list:
    """``map`` over a thread pool sized by TEICHCORE_THREADS; results keep input order."""
    items = list(items)
    k = worker_count()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


def cutoff(t: float, c: float) -> float:
    if c < 0:
        raise ValueError("cutoff threshold must be non-negative")
    return t if t >= c else 0


# --------------------------------------------------------------------------
# quasi-isometry constants


def fit_qi_constant(samples, floor: float = 1.0) -> float:
    """Least K >= floor with a/K - K <= b <= K a + K for every (a, b, ...)."""
    k = floor
    for s in samples:
        a, b = float(s[0]), float(s[1])
        k = max(k, b / (a + 1.0), (-b + math.sqrt(b * b + 4.0 * a)) / 2.0 if a > 0 else 0.0)
    return k


def fit_upper_constant(samples, floor: float = 1.0) -> float:
    """Least K >= floor with b <= K a + K."""
    k = floor
    for s in samples:
        k = max(k, float(s[1]) / (float(s[0]) + 1.0))
    return k


def certifies(samples, k: float, two_sided: bool = True, tol: float = 1e-9) -> bool:
    for s in samples:
        a, b = float(s[0]), float(s[1])
        if b > k * a + k + tol:
            return False
        if two_sided and a / k - k > b + tol:
            return False
    return True


@dataclass
class QIReport:
    samples: list  # (input distance, output distance, witness)
    K: float
    per_radius: dict = field(default_factory=dict)
    two_sided: bool = True
    extra: dict = field(default_factory=dict)

    def certified(self) -> bool:
        return certifies(self.samples, self.K, self.two_sided)

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "two_sided": self.two_sided,
            "certifies_all_samples": self.certified(),
            "per_radius": {str(k): v for k, v in sorted(self.per_radius.items())},
            "samples": [[float(a), float(b), str(w)] for a, b, w in self.samples],
            **self.extra,
        }


# --------------------------------------------------------------------------
# curve-graph estimates


@lru_cache(maxsize=1 << 16)
def _pair_cost(s: Origami, c1: Cylinder, c2: Cylinder) -> float:
    if c1 == c2:
        return 0.0
    i = intersection_number(s, c1, c2)
    return 1.0 if i == 0 else 2.0 * math.log(i) + 2.0


def pair_cost(s: Origami, c1: Cylinder, c2: Cylinder) -> float:
    """Hempel's bound on the curve-graph distance of two core curves."""
    if (c1.direction, c1.index) > (c2.direction, c2.index):
        c1, c2 = c2, c1
    return _pair_cost(s, c1, c2)


@dataclass(frozen=True)
class HempelEstimate:
    value: float
    direct: float
    chained: float
    samples: int
    upper_bound: bool = True


def _geodesic_samples(x: complex, y: complex, spacing: float, max_samples: int) -> list[complex]:
    d = hyp_distance(x, y)
    if d == 0:
        return [x]
    m = min(max_samples, max(1, math.ceil(d / spacing)))
    frame = geodesic_frame(x, y)
    p, q, r, s = frame
    finv = (s, -q, -r, p)
    out = [x]
    for j in range(1, m):
        w = complex(0.0, math.exp(d * j / m))
        out.append((finv[0] * w + finv[1]) / (finv[2] * w + finv[3]))
    out.append(y)
    return out


def hempel_details(x: DiscPoint, y: DiscPoint, spacing: float = 0.5, max_samples: int = 48) -> HempelEstimate:
    s = x.surface
    # symmetrize by a canonical endpoint order
    if (float(y.x), float(y.y)) < (float(x.x), float(x.y)):
        x, y = y, x
    sx, sy = systole(x).curves, systole(y).curves
    direct = min(pair_cost(s, a, b) for a in sx for b in sy)
    pts = _geodesic_samples(x.z, y.z, spacing, max_samples)
    layers = [systole(DiscPoint(p.real, p.imag, s)).curves for p in pts[1:-1]]
    layers = [sx] + layers + [sy]
    cost = {c: 0.0 for c in layers[0]}
    for layer in layers[1:]:
        cost = {b: min(cost[a] + pair_cost(s, a, b) for a in cost) for b in layer}
    chained = min(cost.values())
    return HempelEstimate(min(direct, chained), direct, chained, len(pts))


def hempel_estimate(x: DiscPoint, y: DiscPoint, **kw) -> float:
    """Upper estimate of the curve-graph distance between the systoles of x and y."""
    return hempel_details(x, y, **kw).value


# --------------------------------------------------------------------------
# twisting


def _class_disc(cls_or_disc, fam: HoroFamily) -> tuple[object, Horodisc]:
    if isinstance(cls_or_disc, Horodisc):
        return fam.classes[cls_or_disc.class_index], cls_or_disc
    return cls_or_disc, horodisc_of(cls_or_disc, fam.eps)


def twisting_interval(cls, x, y, fam: HoroFamily) -> tuple[float, float]:
    """Interval certified to hold the relative twisting of the class cores."""
    c, disc = _class_disc(cls, fam)
    s = cusp_winding(disc, x, y)
    eps = fam.eps
    return (float(c.m_low(eps)) * s - 2.0, float(c.m_high(eps)) * s + 2.0)


def flat_frame(z: complex, n: int) -> np.ndarray:
    """The linear map carrying base holonomies to the flat structure at z."""
    x, y = z.real, z.imag
    return np.array([[1.0, -x], [0.0, y]]) / math.sqrt(n * y)


def chart_twisting(cyl: Cylinder, n: int, x: complex, y: complex, theta: float = 0.25, phi: float = 0.6) -> int:
    """Count crossings of two perpendicular leaves inside one cylinder.

    The leaf perpendicular to the cylinder at x is followed to the flat
    structure at y, where it is compared with the leaf perpendicular there.
    ``theta`` and ``phi`` place the two leaves along the circumference.
    """
    w = np.array(cyl.direction, dtype=float)
    ax, ay = flat_frame(x, n), flat_frame(y, n)
    ux = ax @ w
    perp = np.linalg.solve(ax, np.array([-ux[1], ux[0]]))
    uy = ay @ w
    along = uy / np.linalg.norm(uy)
    normal = np.array([-along[1], along[0]])
    img = ay @ perp
    ratio = float(img @ along) / float(img @ normal)
    circ = cyl.circumference_multiplier * float(np.linalg.norm(uy))
    height = (cyl.area / n) / circ
    shift = abs(ratio) * height
    lo = theta * circ
    hi = lo + shift
    # vertical lifts phi * circ + j * circ inside [lo, hi]
    j_lo = math.ceil((lo - phi * circ) / circ)
    j_hi = math.floor((hi - phi * circ) / circ)
    return max(0, j_hi - j_lo + 1)


# --------------------------------------------------------------------------
# spectra


@dataclass
class SpectrumReport:
    values: list  # Fractions
    min_positive_gap: Fraction | None
    invariant: bool
    certified: bool
    bound: float
    witnesses: dict = field(default_factory=dict, repr=False)

    @property
    def floats(self) -> list[float]:
        return [float(v) for v in self.values]

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "values": [str(v) for v in self.values],
            "values_float": self.floats,
            "min_positive_gap": None if self.min_positive_gap is None else str(self.min_positive_gap),
            "invariant_under_change_of_chart": self.invariant,
            "certified_complete": self.certified,
        }


def _random_unimodular(seed: int) -> IntMatrix:
    rng = random.Random(seed)
    m = IDENTITY
    for _ in range(8):
        m = m @ rng.choice([S, T, T.inverse(), T @ T])
    return m


def _spectrum_from_pairs(pairs: dict, b: float, n: int, certified: bool, seed: int) -> SpectrumReport:
    values = sorted(pairs)
    gaps = [y - x for x, y in zip(values, values[1:])]
    gap = min(gaps) if gaps else None
    m = _random_unimodular(seed)
    moved = {Fraction(abs(m.apply(u).wedge(m.apply(v))), n) for u, v in pairs.values()}
    return SpectrumReport(values, gap, moved == set(values), certified, b, pairs)


def _as_veech(s: Origami, G) -> VeechGroup | None:
    if isinstance(G, VeechGroup):
        return G
    if G is None:
        return veech_group(s)
    if G.full:
        return G.ambient if G.ambient is not None else veech_group(s)
    return None


def pvt_spectrum(s: Origami, G, b: float, radius: int = 6, seed: int = 0) -> SpectrumReport:
    """Wedges |u ^ v| / n <= b over parabolic saddle-connection holonomies."""
    veech = _as_veech(s, G)
    limit = Fraction(b).limit_denominator(10**9) if not isinstance(b, Fraction) else b
    pairs: dict = {}
    if veech is not None:
        classes = veech.cusp_classes
        if not classes:
            raise EmptyParabolics("no parabolic directions")
        pairs[Fraction(0)] = (classes[0].v_short, classes[0].v_short)
        ks = {}
        for c in classes:
            r_inv = c.conjugator.inverse()
            mmax = int(math.floor(limit * s.n / c.k_short))
            for m in range(1, mmax + 1):
                for x in range(c.width * m):
                    if math.gcd(x, m) != 1:
                        continue
                    d = r_inv.apply((x, m)).normalized()
                    idx = ks.get(d)
                    if idx is None:
                        idx = ks[d] = veech.class_index(d)
                    for k1 in c.saddle_multipliers:
                        for k2 in classes[idx].saddle_multipliers:
                            val = Fraction(k1 * k2 * m, s.n)
                            if val <= limit and val not in pairs:
                                pairs[val] = (c.direction.scaled(k1), d.scaled(k2))
        return _spectrum_from_pairs(pairs, float(b), s.n, True, seed)
    classes = cusp_classes(s, G, radius)
    if not classes:
        raise EmptyParabolics("no parabolic directions found")
    vecs = set()
    for e in group_ball(G, radius):
        for c in classes:
            w = e.element.apply(c.direction).normalized()
            for k in c.saddle_multipliers:
                vecs.add(w.scaled(k))
    vecs = sorted(vecs)
    for i, u in enumerate(vecs):
        for v in vecs[i:]:
            val = Fraction(abs(u.wedge(v)), s.n)
            if val <= limit and val not in pairs:
                pairs[val] = (u, v)
    return _spectrum_from_pairs(pairs, float(b), s.n, False, seed)


# --------------------------------------------------------------------------
# epsilon and the overlap constant


@dataclass
class EpsilonChoice:
    eps: float
    min_wedge: Fraction  # unit-area
    certified: bool
    pairs_checked: int
    min_gap: float
    radius: int

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "min_unit_wedge": str(self.min_wedge),
            "certified": self.certified,
            "pairs_checked": self.pairs_checked,
            "min_gap": self.min_gap,
            "enumeration_radius": self.radius,
        }


def min_parabolic_wedge(veech: VeechGroup) -> int:
    """Least |v_H ^ v_K| over shortest vectors of distinct cusps (integer wedge)."""
    classes = veech.cusp_classes
    kmin = min(c.k_short for c in classes)
    best = None
    for c in classes:
        r_inv = c.conjugator.inverse()
        m = 1
        while best is None or c.k_short * kmin * m < best:
            for x in range(c.width * m):
                if math.gcd(x, m) != 1:
                    continue
                d = r_inv.apply((x, m))
                k2 = classes[veech.class_index(d)].k_short
                val = c.k_short * k2 * m
                if best is None or val < best:
                    best = val
            m += 1
    return best


def enumerated_directions(radius: int) -> list[Holonomy]:
    out = []
    for b in range(0, radius + 1):
        for a in range(-radius, radius + 1):
            if (b == 0 and a <= 0) or math.gcd(a, b) != 1:
                continue
            out.append(Holonomy(a, b))
    return out


def _family_discs(fam: HoroFamily, radius: int, level: float) -> list[Horodisc]:
    if fam.lattice:
        return [d for d in (fam.disc(w, level) for w in enumerated_directions(radius)) if d is not None]
    return [Horodisc(w.scaled(fam.classes[i].k_short), level, fam.n, i) for w, i in sorted(fam.translates.items())]


def choose_epsilon(s: Origami, G, classes=None, eps0: float = 0.5, radius: int = 12) -> EpsilonChoice:
    veech = _as_veech(s, G)
    if veech is not None:
        classes = veech.cusp_classes
        if not classes:
            raise NoParabolics("no cusps")
        wmin = Fraction(min_parabolic_wedge(veech), s.n)
        certified = True
    else:
        classes = classes if classes is not None else cusp_classes(s, G, min(radius, 6))
        if not classes:
            raise NoParabolics("no cusps")
        vecs = set()
        for e in group_ball(G, min(radius, 6)):
            for c in classes:
                vecs.add(e.element.apply(c.direction).normalized().scaled(c.k_short))
        vecs = sorted(vecs)
        wmin = min(Fraction(abs(u.wedge(v)), s.n) for i, u in enumerate(vecs) for v in vecs[i + 1:] if u.wedge(v))
        certified = False
    eps = min(eps0, math.exp(-0.5) * float(wmin))
    fam = make_family(s, G, eps0=eps0, eps=eps, veech=veech, classes=classes)
    discs = _family_discs(fam, radius, eps)
    checked, gmin = 0, math.inf
    for i, u in enumerate(discs):
        for v in discs[i + 1:]:
            gmin = min(gmin, horoball_gap(u, v))
            checked += 1
    return EpsilonChoice(eps, wmin, certified, checked, gmin, radius)


@dataclass
class OverlapReport:
    R: float
    t: float
    theoretical_bound: float
    pairs: int
    diameters: list = field(repr=False, default_factory=list)


def horo_overlap_report(fam: HoroFamily, radius: int = 12) -> OverlapReport:
    """Diameters of U'(H) cap U'(K) over enumerated pairs and their maximum R."""
    discs = _family_discs(fam, radius, fam.eps0)
    diams = []
    for i, u in enumerate(discs):
        for v in discs[i + 1:]:
            diams.append(overlap_diameter(u, v))
    t = math.log(fam.eps0 / fam.eps)
    return OverlapReport(max(diams, default=0.0), t, overlap_bound(t), len(diams), diams)


# --------------------------------------------------------------------------
# width constant


@dataclass
class WEstimate:
    value: float
    argmin: complex
    points: int
    certified: bool = False  # a sampled estimate, biased upward


def fundamental_grid(veech: VeechGroup | None, step: float = 0.02, y_max: float = 3.0) -> list[complex]:
    """Grid over the union of the coset translates of the modular fundamental domain."""
    pts = []
    nx = int(round(1.0 / step))
    for i in range(nx + 1):
        x = -0.5 + i * step
        y0 = math.sqrt(max(1.0 - x * x, 0.0))
        j = 0
        while y0 + j * step <= y_max + 1e-12:
            pts.append(complex(x, y0 + j * step))
            j += 1
    if veech is None:
        return pts
    out = []
    for r in veech.reps:
        ri = r.inverse()
        for z in pts:
            out.append((ri.p * z + ri.q) / (ri.r * z + ri.s))
    return out


def width_at(z: complex, fam: HoroFamily) -> float:
    """sup over cusps of the unit-area width of the thinnest cylinder."""
    n = fam.n
    factors = [float(c.min_width_factor()) for c in fam.classes]
    if not fam.lattice:
        return max(factors[i] / chart_length(z, w, n) for w, i in fam.translates.items())
    cmax = max(factors)
    best = 0.0
    for w in ((1, 0), (0, 1)):
        best = max(best, factors[fam.classify(Holonomy(*w))] / chart_length(z, w, n))
    for w in vectors_shorter_than(z, n, cmax / best):
        best = max(best, factors[fam.classify(w)] / chart_length(z, w, n))
    return best


def compute_W(s: Origami, G, fam: HoroFamily, grid=0.02, y_max: float = 3.0) -> WEstimate:
    """Grid minimum of the widest-thinnest-cylinder function."""
    if isinstance(grid, (int, float)):
        veech = _as_veech(s, G)
        pts = fundamental_grid(veech, float(grid), y_max)
    else:
        pts = [complex(z) for z in grid]
    if not pts:
        raise EmptyGrid("no grid points")
    best, arg = math.inf, None
    for z in pts:
        w = width_at(z, fam)
        if w < best:
            best, arg = w, z
    return WEstimate(best, arg, len(pts))


# --------------------------------------------------------------------------
# families


def make_family(
    s: Origami,
    G=None,
    eps0: float = 0.5,
    eps: float | None = None,
    radius: int = 12,
    veech: VeechGroup | None = None,
    classes=None,
    **kw,
) -> HoroFamily:
    """Horodisc family of a group; eps defaults to ``choose_epsilon``."""
    if veech is None:
        veech = _as_veech(s, G)
    if eps is None:
        eps = choose_epsilon(s, veech if veech is not None else G, classes, eps0, radius).eps
    if veech is not None:
        return lattice_family(veech, eps, eps0, **kw)
    if classes is None:
        classes = cusp_classes(s, G, min(radius, 6))
    return subgroup_family(s, G, classes, eps, eps0, word_radius=min(radius, 6), **kw)


def point_is_thick(z: complex, fam: HoroFamily) -> bool:
    return not any(d.strictly_contains(z) for d in fam.discs_meeting(z.real, z.real, z.imag))


def thick_box(fam: HoroFamily) -> tuple[float, float, float, float]:
    """Sampling box matching the electrified node window.

    Below the bottom height no horodisc outside the node set can matter, and
    the top stays under the horodisc at infinity.
    """
    lo, hi = fam.window
    k = fam._kmin
    bottom = fam.eps * fam.n / (k * k * fam.max_denominator ** 2)
    inf_disc = fam.disc((1, 0)) if fam.lattice else None
    top = 2.0 if inf_disc is None else 0.95 * inf_disc.k ** 2 / (fam.n * fam.eps)
    return (lo, hi, bottom, top)


def sample_thick_pairs(fam: HoroFamily, count: int, seed: int = 0, box=None) -> list:
    """Seeded pairs of points outside every horodisc, log-uniform in height."""
    rng = random.Random(seed)
    x0, x1, y0, y1 = thick_box(fam) if box is None else box
    pts = []
    while len(pts) < 2 * count:
        z = complex(rng.uniform(x0, x1), math.exp(rng.uniform(math.log(y0), math.log(y1))))
        if point_is_thick(z, fam):
            pts.append(z)
    return list(zip(pts[::2], pts[1::2]))


# --------------------------------------------------------------------------
# distance formula and experiments


def winding_terms(x, y, fam: HoroFamily, c: float = 2.0):
    """Cusp windings of the horodiscs met by the geodesic [x, y].

    A horodisc that the geodesic misses has winding at most 2 <= c, so only
    penetrated ones can contribute.
    """
    x, y = _c(x), _c(y)
    if x == y:
        return []
    frame = geodesic_frame(x, y)
    dist = hyp_distance(x, y)
    out = []
    for d in fam.discs_meeting(min(x.real, y.real), max(x.real, y.real), min(x.imag, y.imag)):
        if penetration(d, frame, dist) is None:
            continue
        out.append((d, cusp_winding(d, x, y)))
    return out


def distance_formula_rhs(x: DiscPoint, y: DiscPoint, fam: HoroFamily, c: float = 2.0):
    if c < 2:
        raise ValueError("the threshold c must be at least 2")
    h = hempel_estimate(x, y)
    terms = [{"term": "hempel", "value": h}]
    total = h
    for d, w in winding_terms(x.z, y.z, fam, c):
        cls = fam.classes[d.class_index]
        val = cls.core_count * cutoff(w, c)
        if val:
            terms.append({"term": "winding", "cusp": d.summary()["cusp"], "winding": w, "core_count": cls.core_count, "value": val})
            total += val
    return total, terms


def _subgroup_of(s: Origami, G) -> FuchsianSubgroup:
    if isinstance(G, VeechGroup):
        return G.as_subgroup()
    if G is None:
        return veech_group(s).as_subgroup()
    return G


def undistortion_experiment(s: Origami, G, fam: HoroFamily, radius: int, basepoint: complex = 0.1 + 1.5j) -> QIReport:
    """Word length against truncated distance along an orbit."""
    x0 = _c(basepoint)
    if not point_is_thick(x0, fam):
        raise BasepointInHoroball(f"basepoint {x0} lies inside a horodisc")
    sub = _subgroup_of(s, G)
    ball = group_ball(sub, radius)
    disp = 0.0
    for name, g in sub.generators:
        for m in (g, g.inverse()):
            disp = max(disp, truncated_distance(x0, _apply(m, x0), fam).distance)
    dists = parallel_map(
        lambda e: truncated_distance(x0, _apply(e.element, x0), fam).distance if e.word_length else 0.0, ball
    )
    samples = []
    per_radius: dict = {}
    violations = 0
    for e, d in zip(ball, dists):
        samples.append((e.word_length, d, e.word or "e"))
        lo, hi = per_radius.get(e.word_length, (math.inf, -math.inf))
        per_radius[e.word_length] = (min(lo, d), max(hi, d))
        if d > disp * e.word_length + 1e-9:
            violations += 1
    k = fit_qi_constant(samples)
    table = {r: {"min": v[0], "max": v[1]} for r, v in per_radius.items()}
    extra = {
        "basepoint": [x0.real, x0.imag],
        "max_generator_displacement": disp,
        "upper_bound_violations": violations,
        "radius": radius,
    }
    return QIReport(samples, k, table, True, extra)


def _apply(m: IntMatrix, z: complex) -> complex:
    return (m.p * z + m.q) / (m.r * z + m.s)


def spearman(a, b) -> float:
    from scipy.stats import spearmanr

    return float(spearmanr(a, b).statistic)


def systole_qi_experiment(s: Origami, G, fam: HoroFamily, pairs) -> QIReport:
    """Electrified distance against the Hempel estimate on sampled pairs."""
    def one(pair):
        x, y = _c(pair[0]), _c(pair[1])
        d = electrified_distance(x, y, fam).distance
        h = hempel_estimate(DiscPoint(x.real, x.imag, s), DiscPoint(y.real, y.imag, s))
        return (d, h, f"{x:.6g}|{y:.6g}")

    fam.electric_nodes, fam._electric_graph  # build shared caches before fanning out
    samples = parallel_map(one, pairs)
    k = fit_upper_constant(samples)
    rho = spearman([a for a, _, _ in samples], [b for _, b, _ in samples]) if len(samples) > 2 else float("nan")
    extra = {"spearman": rho, "K_two_sided_trend": fit_qi_constant(samples)}
    return QIReport(samples, k, {}, False, extra)
