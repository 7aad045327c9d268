"""SL(2,Z)-orbits of origamis, Veech groups and their cusps.

Origamis are compared as half-translation surfaces: ``(h, v)`` and its
half-turn ``(h^-1, v^-1)`` count as the same surface, so ``-I`` acts
trivially and the Veech group lives in PSL(2, Z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import (
    BallCapExceeded,
    ElementaryGroup,
    EmptyClassList,
    NotASubgroup,
    OrbitCapExceeded,
    ParseError,
)
from .flat import Cylinder, cylinder_decomposition, saddle_connections_in_direction
from .origami import Origami, inverse
from .vectors import IDENTITY, Holonomy, IntMatrix, S, T, primitive_direction, st_word, to_e1

# --------------------------------------------------------------------------
# the action on pairs of permutations


def sl2z_move(s: Origami, g: str) -> Origami:
    """Apply ``"S"``, ``"T"`` or ``"t"`` (= T^-1) to an origami.

    T shears: the right neighbours stay, the top neighbour of ``i`` becomes
    ``v(h^-1(i))``.  S rotates by a quarter turn counterclockwise.
    """
    h, v = s.h, s.v
    if g == "T":
        hi = s.h_inv
        return Origami(s.n, h, tuple(v[hi[i]] for i in range(s.n)), s.label)
    if g == "t":
        return Origami(s.n, h, tuple(v[h[i]] for i in range(s.n)), s.label)
    if g == "S":
        return Origami(s.n, s.v_inv, h, s.label)
    raise ValueError(f"unknown generator {g!r}")


def act(m: IntMatrix, s: Origami) -> Origami:
    """The origami ``m . s`` (well defined up to relabelling and half-turn)."""
    for name, k in reversed(st_word(m)):
        if name == "S":
            s = sl2z_move(s, "S")
        else:
            letter = "T" if k > 0 else "t"
            for _ in range(abs(k)):
                s = sl2z_move(s, letter)
    return s


def _relabelled(h, v, start):
    n = len(h)
    label = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for y in (h[x], v[x]):
            if y not in label:
                label[y] = len(order)
                order.append(y)
    hh = tuple(label[h[order[j]]] for j in range(n))
    vv = tuple(label[v[order[j]]] for j in range(n))
    return hh, vv


def canonical_pair(h, v) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least relabelling of ``(h, v)``."""
    return min(_relabelled(h, v, x) for x in range(len(h)))


def canonical_key(s: Origami) -> tuple:
    """Isomorphism invariant of the half-translation surface."""
    a = canonical_pair(s.h, s.v)
    b = canonical_pair(s.h_inv, s.v_inv)
    return min(a, b)


def canonical_form(s: Origami) -> Origami:
    h, v = canonical_key(s)
    return Origami(s.n, h, v, s.label)


def is_isomorphic(a: Origami, b: Origami) -> bool:
    return a.n == b.n and canonical_key(a) == canonical_key(b)


# --------------------------------------------------------------------------
# Veech group


def classify_element(m) -> str:
    """'elliptic', 'parabolic' or 'hyperbolic' by |trace|.

    The identity has finite order and is reported as elliptic.
    """
    if not isinstance(m, IntMatrix):
        m = IntMatrix.from_rows(m)
    if m.is_identity():
        return "elliptic"
    t = abs(m.trace)
    if t < 2:
        return "elliptic"
    if t == 2:
        return "parabolic"
    return "hyperbolic"


def nielsen_reduce(gens: list[IntMatrix], max_rounds: int = 200) -> list[IntMatrix]:
    """Shrink a generating set by Nielsen moves; the generated group is unchanged."""
    gens = [g for g in gens if not g.is_identity()]
    for _ in range(max_rounds):
        changed = False
        # drop duplicates up to inversion
        uniq: list[IntMatrix] = []
        for g in gens:
            if not g.is_identity() and not any(g == u or g == u.inverse() for u in uniq):
                uniq.append(g)
        if len(uniq) != len(gens):
            gens = uniq
            continue
        for i in range(len(gens)):
            best = gens[i]
            for j in range(len(gens)):
                if i == j:
                    continue
                for other in (gens[j], gens[j].inverse()):
                    for cand in (best @ other, other @ best):
                        if cand.size() < best.size():
                            best = cand
            if best is not gens[i]:
                gens[i] = best
                changed = True
        if not changed:
            break
    gens.sort(key=lambda g: (g.size(), g.key()))
    return gens


@dataclass
class VeechGroup:
    surface: Origami
    orbit: list[Origami]
    reps: list[IntMatrix]  # reps[j] . surface is orbit[j]
    s_perm: list[int]
    t_perm: list[int]
    schreier_generators: list[IntMatrix]
    generators: list[IntMatrix]

    @property
    def index(self) -> int:
        return len(self.orbit)

    lattice = True

    @cached_property
    def t_inv_perm(self) -> list[int]:
        return list(inverse(tuple(self.t_perm)))

    def orbit_index(self, m: IntMatrix) -> int:
        """Index j with ``m . surface`` isomorphic to ``orbit[j]``."""
        j = 0
        for name, k in reversed(st_word(m)):
            if name == "S":
                j = self.s_perm[j]
            else:
                perm = self.t_perm if k > 0 else self.t_inv_perm
                for _ in range(abs(k)):
                    j = perm[j]
        return j

    def contains(self, m: IntMatrix) -> bool:
        return self.orbit_index(m) == 0

    @cached_property
    def t_cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for i in range(self.index):
            if i in seen:
                continue
            cyc = []
            j = i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.t_perm[j]
            out.append(tuple(cyc))
        return out

    @cached_property
    def _cycle_of(self) -> list[int]:
        out = [0] * self.index
        for c, cyc in enumerate(self.t_cycles):
            for j in cyc:
                out[j] = c
        return out

    def class_index(self, direction) -> int:
        """Which cusp (T-cycle) a rational direction belongs to."""
        w = primitive_direction(direction)
        return self._cycle_of[self.orbit_index(to_e1(w))]

    @cached_property
    def cusp_classes(self) -> list["ParabolicClass"]:
        out = []
        for c, cyc in enumerate(self.t_cycles):
            best = None
            for j in cyc:
                w = self.reps[j].inverse().apply((1, 0)).normalized()
                key = (w.norm2(), -w.b, w.a, j)
                if best is None or key < best[0]:
                    best = (key, j, w)
            _, j, w = best
            width = len(cyc)
            conj = to_e1(w)
            gen = conj.inverse() @ (T ** width) @ conj
            out.append(make_parabolic_class(self.surface, w, conj, gen, width, index=c, certified=True))
        return out

    def as_subgroup(self) -> "FuchsianSubgroup":
        gens = []
        for k, g in enumerate(self.generators):
            name = "S" if g == S else "T" if g == T else f"g{k + 1}"
            gens.append((name, g))
        return FuchsianSubgroup(tuple(gens), ambient=self, full=True)

    def to_dot(self) -> str:
        lines = ["digraph coset_graph {"]
        for j, o in enumerate(self.orbit):
            lines.append(f'  {j} [label="{j}: {o}"];')
        for j in range(self.index):
            lines.append(f'  {j} -> {self.s_perm[j]} [label="S", style=dashed];')
            lines.append(f'  {j} -> {self.t_perm[j]} [label="T"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def veech_group(s: Origami, cap: int = 20_000) -> VeechGroup:
    """Stabilizer of ``s`` in PSL(2,Z) via orbit enumeration and Schreier generators."""
    start = canonical_form(s)
    orbit = [start]
    keys = {canonical_key(start): 0}
    reps = [IDENTITY]
    perms = {"S": [], "T": []}
    i = 0
    while i < len(orbit):
        for name, g in (("S", S), ("T", T)):
            img = canonical_form(sl2z_move(orbit[i], name))
            key = canonical_key(img)
            j = keys.get(key)
            if j is None:
                if len(orbit) >= cap:
                    raise OrbitCapExceeded(f"orbit larger than {cap}")
                j = len(orbit)
                keys[key] = j
                orbit.append(img)
                reps.append(g @ reps[i])
            perms[name].append(j)
        i += 1
    schreier = []
    seen = set()
    for name, g in (("S", S), ("T", T)):
        for i, j in enumerate(perms[name]):
            cand = reps[j].inverse() @ g @ reps[i]
            if cand.is_identity() or cand in seen:
                continue
            seen.add(cand)
            schreier.append(cand)
    gens = nielsen_reduce(list(schreier))
    return VeechGroup(s, orbit, reps, perms["S"], perms["T"], schreier, gens)


# --------------------------------------------------------------------------
# parabolic classes


@dataclass(frozen=True)
class ParabolicClass:
    direction: Holonomy
    n: int
    saddle_multipliers: tuple[int, ...]
    cylinders: tuple[Cylinder, ...] = field(repr=False)
    conjugator: IntMatrix
    generator: IntMatrix | None = None
    width: int | None = None
    index: int = 0
    certified: bool = True

    @property
    def k_short(self) -> int:
        return min(self.saddle_multipliers)

    @property
    def k_long(self) -> int:
        return max(self.saddle_multipliers)

    @property
    def v_short(self) -> Holonomy:
        return self.direction.scaled(self.k_short)

    @property
    def v_long(self) -> Holonomy:
        return self.direction.scaled(self.k_long)

    @property
    def rho(self) -> Fraction:
        return Fraction(self.k_long, self.k_short)

    @property
    def cylinder_areas(self) -> tuple[int, ...]:
        return tuple(c.area for c in self.cylinders)

    @property
    def multipliers(self) -> tuple[int, ...]:
        return tuple(c.circumference_multiplier for c in self.cylinders)

    @property
    def core_count(self) -> int:
        return len(self.cylinders)

    def moduli_on_horocycle(self, eps) -> tuple:
        """Cylinder moduli at any point where l(v_short)^2 = eps."""
        if isinstance(eps, float):
            k = self.k_short
            return tuple((a / self.n) * k * k / (m * m * eps) for a, m in zip(self.cylinder_areas, self.multipliers))
        eps = Fraction(eps)
        k = self.k_short
        return tuple(Fraction(a, self.n) * k * k / (m * m * eps) for a, m in zip(self.cylinder_areas, self.multipliers))

    def m_low(self, eps):
        return min(self.moduli_on_horocycle(eps))

    def m_high(self, eps):
        return max(self.moduli_on_horocycle(eps))

    def min_width_factor(self) -> Fraction:
        """min_i A_i / (n n_i): the unit-area width of the thinnest cylinder is this over l(direction)."""
        return min(Fraction(a, self.n * m) for a, m in zip(self.cylinder_areas, self.multipliers))

    def summary(self) -> dict:
        return {
            "index": self.index,
            "direction": list(self.direction),
            "v_short": list(self.v_short),
            "v_long": list(self.v_long),
            "rho": str(self.rho),
            "cylinders": [
                {"area": c.area, "multiplier": c.circumference_multiplier, "squares": sorted(x + 1 for x in c.squares)}
                for c in self.cylinders
            ],
            "core_count": self.core_count,
            "width": self.width,
            "generator": self.generator.rows() if self.generator is not None else None,
            "conjugator": self.conjugator.rows(),
            "certified": self.certified,
        }


def make_parabolic_class(s: Origami, w, conjugator=None, generator=None, width=None, index=0, certified=True):
    w = primitive_direction(w)
    ks = tuple(sorted({sc.multiplier for sc in saddle_connections_in_direction(s, w)}))
    cyls = tuple(cylinder_decomposition(s, w))
    conj = conjugator if conjugator is not None else to_e1(w)
    return ParabolicClass(w, s.n, ks, cyls, conj, generator, width, index, certified)


@dataclass(frozen=True)
class ParabolicConstants:
    rho: Fraction | None
    m_low: object
    m_high: object
    has_cusps: bool = True


NO_CUSPS = ParabolicConstants(None, None, None, False)


def parabolic_constants(classes, eps, eps0) -> ParabolicConstants:
    """(rho_Gamma, m_Gamma, m'_Gamma); ``NO_CUSPS`` when there are no classes."""
    if not 0 < eps <= eps0:
        raise ValueError("need 0 < eps <= eps0")
    if not classes:
        return NO_CUSPS
    rho = max(c.rho for c in classes)
    lo = min(c.m_low(eps) for c in classes)
    hi = max(c.m_high(eps) for c in classes)
    return ParabolicConstants(rho, lo, hi)


def require_classes(classes):
    if not classes:
        raise EmptyClassList("the group has no parabolic elements")
    return classes


# --------------------------------------------------------------------------
# finitely generated subgroups and balls


@dataclass
class FuchsianSubgroup:
    generators: tuple[tuple[str, IntMatrix], ...]
    ambient: VeechGroup | None = None
    full: bool = False

    @property
    def matrices(self) -> list[IntMatrix]:
        return [g for _, g in self.generators]

    @property
    def is_lattice(self) -> bool:
        return self.full

    def verify_in(self, veech: VeechGroup) -> "FuchsianSubgroup":
        for name, g in self.generators:
            if not veech.contains(g):
                raise NotASubgroup(f"generator {name} = {g.rows()} is not in the Veech group")
        self.ambient = veech
        return self

    @classmethod
    def from_json(cls, data, veech: VeechGroup | None = None) -> "FuchsianSubgroup":
        if isinstance(data, dict):
            data = data.get("generators", [])
        if not isinstance(data, list) or not data:
            raise ParseError("subgroup JSON must be a non-empty list of generators")
        gens = []
        for k, item in enumerate(data):
            if isinstance(item, dict):
                label = str(item.get("label", f"g{k + 1}"))
                rows = item.get("matrix")
            else:
                label, rows = f"g{k + 1}", item
            try:
                gens.append((label, IntMatrix.from_rows(rows)))
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ParseError):
                    raise
                from .errors import NonUnimodular

                if isinstance(exc, NonUnimodular):
                    raise
                raise ParseError(f"bad matrix for generator {label}: {rows!r}") from None
        sub = cls(tuple(gens))
        if veech is not None:
            sub.verify_in(veech)
        return sub

    def to_json(self) -> list:
        return [{"label": k, "matrix": g.rows()} for k, g in self.generators]


def modular_group() -> FuchsianSubgroup:
    return FuchsianSubgroup((("S", S), ("T", T)), full=True)


@dataclass(frozen=True)
class BallElement:
    element: IntMatrix
    word_length: int
    word: str


def _letters(G: FuchsianSubgroup):
    out = []
    keys = set()
    for name, g in G.generators:
        for label, m in ((name, g), (name + "^-1", g.inverse())):
            if m.is_identity() or m in keys:
                continue
            keys.add(m)
            out.append((label, m))
    return out


def group_ball(G: FuchsianSubgroup, radius: int, cap: int = 200_000) -> list[BallElement]:
    """Elements of word length at most ``radius``, each once, by BFS."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    letters = _letters(G)
    out = [BallElement(IDENTITY, 0, "")]
    seen = {IDENTITY}
    frontier = [(IDENTITY, "")]
    for r in range(1, radius + 1):
        nxt = []
        for m, word in frontier:
            for label, g in letters:
                e = m @ g
                if e in seen:
                    continue
                seen.add(e)
                w = f"{word}.{label}" if word else label
                nxt.append((e, w))
                out.append(BallElement(e, r, w))
                if len(out) > cap:
                    raise BallCapExceeded(f"ball of radius {radius} exceeds {cap} elements")
        frontier = nxt
    return out


def parabolic_fixed_direction(m: IntMatrix) -> Holonomy:
    """Primitive integer eigenvector of a parabolic matrix."""
    p, q, r, s = m.key()
    if p + s < 0:
        p, q, r, s = -p, -q, -r, -s
    a, b = (q, 1 - p) if (q, 1 - p) != (0, 0) else (s - 1, -r)
    g = math.gcd(a, b)
    return Holonomy(a // g, b // g).normalized()


def hyperbolic_fixed_points(m: IntMatrix) -> tuple[float, float]:
    """Attracting and repelling fixed points on the real line (finite ones only)."""
    p, r, s = m.p, m.r, m.s
    if r == 0:
        raise ValueError("fixed point at infinity")
    disc = math.sqrt((p + s) ** 2 - 4)
    return ((p - s + disc) / (2 * r), (p - s - disc) / (2 * r))


def subgroup_cusp_classes(s: Origami, G: FuchsianSubgroup, radius: int = 6, cap: int = 200_000):
    """Cusp representatives of a user subgroup found inside a word ball.

    Only certified up to ``radius``: two directions are identified when an
    element of the ball maps one to the other.
    """
    ball = group_ball(G, radius, cap)
    dirs: dict[Holonomy, IntMatrix] = {}
    for e in ball:
        m = e.element
        if classify_element(m) == "parabolic":
            w = parabolic_fixed_direction(m)
            if w not in dirs or m.size() < dirs[w].size():
                dirs[w] = m
    reps: list[Holonomy] = []
    for w in sorted(dirs, key=lambda u: (u.norm2(), -u.b, u.a)):
        if any(e.element.apply(w).normalized() == r for r in reps for e in ball):
            continue
        reps.append(w)
    out = []
    for k, w in enumerate(reps):
        out.append(make_parabolic_class(s, w, to_e1(w), dirs[w], None, index=k, certified=False))
    return out


def cusp_classes(s: Origami, G: FuchsianSubgroup | VeechGroup, radius: int = 6):
    if isinstance(G, VeechGroup):
        return G.cusp_classes
    if G.full and G.ambient is not None:
        return G.ambient.cusp_classes
    if G.full:
        return veech_group(s).cusp_classes
    if G.ambient is None:
        G.verify_in(veech_group(s))
    return subgroup_cusp_classes(s, G, radius)


def check_non_elementary(G: FuchsianSubgroup, radius: int = 3) -> list[IntMatrix]:
    hyps = [e.element for e in group_ball(G, radius) if classify_element(e.element) == "hyperbolic"]
    axes = set()
    for m in hyps:
        if m.r == 0:
            axes.add(("inf", m.key()))
            continue
        a, b = hyperbolic_fixed_points(m)
        axes.add((round(min(a, b), 9), round(max(a, b), 9)))
    if len(axes) < 2:
        raise ElementaryGroup("need two hyperbolic elements with different axes")
    return hyps
