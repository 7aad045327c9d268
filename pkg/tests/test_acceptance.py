"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (printed in the terminal summary, or
directly when the file is run as a script) before asserting.
"""
import math
import random
import time
from fractions import Fraction

import pytest

from teichcore.coarse import (
    chart_twisting,
    choose_epsilon,
    compute_W,
    horo_overlap_report,
    make_family,
    pvt_spectrum,
    sample_thick_pairs,
    systole_qi_experiment,
    twisting_interval,
    undistortion_experiment,
    _family_discs,
)
from teichcore.disc import (
    electrified_distance,
    horoball_gap,
    horodisc_of,
    hyp_distance,
    numeric_horoball_gap,
    truncated_distance,
)
from teichcore.errors import PointInsideHoroball
from teichcore.flat import cylinder_decomposition
from teichcore.origami import l_origami, torus, vertex_data
from teichcore.vectors import Holonomy, IntMatrix, S, T
from teichcore.veech import veech_group

RESULTS: dict[int, str] = {}


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


@pytest.fixture(scope="module")
def groups():
    out = {}
    for name, s in (("torus", torus()), ("L", l_origami())):
        v = veech_group(s)
        out[name] = (s, v, make_family(s, v))
    return out


def random_direction(rng, r=12):
    while True:
        a, b = rng.randint(-r, r), rng.randint(0, r)
        if math.gcd(a, b) == 1 and (b > 0 or a == 1):
            return Holonomy(a, b)


def test_01_wedge_distance(groups):
    t0 = time.perf_counter()
    rng = random.Random(1)
    worst, count = 0.0, 0
    for name in ("torus", "L"):
        _, _, fam = groups[name]
        done = 0
        while done < 60:
            u, v = fam.disc(random_direction(rng)), fam.disc(random_direction(rng))
            if u.holonomy.wedge(v.holonomy) == 0:
                continue
            g = horoball_gap(u, v)
            worst = max(worst, abs(g - numeric_horoball_gap(u, v)))
            done += 1
        count += done
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and count >= 100 and elapsed < 5
    assert record(1, ok, f"{count} pairs, max |formula - numeric| = {worst:.2e}, {elapsed:.2f}s")


def test_02_horodisc_separation(groups):
    lines, ok = [], True
    for name in ("torus", "L"):
        s, v, _ = groups[name]
        e = choose_epsilon(s, v)
        fam = make_family(s, v, eps=e.eps)
        discs = _family_discs(fam, e.radius, e.eps)
        gmin, pair = min(((horoball_gap(a, b), (a, b)) for i, a in enumerate(discs) for b in discs[i + 1:]), key=lambda t: t[0])
        # recheck the tightest pair by root finding
        numeric = numeric_horoball_gap(*pair)
        ok &= gmin >= 1 - 1e-9 and e.min_gap >= 1 - 1e-9 and numeric >= 1 - 1e-9
        lines.append(f"{name}: eps={e.eps:.6f} min gap {gmin:.12f} (numeric {numeric:.12f}) over {e.pairs_checked} pairs")
    assert record(2, ok, "; ".join(lines))


def test_03_overlap_bound(groups):
    ok, lines = True, []
    for name in ("torus", "L"):
        fam = groups[name][2]
        r12 = horo_overlap_report(fam, 12)
        r14 = horo_overlap_report(fam, 14)
        finite = all(math.isfinite(d) for d in r14.diameters)
        # the radius-12 constant must still bound every radius-14 pair
        ok &= finite and max(r14.diameters) <= r12.R + 1e-6 and abs(r14.R - r12.R) <= 1e-6
        ok &= r12.R <= r12.theoretical_bound + 1e-12
        lines.append(f"{name}: R={r12.R:.9f} -> {r14.R:.9f} (bound {r12.theoretical_bound:.4f})")
    assert record(3, ok, "; ".join(lines))


def test_04_pvt_discreteness(groups):
    s, v, _ = groups["torus"]
    tor = pvt_spectrum(s, v, 10)
    ok_t = tor.values == [Fraction(k) for k in range(11)]
    s, v, _ = groups["L"]
    lo = pvt_spectrum(s, v, 5, seed=12345)
    # independent invariance check with a fixed random chart
    rng = random.Random(9)
    m = IntMatrix(1, 0, 0, 1)
    for _ in range(10):
        m = m @ rng.choice([S, T, T.inverse()])
    moved = sorted({Fraction(abs(m.apply(a).wedge(m.apply(b))), s.n) for a, b in lo.witnesses.values()})
    ok_l = lo.min_positive_gap >= Fraction(1, 3) and lo.invariant and moved == lo.values
    assert record(4, ok_t and ok_l, f"torus {len(tor.values)} values exact={ok_t}; L gap={lo.min_positive_gap} invariant={lo.invariant and moved == lo.values}")


def test_05_twisting_vs_winding(groups):
    rng = random.Random(5)
    bad, total = 0, 0
    for k in range(50):
        s, v, fam = groups["torus" if k % 2 else "L"]
        cls = fam.classes[rng.randrange(len(fam.classes))]
        d = horodisc_of(cls, fam.eps)
        sw, t0 = rng.uniform(0, 20), rng.uniform(-3, 3)
        x, y = d.unnormalize(complex(t0, 1)), d.unnormalize(complex(t0 + sw, 1))
        lo, hi = twisting_interval(cls, x, y, fam)
        for cyl in cls.cylinders:
            tw = chart_twisting(cyl, s.n, x, y, rng.random(), rng.random())
            total += 1
            bad += not lo <= tw <= hi
    assert record(5, bad == 0, f"{total} cylinder counts on 50 horocycle pairs, {bad} outside the interval")


def test_06_metric_ordering(groups):
    rng = random.Random(6)
    bad, shared, done = 0, 0, 0
    worst = 0.0
    names = ["torus", "L"]
    while done < 200:
        _, _, fam = groups[names[done % 2]]
        x = complex(rng.uniform(-3, 3), math.exp(rng.uniform(math.log(0.05), math.log(20))))
        y = complex(rng.uniform(-3, 3), math.exp(rng.uniform(math.log(0.05), math.log(20))))
        try:
            tr = truncated_distance(x, y, fam).distance
        except PointInsideHoroball:
            tr = None
        el = electrified_distance(x, y, fam).distance
        hy = hyp_distance(x, y)
        if el > hy + 1e-9 or (tr is not None and hy > tr + 1e-9):
            bad += 1
        common = [d for d in fam.electric_nodes if d.contains(x) and d.contains(y)]
        if common:
            shared += 1
            worst = max(worst, el)
            bad += el > 1 + 1e-9
        done += 1
    # pairs forced into one horodisc
    for name in names:
        _, _, fam = groups[name]
        for d in fam.electric_nodes[:20]:
            x, y = d.unnormalize(complex(rng.uniform(-5, 5), rng.uniform(1, 50))), d.unnormalize(complex(rng.uniform(-50, 50), rng.uniform(1, 50)))
            el = electrified_distance(x, y, fam).distance
            shared += 1
            worst = max(worst, el)
            bad += el > 1 + 1e-9
    assert record(6, bad == 0, f"200 random pairs + forced pairs, {shared} sharing a horodisc (max d_el {worst:.6f}), {bad} violations")


def test_07_gauss_bonnet_and_areas():
    from conftest import TEST_ORIGAMIS

    rng = random.Random(7)
    bad = 0
    for s in TEST_ORIGAMIS:
        vd = vertex_data(s)
        bad += sum(a - 1 for a in vd.angles) != 2 * vd.genus - 2
        for _ in range(20):
            w = random_direction(rng, 9)
            bad += sum(c.area for c in cylinder_decomposition(s, w)) != s.n
    assert record(7, bad == 0, f"{len(TEST_ORIGAMIS)} origamis x 20 directions, {bad} failures")


def test_08_W_desk_value(groups):
    s, v, fam = groups["torus"]
    t0 = time.perf_counter()
    w = compute_W(s, v, fam, 0.02)
    elapsed = time.perf_counter() - t0
    target = 0.75 ** 0.25
    ok = abs(w.value - target) <= 0.005 and elapsed < 10
    assert record(8, ok, f"W = {w.value:.6f} (target {target:.5f}) at {w.argmin:.4f}, {elapsed:.2f}s")


def test_09_undistortion(groups):
    t0 = time.perf_counter()
    ok, lines = True, []
    for name in ("torus", "L"):
        s, v, fam = groups[name]
        r4 = undistortion_experiment(s, v, fam, 4)
        r6 = undistortion_experiment(s, v, fam, 6)
        change = abs(r6.K - r4.K) / r4.K
        good = r6.certified() and r4.certified() and change < 0.10 and r6.extra["upper_bound_violations"] == 0
        ok &= good
        lines.append(f"{name}: K4={r4.K:.4f} K6={r6.K:.4f} change {100 * change:.1f}%")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    assert record(9, ok, "; ".join(lines) + f", {elapsed:.1f}s")


def test_10_systole_qi(groups):
    s, v, fam = groups["torus"]
    pairs = sample_thick_pairs(fam, 50, seed=0)
    r = systole_qi_experiment(s, v, fam, pairs)
    rho = r.extra["spearman"]
    one_sided = all(b <= r.K * a + r.K + 1e-9 for a, b, _ in r.samples)
    ok = rho >= 0.8 and one_sided
    assert record(10, ok, f"50 thick pairs, Spearman {rho:.3f}, upper K {r.K:.4f}, one-sided bound holds={one_sided}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
