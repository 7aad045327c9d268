import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from teichcore.chart import DiscPoint
from teichcore.coarse import (
    QIReport,
    certifies,
    choose_epsilon,
    compute_W,
    fundamental_grid,
    cutoff,
    distance_formula_rhs,
    fit_qi_constant,
    fit_upper_constant,
    hempel_details,
    hempel_estimate,
    horo_overlap_report,
    make_family,
    pvt_spectrum,
    sample_thick_pairs,
    systole_qi_experiment,
    twisting_interval,
    undistortion_experiment,
    width_at,
)
from teichcore.errors import BasepointInHoroball, EmptyGrid
from teichcore.origami import l_origami, torus
from teichcore.vectors import IntMatrix
from teichcore.veech import veech_group


@pytest.fixture(scope="module")
def T():
    s = torus()
    v = veech_group(s)
    return s, v, make_family(s, v)


@pytest.fixture(scope="module")
def L():
    s = l_origami()
    v = veech_group(s)
    return s, v, make_family(s, v)


@pytest.mark.parametrize("t, c, want", [(5, 3, 5), (2, 3, 0), (3, 3, 3)])
def test_cutoff(t, c, want):
    assert cutoff(t, c) == want


@given(st.floats(-100, 100), st.floats(0, 50))
def test_cutoff_idempotent(t, c):
    assert cutoff(cutoff(t, c), c) == cutoff(t, c)


def test_cutoff_rejects_negative_threshold():
    with pytest.raises(ValueError):
        cutoff(1, -1)


# --- quasi-isometry fitting


@settings(max_examples=60)
@given(st.lists(st.tuples(st.floats(0, 50), st.floats(0, 50)), min_size=1, max_size=30))
def test_fitted_k_certifies_and_is_minimal(pairs):
    samples = [(a, b, "") for a, b in pairs]
    k = fit_qi_constant(samples)
    assert certifies(samples, k)
    if k > 1 + 1e-9:
        assert not certifies(samples, k * (1 - 1e-6))


@settings(max_examples=40)
@given(st.lists(st.tuples(st.floats(0, 50), st.floats(0, 50)), min_size=2, max_size=30))
def test_fitted_k_monotone_under_removal(pairs):
    samples = [(a, b, "") for a, b in pairs]
    assert fit_qi_constant(samples[1:]) <= fit_qi_constant(samples)
    assert fit_upper_constant(samples[1:]) <= fit_upper_constant(samples)


def test_qi_report_json():
    r = QIReport([(0, 0, "e"), (1, 2.5, "g")], fit_qi_constant([(0, 0), (1, 2.5)]))
    j = r.to_json()
    assert j["certifies_all_samples"] and j["K"] == r.K


# --- Hempel


def test_hempel_identical_points(L):
    s = L[0]
    x = DiscPoint(0.2, 0.9, s)
    assert hempel_estimate(x, x) <= 3


def test_hempel_unit_intersection(T):
    s = T[0]
    assert hempel_estimate(DiscPoint(0, 3, s), DiscPoint(0, 1 / 3, s)) == 2


@pytest.mark.parametrize("p, q", [(2, 3), (1, 5), (3, 7), (-4, 9)])
def test_hempel_torus_oracle(T, p, q):
    # the systole at 3i is (1, 0); move it to (p, q) with an integer matrix
    s = T[0]
    g = math.gcd(p, q)
    assert g == 1
    x0, y0 = _bezout(p, q)
    m = IntMatrix(p, -y0, q, x0)  # columns (p, q) and (-y0, x0), det 1
    z = complex(0, 3)
    w = (m.p * z + m.q) / (m.r * z + m.s)
    x, y = DiscPoint(0, 3, s), DiscPoint(w.real, w.imag, s)
    det = hempel_details(x, y)
    assert math.isclose(det.direct, 2 * math.log(abs(q)) + 2)
    assert det.value <= det.direct


def _bezout(p, q):
    # x p + y q = 1
    old_r, r = p, q
    old_s, s_ = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s_ = s_, old_s - k * s_
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def test_hempel_symmetric(L):
    s = L[0]
    x, y = DiscPoint(-1.2, 0.4, s), DiscPoint(0.9, 1.3, s)
    assert hempel_estimate(x, y) == hempel_estimate(y, x)


# --- twisting


def test_twisting_examples(T):
    s, v, fam = T
    cls = fam.classes[0]
    eps_fam = make_family(s, v, eps0=1.0, eps=1.0)
    # s = 5 along the horocycle of height 1
    assert twisting_interval(cls, complex(0, 1), complex(5, 1), eps_fam) == pytest.approx((3, 7))
    assert twisting_interval(cls, complex(0, 1), complex(0, 4), eps_fam) == pytest.approx((-2, 2))


@given(st.floats(0, 20), st.floats(0, 20))
def test_twisting_interval_monotone(s1, s2):
    s = torus()
    fam = make_family(s, veech_group(s))
    cls = fam.classes[0]
    h = 1 / fam.eps
    a = twisting_interval(cls, complex(0, h), complex(min(s1, s2) * h, h), fam)
    b = twisting_interval(cls, complex(0, h), complex(max(s1, s2) * h, h), fam)
    assert b[0] >= a[0] - 1e-12 and b[1] >= a[1] - 1e-12


# --- spectra and constants


def test_pvt_torus(T):
    s, v, _ = T
    r = pvt_spectrum(s, v, 3.5)
    assert r.values == [0, 1, 2, 3] and r.min_positive_gap == 1 and r.invariant


def test_pvt_l_origami(L):
    s, v, _ = L
    r = pvt_spectrum(s, v, 5)
    assert all((3 * x).denominator == 1 for x in r.values)
    assert r.min_positive_gap >= Fraction(1, 3)


def test_pvt_against_brute_force_wedges(L):
    # wedges of every pair of parabolic saddle connections up to a length bound
    from teichcore.flat import enumerate_saddle_connections

    s, v, _ = L
    vals = set()
    scs = [sc.holonomy for sc in enumerate_saddle_connections(s, 6)]
    for i, u in enumerate(scs):
        for w in scs[i:]:
            x = Fraction(abs(u.wedge(w)), s.n)
            if x <= 2:
                vals.add(x)
    spec = set(pvt_spectrum(s, v, 2).values)
    assert vals <= spec
    assert spec == vals


def test_choose_epsilon_examples(T):
    s, v, _ = T
    assert choose_epsilon(s, v, eps0=0.5).eps == 0.5
    e = choose_epsilon(s, v, eps0=1.0)
    assert math.isclose(e.eps, math.exp(-0.5))
    assert e.min_gap >= 1 - 1e-9


def test_overlap_report(L):
    r = horo_overlap_report(L[2], 10)
    assert max(r.diameters) <= r.R
    assert r.R <= r.theoretical_bound + 1e-12


def test_width_at_i(T):
    assert math.isclose(width_at(1j, T[2]), 1.0)


def test_W_grid_monotone(T):
    s, v, fam = T
    base = fundamental_grid(v, 0.1)
    coarse = compute_W(s, v, fam, base)
    fine = compute_W(s, v, fam, base + fundamental_grid(v, 0.03))
    assert fine.value <= coarse.value
    with pytest.raises(EmptyGrid):
        compute_W(s, v, fam, [])


# --- distance formula


def test_rhs_identical_points(L):
    s, _, fam = L
    x = DiscPoint(0.1, 1.0, s)
    val, _ = distance_formula_rhs(x, x, fam)
    assert val <= 3


def test_rhs_vertical_geodesic(T):
    s, _, fam = T
    val, terms = distance_formula_rhs(DiscPoint(0.2, 1.5, s), DiscPoint(0.2, 40, s), fam)
    assert [t["term"] for t in terms] == ["hempel"]


def test_rhs_straddling_infinity(T):
    s, _, fam = T
    h = 1 / fam.eps
    x, y = DiscPoint(0, h, s), DiscPoint(10 * h, h, s)
    val, terms = distance_formula_rhs(x, y, fam)
    hem = hempel_estimate(x, y)
    assert math.isclose(val, hem + 10)


@settings(max_examples=15, deadline=None)
@given(st.floats(-2, 2), st.floats(0.3, 1.8), st.floats(-2, 2), st.floats(0.3, 1.8))
def test_rhs_symmetric_and_nonnegative(x1, y1, x2, y2):
    s = torus()
    fam = make_family(s, veech_group(s))
    a, b = DiscPoint(x1, y1, s), DiscPoint(x2, y2, s)
    v1, _ = distance_formula_rhs(a, b, fam)
    v2, _ = distance_formula_rhs(b, a, fam)
    assert v1 >= 0 and v1 == v2


def test_rhs_rejects_small_c(T):
    s, _, fam = T
    with pytest.raises(ValueError):
        distance_formula_rhs(DiscPoint(0, 1, s), DiscPoint(1, 1, s), fam, c=1)


# --- experiments


def test_undistortion_radius_zero(T):
    s, v, fam = T
    r = undistortion_experiment(s, v, fam, 0)
    assert [(a, b) for a, b, _ in r.samples] == [(0, 0.0)] and r.K == 1


def test_undistortion_upper_bound(L):
    s, v, fam = L
    r = undistortion_experiment(s, v, fam, 4)
    disp = r.extra["max_generator_displacement"]
    for a, b, _ in r.samples:
        assert b <= disp * a + 1e-9
    assert r.certified()


def test_undistortion_basepoint_check(T):
    s, v, fam = T
    with pytest.raises(BasepointInHoroball):
        undistortion_experiment(s, v, fam, 2, 5j)


def test_systole_experiment_same_points(T):
    s, v, fam = T
    r = systole_qi_experiment(s, v, fam, [(0.1 + 1.2j, 0.1 + 1.2j)])
    (a, b, _), = r.samples
    assert a == 0 and b <= 3


def test_systole_experiment_inside_one_disc(T):
    s, v, fam = T
    r = systole_qi_experiment(s, v, fam, [(3j, 7 + 50j)])
    (a, b, _), = r.samples
    assert a <= 1 and b <= 3


def test_thick_pairs_seeded(T):
    fam = T[2]
    assert sample_thick_pairs(fam, 5, seed=3) == sample_thick_pairs(fam, 5, seed=3)
