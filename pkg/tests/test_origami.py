import json
from collections import Counter

import pytest
from hypothesis import given, settings

from conftest import TEST_ORIGAMIS, origamis
from teichcore.errors import Disconnected, NonPermutation, ParseError
from teichcore.origami import build_origami, parse_origami, vertex_data


def corner_classes(s):
    """Vertices by union-find on the corner gluings of the squares."""
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for i in range(s.n):
        union((i, "tr"), (s.h[i], "tl"))
        union((i, "br"), (s.h[i], "bl"))
        union((i, "tl"), (s.v[i], "bl"))
        union((i, "tr"), (s.v[i], "br"))
    groups = Counter(find((i, c)) for i in range(s.n) for c in ("bl", "br", "tl", "tr"))
    return groups


@pytest.mark.parametrize("s", TEST_ORIGAMIS, ids=str)
def test_cone_angles_match_corner_gluing(s):
    oracle = sorted(size // 4 for size in corner_classes(s).values())
    assert sorted(s.cone_angles) == oracle


@pytest.mark.parametrize("s", TEST_ORIGAMIS, ids=str)
def test_corner_vertex_agrees_with_gluing(s):
    groups = corner_classes(s)
    # two corners share a vertex in the library iff they do in the oracle
    lib = {(i, c): s.corner_vertex(i, c) for i in range(s.n) for c in ("bl", "br", "tl", "tr")}
    by_lib = {}
    for key, vtx in lib.items():
        by_lib.setdefault(vtx, set()).add(key)
    assert sorted(len(g) for g in by_lib.values()) == sorted(groups.values())
    for i in range(s.n):
        assert lib[(i, "tr")] == lib[(s.h[i], "tl")] == lib[(s.v[i], "br")]
        assert lib[(i, "br")] == lib[(s.h[i], "bl")]
        assert lib[(i, "tl")] == lib[(s.v[i], "bl")]


@given(origamis(max_n=6))
def test_gauss_bonnet(s):
    vd = vertex_data(s)
    assert sum(a - 1 for a in vd.angles) == 2 * vd.genus - 2
    assert sum(vd.angles) == s.n


def test_known_vertex_data(T1, L3):
    assert vertex_data(T1).angles == (1,) and T1.genus == 1
    vd = vertex_data(L3)
    assert vd.angles == (3,) and vd.genus == 2 and vd.stratum == (2,)


def test_marked_vertices():
    # a torus cover with no cone point keeps every vertex marked
    s = build_origami(2, [[1, 2]], [])
    assert s.cone_angles == (1, 1)
    assert s.marked == frozenset({0, 1})
    L = build_origami(3, [[1, 2]], [[1, 3]])
    assert len(L.marked) == 1


@pytest.mark.parametrize("text", ["h=(1 2) v=(1 3)", '{"n": 3, "h": [[1, 2]], "v": [[1, 3]], "label": "L"}'])
def test_parse_forms(text, L3):
    s = parse_origami(text)
    assert (s.h, s.v) == (L3.h, L3.v)


def test_json_round_trip(L3):
    s = parse_origami(json.dumps(L3.to_json()))
    assert (s.n, s.h, s.v, s.label) == (L3.n, L3.h, L3.v, L3.label)
    assert parse_origami(str(L3)).h == L3.h


@pytest.mark.parametrize(
    "text, err",
    [
        ('{"n": 2, "h": [[1, 2]', ParseError),
        ("h=(1 2", ParseError),
        ('{"n": 2, "h": [[1, 1]], "v": []}', NonPermutation),
        ('{"n": 2, "h": [[1, 3]], "v": []}', NonPermutation),
        ('{"n": 2, "h": [], "v": []}', Disconnected),
    ],
)
def test_bad_input(text, err):
    with pytest.raises(err):
        parse_origami(text)


@settings(max_examples=50)
@given(origamis())
def test_round_trip_property(s):
    t = parse_origami(json.dumps(s.to_json()))
    assert (t.h, t.v) == (s.h, s.v)
