import itertools
import random

import pytest
from hypothesis import strategies as st

from teichcore.errors import Disconnected
from teichcore.origami import Origami, l_origami, torus


def connected(n, h, v):
    try:
        return Origami(n, h, v)
    except Disconnected:
        return None


def small_origamis(max_n=3):
    out = []
    for n in range(1, max_n + 1):
        for h in itertools.permutations(range(n)):
            for v in itertools.permutations(range(n)):
                s = connected(n, h, v)
                if s is not None:
                    out.append(s)
    return out


def random_origamis(count, n_range=(4, 6), seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(*n_range)
        h = list(range(n))
        v = list(range(n))
        rng.shuffle(h)
        rng.shuffle(v)
        s = connected(n, tuple(h), tuple(v))
        if s is not None:
            out.append(s)
    return out


# every origami with up to three squares plus a seeded handful up to six
TEST_ORIGAMIS = small_origamis(3) + random_origamis(12)


@st.composite
def origamis(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    h = draw(st.permutations(range(n)))
    v = draw(st.permutations(range(n)))
    s = connected(n, tuple(h), tuple(v))
    if s is None:
        # glue square i to i+1 on the right to force connectivity
        h = tuple(list(range(1, n)) + [0])
        s = Origami(n, h, tuple(v))
    return s


@pytest.fixture(scope="session")
def T1():
    return torus()


@pytest.fixture(scope="session")
def L3():
    return l_origami()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
