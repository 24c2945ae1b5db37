import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import strategies as st

from ranking_axioms import fixtures
from ranking_axioms.core import MatchRecord, Tournament

WDL = (Fraction(0), Fraction(1, 2), Fraction(1))


@st.composite
def tournaments(draw, min_n=1, max_n=5, max_rounds=3, values=WDL):
    n = draw(st.integers(min_n, max_n))
    rounds = draw(st.integers(1, max_rounds))
    matches = []
    for p in range(1, rounds + 1):
        for i, j in combinations(range(n), 2):
            v = draw(st.none() | st.sampled_from(values))
            if v is not None:
                matches.append(MatchRecord.make(p, i, j, v))
    return Tournament(tuple(f"X{k + 1}" for k in range(n)), tuple(matches), rounds)


@pytest.fixture(scope="session")
def ex():
    return {id: fixtures.example(id).tournament for id in fixtures.EXAMPLE_IDS}


def bounded_instances(seed, count, max_n=5, max_size=5):
    """Seeded random tournaments whose pooled opponent multisets stay within ``max_size``."""
    from ranking_axioms.search import GeneratorConfig, gen_random

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        cfg = GeneratorConfig(rng.randint(2, max_n), rng.randint(1, 3), seed=rng.getrandbits(64))
        t = gen_random(cfg)
        if max(t.match_counts()) <= max_size:
            out.append(t)
    return out
