from fractions import Fraction as F

import pytest

from ranking_axioms.axioms import Status, check_op, replay
from ranking_axioms.core import aggregate
from ranking_axioms.methods import get_method
from ranking_axioms.search import (
    CapExceeded,
    Exhaustive,
    GeneratorConfig,
    IncompatibleQuery,
    enumerate_small,
    enumeration_size,
    falsify,
    gen_random,
    iim_edits,
    op_split,
    queries,
)


def test_round_robin_schedule_gives_everyone_every_round():
    t = gen_random(GeneratorConfig(4, 2, seed=7, schedule="round-robin-rounds"))
    assert t.match_counts() == (2, 2, 2, 2)
    for p in (1, 2):
        assert sorted(x for m in t.round_matches(p) for x in (m.i, m.j)) == [0, 1, 2, 3]


def test_generation_is_seeded():
    cfg = GeneratorConfig(5, 3, seed=99)
    assert gen_random(cfg) == gen_random(cfg)
    assert gen_random(cfg) != gen_random(GeneratorConfig(5, 3, seed=100))
    assert all(m.value in (0, F(1, 2), 1) for m in gen_random(cfg).matches)


@pytest.mark.parametrize("kwargs", [
    dict(n=3, schedule="round-robin-rounds"),
    dict(n=4, alphabet=()),
    dict(n=4, alphabet=(F(3, 2),)),
    dict(n=4, schedule="swiss"),
    dict(n=0),
])
def test_generator_config_validation(kwargs):
    with pytest.raises(ValueError):
        GeneratorConfig(**kwargs)


def test_enumeration_counts():
    assert len(list(enumerate_small(2, 1))) == 4
    assert len(list(enumerate_small(1, 1))) == 1
    three = list(enumerate_small(3, 1))
    assert len(three) == 64 == len(set(three))
    assert enumeration_size(4, 2, (0, F(1, 2), 1)) == 4 ** 12


def test_enumeration_cap():
    with pytest.raises(CapExceeded) as err:
        enumerate_small(5, 2)
    assert err.value.needed == 4 ** 20
    assert next(iter(enumerate_small(5, 2, cap=None))).matches == ()


def test_op_split(ex):
    a, b = op_split(ex["4.1c"])
    assert aggregate(a) == aggregate(ex["4.1a"]) and aggregate(b) == aggregate(ex["4.1b"])
    with pytest.raises(IncompatibleQuery):
        op_split(ex["3.1"].restrict_rounds([1]))


def test_iim_edits_touch_one_slot(ex):
    edits = list(iim_edits(ex["4.2"], (0, F(1, 2), 1)))
    # six slots, each with three alternatives out of four single-match states
    assert len(edits) == 18


def test_falsify_score_sc_finds_witness():
    r = falsify("score", "SC", Exhaustive(4, 2))
    assert r.outcome == "witness-found"
    assert replay(r.witness).status is Status.FAIL
    assert r.lines(timing=False)[-1] == "tested=82 elapsed_ms=- outcome=witness-found"


def test_falsify_score_sop_small_corpora_exhausted():
    for n in (1, 2, 3):
        r = falsify("score", "SOP", Exhaustive(n, 2))
        assert r.outcome == "corpus-exhausted" and r.witness is None
        assert r.instances_tested == 4 ** (n * (n - 1))


def test_least_squares_op_on_fixture_pair(ex):
    v = check_op("least-squares", ex["4.1a"], ex["4.1b"])
    assert v.witness["pair"] == ("X1", "X2")


def test_falsify_is_deterministic():
    cfg = GeneratorConfig(4, 2, seed=3)
    a = falsify("prev-player", "NEU", cfg, 200)
    b = falsify("prev-player", "NEU", cfg, 200)
    assert a.lines(timing=False) == b.lines(timing=False)
    assert a.witness == b.witness and a.outcome == "witness-found"


def test_falsify_budget_and_counts():
    r = falsify("score", "INV", GeneratorConfig(4, 1, seed=1), 25)
    assert (r.instances_tested, r.outcome) == (25, "corpus-exhausted")
    r = falsify("index", "SYM", Exhaustive(3, 1), exhaust_all=True)
    assert r.instances_tested == 64 and r.violations == 2 ** 3
    with pytest.raises(ValueError):
        falsify("score", "INV", GeneratorConfig(4, 1))


def test_falsify_rejects_incompatible_queries():
    with pytest.raises(IncompatibleQuery):
        falsify("score", "ANO", Exhaustive(3, 2))
    with pytest.raises(IncompatibleQuery):
        falsify("score", "IIM", Exhaustive(3, 1))
    with pytest.raises(IncompatibleQuery):
        falsify("score", "OP", Exhaustive(3, 1))


def test_queries_cover_every_generator(ex):
    assert len(list(queries(get_method("score"), "NEU", ex["4.2"]))) == 7
    assert len(list(queries(get_method("round-sum"), "ANO", ex["3.1"]))) == 1


def test_witnesses_replay_for_separating_methods():
    for method, axiom in [("prev-player", "NEU"), ("max-other-matches", "SYM"),
                          ("least-squares", "IIM"), ("eigenvector", "INV")]:
        r = falsify(method, axiom, Exhaustive(4, 1))
        assert r.outcome == "witness-found", (method, axiom)
        assert replay(r.witness).failed
