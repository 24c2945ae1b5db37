"""Acceptance suite: one test per criterion, AC1 to AC8.

Exact methods are compared with exact rational equality.  The only float
method (eigenvector) compares scores with the pinned tolerance below.
"""

import random
from fractions import Fraction as F

from ranking_axioms import fixtures
from ranking_axioms.axioms import (
    Status,
    check,
    check_ano,
    check_inv,
    check_neu,
    check_op,
    check_sc,
    player_generators,
    replay,
    round_generators,
    sc_certificate_for,
    sc_dominance,
    sc_dominance_bruteforce,
    verify_certificate,
)
from ranking_axioms.core import aggregate
from ranking_axioms.corpus import BATCH_SCORERS, Sweeper, table
from ranking_axioms.methods import EIGEN_TOLERANCE, REGISTRY, ScoreVector
from ranking_axioms.search import Exhaustive, falsify

from .conftest import bounded_instances

PINNED_EIGEN_TOLERANCE = 1e-9
EXHAUSTIVE_N = range(1, 5)
EXHAUSTIVE_ROUNDS = 2


def _sweep_violations(method, axiom):
    """Violations over every aggregate of tournaments with n <= 4 players and at most two rounds."""
    total, witness = 0, None
    for n in EXHAUSTIVE_N:
        res = Sweeper(table(n, EXHAUSTIVE_ROUNDS), method).run(axiom)
        total += res.violations
        witness = witness or res.first
    return total, witness


def test_ac1_exact_scores_on_full_season(ex):
    p = aggregate(ex["4.1c"])
    assert REGISTRY["score"](p).values == (-1, -1, 2, 0)
    q = REGISTRY["least-squares"](p).values
    assert q == (F(-5, 24), F(-1, 8), F(3, 8), F(-1, 24))
    residual = [sum(p.M[i][j] * (q[i] - q[j]) for j in range(4)) - p.row_sums()[i] for i in range(4)]
    assert residual == [0, 0, 0, 0]
    assert sum(q) == 0


def test_ac2_self_consistency_and_order_preservation_clash(ex):
    a, b, c = ex["4.1a"], ex["4.1b"], ex["4.1c"]
    for mode in (True, False):
        assert check_sc("least-squares", c, mode).status is Status.PASS
    op = check_op("least-squares", a, b)
    assert op.status is Status.FAIL and op.witness["pair"] == ("X1", "X2")

    assert check_op("score", a, b).status is Status.PASS
    sc = check_sc("score", c, respect_rounds=True)
    assert sc.status is Status.FAIL and sc.witness["pair"] == ("X2", "X1")
    cert = sc_certificate_for(sc, "score")
    assert cert.strength == "strict"
    assert cert.render(c.players) == "strict[1:X1>X2+X3>X4/2:X3>X3+X4>X4]!1:X3>X4"
    group, edge = cert.strict_witness
    assert (group, c.players[edge.k], c.players[edge.l]) == (1, "X3", "X4")
    assert verify_certificate(cert, c, REGISTRY["score"](c))


def test_ac3_round_sum_is_anonymous_and_neutral_but_not_self_consistent(ex):
    t = ex["3.1"]
    g = REGISTRY["round-sum"](t)
    assert g[1] == g[2] == 0
    sc = check_sc("round-sum", t)
    assert sc.status is Status.FAIL and sc.witness["pair"] == ("X2", "X3")
    for sigma in round_generators(t.rounds):
        assert check_ano("round-sum", t, sigma).status is Status.PASS
    for sigma in player_generators(t.n):
        assert check_neu("round-sum", t, sigma).status is Status.PASS


def test_ac4_index_is_self_consistent_but_not_neutral_or_symmetric(ex):
    rows = [r for r in fixtures.verdict_table() if r.method == "index" and r.example == "4.2"]
    assert {r.axiom: r.expected for r in rows} == {"SC": Status.PASS, "NEU": Status.FAIL, "SYM": Status.FAIL}
    for row in rows:
        v = fixtures.replay_row(row)
        assert fixtures.row_matches(row, v), v.record()
    neu = check("NEU", "index", ex["4.2"], sigma=fixtures.END_SWAP)
    assert neu.witness == {"player": "X1", "image": "X4", "before": 3, "after": 0}
    assert check("SYM", "index", ex["4.2"]).witness == {"pair": ("X1", "X2"), "scores": (3, 2)}


def test_ac5_independence_matrix_on_exhaustive_corpus():
    corpus = Exhaustive(4, EXHAUSTIVE_ROUNDS)
    violated = {"prev-player": "NEU", "max-other-matches": "SYM", "opp-aggregate": "SOP"}
    claimed = {"prev-player": ("SYM", "SOP"), "max-other-matches": ("NEU", "SOP"),
               "opp-aggregate": ("NEU", "SYM")}
    for method, axiom in violated.items():
        for ax in (axiom, "IIM"):
            r = falsify(method, ax, corpus)
            assert r.outcome == "witness-found", (method, ax)
            assert replay(r.witness).failed
    unexpected = []
    for method, axioms in claimed.items():
        for axiom in axioms:
            count, witness = _sweep_violations(method, axiom)
            if count:
                unexpected.append(f"{method} {axiom}: {count} violations, e.g. "
                                  f"{witness.record(with_instances=True)}")
    assert not unexpected, "claimed axioms violated:\n" + "\n".join(unexpected)


def test_ac6_matcher_agrees_with_bruteforce():
    rng = random.Random(6)
    disagreements = 0
    instances = bounded_instances(seed=6, count=1000, max_n=5, max_size=5)
    for t in instances:
        s = ScoreVector(tuple(F(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(t.n)))
        for i in range(t.n):
            for j in range(t.n):
                if i == j:
                    continue
                for mode in (True, False):
                    fast = sc_dominance(t, s, i, j, mode)
                    slow = sc_dominance_bruteforce(t, s, i, j, mode)
                    ok = (fast.strength == slow.strength
                          and verify_certificate(fast, t, s, mode)
                          and verify_certificate(slow, t, s, mode))
                    disagreements += not ok
    assert len(instances) == 1000 and disagreements == 0


def test_ac7_failure_implications_hold_everywhere(ex):
    assert check("SYM", "index", ex["4.2"]).failed and check_inv("index", ex["4.2"]).failed
    exceptions = {}
    for method in BATCH_SCORERS:
        for n in EXHAUSTIVE_N:
            out = Sweeper(table(n, EXHAUSTIVE_ROUNDS), method).implication_checks(replay=20)
            for key in ("sym->inv", "op->sop", "inv-strict"):
                if out[key]:
                    exceptions[(method, n, key)] = out[key]
    assert exceptions == {}


def test_ac8_no_method_escapes_the_impossibilities(ex):
    assert EIGEN_TOLERANCE == PINNED_EIGEN_TOLERANCE
    for name in REGISTRY:
        sc = check_sc(name, ex["4.1c"])
        op = check_op(name, ex["4.1a"], ex["4.1b"])
        assert Status.FAIL in (sc.status, op.status), name

    instances = [fixtures.example(id).tournament for id in fixtures.EXAMPLE_IDS]
    broken = {}
    for name in REGISTRY:
        for axiom in ("SC", "NEU", "SYM"):
            if any(check(axiom, name, t).failed for t in instances):
                broken[name] = axiom
                break
        if name not in broken and check_op(name, ex["4.1a"], ex["4.1b"], strong=True).failed:
            broken[name] = "SOP"
        if name not in broken and name in BATCH_SCORERS:
            for axiom in ("NEU", "SYM", "SOP"):
                if _sweep_violations(name, axiom)[0]:
                    broken[name] = axiom
                    break
    assert set(broken) == set(REGISTRY), sorted(set(REGISTRY) - set(broken))
