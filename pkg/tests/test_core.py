from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ranking_axioms.core import (
    FormatError,
    MatchRecord,
    RankingProblem,
    Tournament,
    aggregate,
    format_tournament,
    from_inline,
    lift,
    negate,
    opponent_multiset,
    parse_tournament,
    permute_players,
    permute_problem,
    permute_rounds,
    sum_problems,
    to_inline,
    zero_problem,
)

from .conftest import tournaments

HEADER = "players: X1 X2 X3\n"


def test_match_record_normalises_orientation():
    m = MatchRecord.make(2, 3, 1, F(1, 4))
    assert m == MatchRecord(2, 1, 3, F(3, 4))
    assert m.value_for(3) == F(1, 4)
    assert m.opponent_of(1) == 3


@pytest.mark.parametrize("args", [(1, 0, 0, 1), (0, 0, 1, 1), (1, 0, 1, F(3, 2)), (1, 0, 1, -1)])
def test_match_record_rejects(args):
    with pytest.raises(ValueError):
        MatchRecord.make(*args)


def test_parse_example_with_rounds(ex):
    t = ex["3.1"]
    assert t.players == ("X1", "X2", "X3", "X4")
    assert t.rounds == 2
    assert t.matches == (
        MatchRecord(1, 0, 3, F(1)),
        MatchRecord(2, 0, 1, F(1, 2)),
        MatchRecord(2, 2, 3, F(1, 2)),
    )


def test_parse_reversed_pair_flips_value():
    t = parse_tournament(HEADER + "match: 1 X3 X1 1\n")
    assert t.matches == (MatchRecord(1, 0, 2, F(0)),)


def test_rounds_default_to_largest_label():
    t = parse_tournament(HEADER + "# comment\n\nmatch: 3 X1 X2 1/2\n")
    assert t.rounds == 3
    assert parse_tournament(HEADER).rounds == 1


@pytest.mark.parametrize(
    "text, line",
    [
        ("match: 1 X1 X2 1\n", 1),
        ("players:\n", 1),
        ("players: A A\n", 1),
        (HEADER + "match: 1 X1 X9 1\n", 2),
        (HEADER + "match: 1 X1 X1 1\n", 2),
        (HEADER + "match: 1 X1 X2 1\nmatch: 1 X2 X1 0\n", 3),
        (HEADER + "match: 1 X1 X2 2/4\n", 2),
        (HEADER + "match: 1 X1 X2 3/2\n", 2),
        (HEADER + "match: 1 X1 X2 0.5\n", 2),
        (HEADER + "match: 0 X1 X2 1\n", 2),
        (HEADER + "match: 1 X1 X2\n", 2),
        (HEADER + "rounds: 1\nmatch: 2 X1 X2 1\n", 3),
        (HEADER + "match: 1 X1 X2 1\nrounds: 2\n", 3),
        (HEADER + "score: 3\n", 2),
        (HEADER + "no colon here\n", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(FormatError) as err:
        parse_tournament(text)
    assert err.value.line == line


def test_missing_roster():
    with pytest.raises(FormatError):
        parse_tournament("# nothing\n")


@given(tournaments())
def test_text_and_inline_round_trip(t):
    assert parse_tournament(format_tournament(t)) == t
    assert from_inline(to_inline(t)) == t


def test_aggregate_halves_sum_to_whole(ex):
    assert sum_problems(aggregate(ex["4.1a"]), aggregate(ex["4.1b"])) == aggregate(ex["4.1c"])


def test_aggregate_of_full_season(ex):
    p = aggregate(ex["4.1c"])
    assert p.row_sums() == (-1, -1, 2, 0)
    assert p.match_counts() == (4, 4, 4, 4)
    assert p.M[0][3] == 2 and p.R[0][3] == 0
    assert p.R[2][0] == 1 and p.A[2][0] == 1 and p.A[0][3] == 1


def test_sum_problems_needs_same_roster():
    with pytest.raises(ValueError):
        sum_problems(zero_problem(["A", "B"]), zero_problem(["A", "C"]))


@pytest.mark.parametrize(
    "R, M",
    [
        ([[0, 1], [1, 0]], [[0, 1], [1, 0]]),
        ([[0, 2], [-2, 0]], [[0, 1], [1, 0]]),
        ([[0, 0], [0, 0]], [[0, 1], [2, 0]]),
        ([[1, 0], [0, -1]], [[0, 0], [0, 0]]),
        ([[0]], [[0]]),
    ],
)
def test_problem_invariants(R, M):
    with pytest.raises(ValueError):
        RankingProblem(("A", "B"), R, M)


@given(tournaments())
def test_negate_is_involution(t):
    p = aggregate(t)
    assert negate(negate(p)) == p
    assert negate(p).M == p.M


@given(tournaments(), st.randoms(use_true_random=False))
def test_permutations_commute_with_aggregate(t, rnd):
    sigma = list(range(t.n))
    rnd.shuffle(sigma)
    assert aggregate(permute_players(t, sigma)) == permute_problem(aggregate(t), sigma)
    inverse = [sigma.index(k) for k in range(t.n)]
    assert permute_players(permute_players(t, sigma), inverse) == t


@given(tournaments(max_rounds=4), st.randoms(use_true_random=False))
def test_round_permutation_keeps_aggregate(t, rnd):
    sigma = list(range(1, t.rounds + 1))
    rnd.shuffle(sigma)
    moved = permute_rounds(t, sigma)
    assert aggregate(moved) == aggregate(t)
    assert sorted(m.round for m in moved.matches) == sorted(sigma[m.round - 1] for m in t.matches)


def test_permutation_must_be_bijection(ex):
    with pytest.raises(ValueError):
        permute_players(ex["4.2"], [0, 0, 1, 2])
    assert permute_players(ex["4.2"], {0: 3, 3: 0}) == permute_players(ex["4.2"], [3, 1, 2, 0])


@given(tournaments(max_rounds=2))
@settings(max_examples=50)
def test_lift_reproduces_aggregate(t):
    p = aggregate(t)
    assert aggregate(lift(p)) == p


def test_opponent_multiset(ex):
    t = ex["4.1c"]
    assert opponent_multiset(t, 0, 2).entries == ((2, 2, F(0)), (2, 3, F(1, 2)))
    assert len(opponent_multiset(t, 2)) == 4
    with pytest.raises(KeyError):
        opponent_multiset(t, 0, 3)


def test_tournament_rejects_rounds_beyond_declared():
    with pytest.raises(ValueError):
        Tournament(("A", "B"), (MatchRecord(3, 0, 1, F(1)),), rounds=2)


def test_round_helpers(ex):
    t = ex["4.1c"]
    assert len(t.round_matches(1)) == 4
    first = t.restrict_rounds([1])
    assert aggregate(first) == aggregate(ex["4.1a"])
