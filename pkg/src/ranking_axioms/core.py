"""Tournaments, ranking problems and the operations between them.

A :class:`Tournament` keeps every match with its round label (the general
ranking problem); a :class:`RankingProblem` is the aggregated view holding the
results matrix ``R`` and the matches matrix ``M``.  All outcome values are
:class:`fractions.Fraction` so comparisons are exact.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

__all__ = [
    "FormatError",
    "MatchRecord",
    "OpponentMultiset",
    "RankingProblem",
    "Tournament",
    "aggregate",
    "format_tournament",
    "lift",
    "negate",
    "opponent_multiset",
    "parse_tournament",
    "permute_players",
    "permute_problem",
    "permute_rounds",
    "sum_problems",
    "zero_problem",
]

Matrix = tuple[tuple[Fraction, ...], ...]
IntMatrix = tuple[tuple[int, ...], ...]


class FormatError(ValueError):
    """Raised for malformed tournament text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def as_fraction(value: Union[int, str, Fraction]) -> Fraction:
    v = Fraction(value)
    if not 0 <= v <= 1:
        raise ValueError(f"match value {v} outside [0, 1]")
    return v


class MatchRecord(NamedTuple):
    """One match: in ``round`` player ``i`` scored ``value`` against ``j``.

    Records are normalised so that ``i < j``; the opposite orientation is
    implied as ``1 - value`` and never stored.
    """

    round: int
    i: int
    j: int
    value: Fraction

    @classmethod
    def make(cls, round: int, i: int, j: int, value) -> MatchRecord:
        if i == j:
            raise ValueError(f"player {i} cannot play against itself")
        if round < 1:
            raise ValueError(f"round labels start at 1, got {round}")
        v = as_fraction(value)
        if i > j:
            i, j, v = j, i, 1 - v
        return cls(round, i, j, v)

    def value_for(self, player: int) -> Fraction:
        """Result of ``player`` in this match (``t_ij`` seen from its side)."""
        if player == self.i:
            return self.value
        if player == self.j:
            return 1 - self.value
        raise ValueError(f"player {player} did not take part in {self}")

    def opponent_of(self, player: int) -> int:
        if player == self.i:
            return self.j
        if player == self.j:
            return self.i
        raise ValueError(f"player {player} did not take part in {self}")


def _check_labels(players: Sequence[str]) -> None:
    if not players:
        raise ValueError("a roster needs at least one player")
    if len(set(players)) != len(players):
        raise ValueError(f"duplicate player labels in {list(players)}")


@dataclass(frozen=True)
class Tournament:
    """A general ranking problem: roster, round count and match records.

    Player identities are roster indices; ``players[k]`` is the label of
    player ``k``.  Matches are kept sorted by ``(round, i, j)``.
    """

    players: tuple[str, ...]
    matches: tuple[MatchRecord, ...] = ()
    rounds: int = 1

    def __post_init__(self) -> None:
        players = tuple(self.players)
        _check_labels(players)
        n = len(players)
        matches = tuple(
            sorted(m if isinstance(m, MatchRecord) and m.i < m.j else MatchRecord.make(*m) for m in self.matches)
        )
        if self.rounds < 1:
            raise ValueError("a tournament has at least one round")
        seen = set()
        for m in matches:
            if not (0 <= m.i < n and 0 <= m.j < n):
                raise ValueError(f"match {m} references a player outside the roster")
            if m.round > self.rounds:
                raise ValueError(f"match {m} lies beyond round {self.rounds}")
            key = (m.round, m.i, m.j)
            if key in seen:
                raise ValueError(
                    f"players {players[m.i]} and {players[m.j]} meet twice in round {m.round}"
                )
            seen.add(key)
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "matches", matches)

    @property
    def n(self) -> int:
        return len(self.players)

    def index(self, label: str) -> int:
        try:
            return self.players.index(label)
        except ValueError:
            raise KeyError(f"unknown player {label!r}") from None

    def round_matches(self, p: int) -> tuple[MatchRecord, ...]:
        return tuple(m for m in self.matches if m.round == p)

    def restrict_rounds(self, rounds: Iterable[int]) -> Tournament:
        """Keep the given rounds, relabelled 1, 2, ... in increasing order."""
        keep = sorted(set(rounds))
        relabel = {p: k + 1 for k, p in enumerate(keep)}
        return Tournament(
            self.players,
            tuple(m._replace(round=relabel[m.round]) for m in self.matches if m.round in relabel),
            max(1, len(keep)),
        )

    def match_counts(self) -> tuple[int, ...]:
        counts = [0] * self.n
        for m in self.matches:
            counts[m.i] += 1
            counts[m.j] += 1
        return tuple(counts)


@dataclass(frozen=True)
class RankingProblem:
    """Aggregated ranking problem ``(N, R, M)``.

    ``R`` is skew-symmetric with exact rational entries, ``M`` symmetric with
    non-negative integer entries and ``|r_ij| <= m_ij``.
    """

    players: tuple[str, ...]
    R: Matrix
    M: IntMatrix

    def __post_init__(self) -> None:
        players = tuple(self.players)
        _check_labels(players)
        n = len(players)
        R = tuple(tuple(Fraction(x) for x in row) for row in self.R)
        M = tuple(tuple(int(x) for x in row) for row in self.M)
        if len(R) != n or len(M) != n or any(len(row) != n for row in R + M):
            raise ValueError(f"R and M must be {n}x{n}")
        for i in range(n):
            if R[i][i] != 0 or M[i][i] != 0:
                raise ValueError("diagonal of R and M must be zero")
            for j in range(i + 1, n):
                if R[i][j] != -R[j][i]:
                    raise ValueError(f"R is not skew-symmetric at ({i}, {j})")
                if M[i][j] != M[j][i] or M[i][j] < 0:
                    raise ValueError(f"M is not symmetric non-negative at ({i}, {j})")
                if abs(R[i][j]) > M[i][j]:
                    raise ValueError(f"|r_ij| exceeds m_ij at ({i}, {j})")
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return len(self.players)

    @property
    def A(self) -> Matrix:
        """Aggregated tournament matrix ``(R + M) / 2``."""
        return tuple(
            tuple((r + m) / 2 for r, m in zip(rrow, mrow)) for rrow, mrow in zip(self.R, self.M)
        )

    def match_counts(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.M)

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.R)

    def is_draw_only(self) -> bool:
        return all(x == 0 for row in self.R for x in row)

    def slots(self):
        """Yield ``(i, j, r_ij, m_ij)`` for every unordered pair ``i < j``."""
        for i in range(self.n):
            for j in range(i + 1, self.n):
                yield i, j, self.R[i][j], self.M[i][j]

    def with_slot(self, i: int, j: int, r, m: int) -> RankingProblem:
        R = [list(row) for row in self.R]
        M = [list(row) for row in self.M]
        R[i][j], R[j][i] = Fraction(r), -Fraction(r)
        M[i][j] = M[j][i] = m
        return RankingProblem(self.players, R, M)


class OpponentMultiset(NamedTuple):
    """Opponents of ``owner`` as ``(round, opponent, value)`` entries.

    ``value`` is the owner's result in that match.  Entries are sorted by
    ``(round, opponent, value)``.
    """

    owner: int
    entries: tuple[tuple[int, int, Fraction], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def opponents(self) -> list[int]:
        return [k for _, k, _ in self.entries]


def zero_problem(players: Sequence[str]) -> RankingProblem:
    n = len(players)
    return RankingProblem(tuple(players), ((0,) * n,) * n, ((0,) * n,) * n)


def aggregate(t: Tournament) -> RankingProblem:
    """Sum all rounds: each match adds ``2t - 1`` to ``r_ij`` and 1 to ``m_ij``."""
    n = t.n
    R = [[Fraction(0)] * n for _ in range(n)]
    M = [[0] * n for _ in range(n)]
    for m in t.matches:
        r = 2 * m.value - 1
        R[m.i][m.j] += r
        R[m.j][m.i] -= r
        M[m.i][m.j] += 1
        M[m.j][m.i] += 1
    return RankingProblem(t.players, R, M)


def sum_problems(a: RankingProblem, b: RankingProblem) -> RankingProblem:
    if a.players != b.players:
        raise ValueError(f"roster mismatch: {a.players} vs {b.players}")
    R = [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a.R, b.R)]
    M = [[x + y for x, y in zip(ma, mb)] for ma, mb in zip(a.M, b.M)]
    return RankingProblem(a.players, R, M)


def negate(p: RankingProblem) -> RankingProblem:
    """Reverse every result: ``(N, -R, M)``."""
    return RankingProblem(p.players, [[-x for x in row] for row in p.R], p.M)


def _as_permutation(sigma: Union[Mapping[int, int], Sequence[int]], size: int, offset: int = 0) -> list[int]:
    if isinstance(sigma, Mapping):
        perm = [sigma.get(k, k) for k in range(offset, size + offset)]
    else:
        perm = list(sigma)
    if sorted(perm) != list(range(offset, size + offset)):
        raise ValueError(f"not a bijection on {offset}..{size + offset - 1}: {perm}")
    return perm


def permute_players(t: Tournament, sigma: Union[Mapping[int, int], Sequence[int]]) -> Tournament:
    """Relabel players: the match of ``i`` against ``j`` becomes ``sigma(i)`` against ``sigma(j)``.

    ``sigma`` is a sequence (``sigma[i]``) or a mapping on roster indices;
    mapping entries left out are fixed points.  The roster labels stay put.
    """
    perm = _as_permutation(sigma, t.n)
    return Tournament(
        t.players,
        tuple(MatchRecord.make(m.round, perm[m.i], perm[m.j], m.value) for m in t.matches),
        t.rounds,
    )


def permute_problem(p: RankingProblem, sigma: Union[Mapping[int, int], Sequence[int]]) -> RankingProblem:
    """Same relabelling as :func:`permute_players`, applied to ``R`` and ``M``."""
    perm = _as_permutation(sigma, p.n)
    n = p.n
    R = [[Fraction(0)] * n for _ in range(n)]
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            R[perm[i]][perm[j]] = p.R[i][j]
            M[perm[i]][perm[j]] = p.M[i][j]
    return RankingProblem(p.players, R, M)


def permute_rounds(t: Tournament, sigma: Union[Mapping[int, int], Sequence[int]]) -> Tournament:
    """Move every match of round ``p`` to round ``sigma(p)`` (rounds are 1-based).

    A sequence ``sigma`` lists images of rounds ``1..m`` in order.
    """
    if isinstance(sigma, Mapping):
        perm = _as_permutation(sigma, t.rounds, offset=1)
    else:
        perm = _as_permutation(sigma, t.rounds, offset=1)
    return Tournament(t.players, tuple(m._replace(round=perm[m.round - 1]) for m in t.matches), t.rounds)


def opponent_multiset(t: Tournament, i: int, round: int | None = None) -> OpponentMultiset:
    if not 0 <= i < t.n:
        raise KeyError(f"unknown player index {i}")
    if round is not None and not 1 <= round <= t.rounds:
        raise KeyError(f"unknown round {round}")
    entries = [
        (m.round, m.opponent_of(i), m.value_for(i))
        for m in t.matches
        if i in (m.i, m.j) and (round is None or m.round == round)
    ]
    return OpponentMultiset(i, tuple(sorted(entries)))


def lift(p: RankingProblem) -> Tournament:
    """Canonical general ranking problem whose aggregate is ``p``.

    The ``m_ij`` meetings of a pair go to rounds ``1..m_ij``, each carrying the
    average result ``a_ij / m_ij``.
    """
    matches = []
    for i, j, r, m in p.slots():
        if m:
            v = (r + m) / (2 * m)
            matches.extend(MatchRecord.make(k, i, j, v) for k in range(1, m + 1))
    rounds = max((m.round for m in matches), default=1)
    return Tournament(p.players, tuple(matches), rounds)


# --- text format -----------------------------------------------------------

_VALUE_RE = re.compile(r"^(0|1|[1-9][0-9]*/[1-9][0-9]*)$")


def _parse_value(text: str, line: int) -> Fraction:
    if not _VALUE_RE.match(text):
        raise FormatError(f"bad match value {text!r} (expected 0, 1 or p/q)", line)
    v = Fraction(text)
    if "/" in text and f"{v.numerator}/{v.denominator}" != text:
        raise FormatError(f"match value {text!r} is not in lowest terms", line)
    if not 0 <= v <= 1:
        raise FormatError(f"match value {text} outside [0, 1]", line)
    return v


def format_value(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_tournament(text: str) -> Tournament:
    """Parse the line-oriented tournament format.

    ::

        # comment
        players: X1 X2 X3 X4
        rounds: 2                # optional, defaults to the largest round used
        match: 1 X1 X4 1
        match: 2 X1 X2 1/2
    """
    players: list[str] | None = None
    rounds: int | None = None
    records: list[MatchRecord] = []
    seen: dict[tuple[int, int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"expected 'key: ...', got {line!r}", lineno)
        key, fields = key.strip(), rest.split()
        if players is None:
            if key != "players":
                raise FormatError("first entry must be 'players:'", lineno)
            if not fields:
                raise FormatError("empty roster", lineno)
            if len(set(fields)) != len(fields):
                raise FormatError("duplicate player label", lineno)
            players = fields
        elif key == "rounds":
            if rounds is not None or records:
                raise FormatError("'rounds:' must directly follow 'players:'", lineno)
            if len(fields) != 1 or not fields[0].isdigit() or int(fields[0]) < 1:
                raise FormatError("'rounds:' takes one positive integer", lineno)
            rounds = int(fields[0])
        elif key == "match":
            if len(fields) != 4:
                raise FormatError("'match:' takes <round> <Li> <Lj> <t>", lineno)
            rnd, li, lj, val = fields
            if not rnd.isdigit() or int(rnd) < 1:
                raise FormatError(f"bad round {rnd!r}", lineno)
            for label in (li, lj):
                if label not in players:
                    raise FormatError(f"unknown player {label!r}", lineno)
            if li == lj:
                raise FormatError(f"{li} cannot play itself", lineno)
            rec = MatchRecord.make(int(rnd), players.index(li), players.index(lj), _parse_value(val, lineno))
            slot = (rec.round, rec.i, rec.j)
            if slot in seen:
                raise FormatError(f"{li} and {lj} already met in round {rnd} (line {seen[slot]})", lineno)
            seen[slot] = lineno
            if rounds is not None and rec.round > rounds:
                raise FormatError(f"round {rnd} exceeds declared {rounds}", lineno)
            records.append(rec)
        else:
            raise FormatError(f"unknown entry {key!r}", lineno)
    if players is None:
        raise FormatError("missing 'players:' line")
    if rounds is None:
        rounds = max((r.round for r in records), default=1)
    return Tournament(tuple(players), tuple(records), rounds)


def format_tournament(t: Tournament) -> str:
    lines = [f"players: {' '.join(t.players)}", f"rounds: {t.rounds}"]
    for m in t.matches:
        lines.append(f"match: {m.round} {t.players[m.i]} {t.players[m.j]} {format_value(m.value)}")
    return "\n".join(lines) + "\n"


def to_inline(t: Tournament) -> str:
    """Single-token encoding used inside verdict records.

    ``X1,X2,X3|2|1:X1:X3:1,2:X2:X3:1/2`` (roster, round count, matches).
    """
    ms = ",".join(f"{m.round}:{t.players[m.i]}:{t.players[m.j]}:{format_value(m.value)}" for m in t.matches)
    return f"{','.join(t.players)}|{t.rounds}|{ms}"


def from_inline(text: str) -> Tournament:
    try:
        roster, rounds, ms = text.split("|")
    except ValueError:
        raise FormatError(f"bad inline tournament {text!r}") from None
    lines = [f"players: {roster.replace(',', ' ')}", f"rounds: {rounds}"]
    lines += [f"match: {m.replace(':', ' ')}" for m in ms.split(",") if m]
    return parse_tournament("\n".join(lines))


def load_tournament(path) -> Tournament:
    with open(path, encoding="utf-8") as fh:
        return parse_tournament(fh.read())
