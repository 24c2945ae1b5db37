"""The worked examples as tournament files, and the verdicts they must produce."""

from __future__ import annotations

from importlib import resources
from typing import NamedTuple, Optional

from ..axioms import Status, Verdict, check
from ..core import Tournament, parse_tournament


class PaperExample(NamedTuple):
    id: str
    tournament: Tournament
    notes: str


_FILES = {
    "3.1": ("ex31.trn", "X1 beats X4 in round 1, two draws in round 2"),
    "4.1a": ("ex41a.trn", "draws X1-X2, X1-X4, X2-X3, X3-X4"),
    "4.1b": ("ex41b.trn", "X3 beats X1 and X2, X1-X4 and X2-X4 draw"),
    "4.1c": ("ex41c.trn", "4.1a as round 1 and 4.1b as round 2"),
    "4.2": ("ex42.trn", "draw path X1-X2-X3-X4"),
}

EXAMPLE_IDS = tuple(_FILES)


def path(id: str):
    return resources.files(__name__) / _FILES[id][0]


def example(id: str) -> PaperExample:
    try:
        filename, notes = _FILES[id]
    except KeyError:
        raise KeyError(f"unknown example {id!r}; known: {', '.join(_FILES)}") from None
    text = (resources.files(__name__) / filename).read_text(encoding="utf-8")
    return PaperExample(id, parse_tournament(text), notes)


class VerdictRow(NamedTuple):
    method: str
    axiom: str
    example: str
    expected: Status
    witness: Optional[dict] = None
    params: dict = {}


END_SWAP = (3, 2, 1, 0)


def verdict_table() -> list[VerdictRow]:
    """Expected verdicts on the examples.

    ``example`` is an id, or ``"4.1a+4.1b"`` for the two halves checked
    together.  ``witness`` lists the witness fields a FAIL must reproduce.
    """
    P, F = Status.PASS, Status.FAIL
    return [
        VerdictRow("round-sum", "SC", "3.1", F, {"pair": ("X2", "X3")}),
        VerdictRow("round-sum", "ANO", "3.1", P),
        VerdictRow("round-sum", "NEU", "3.1", P),
        VerdictRow("score", "OP", "4.1a+4.1b", P),
        VerdictRow("score", "SOP", "4.1a+4.1b", P),
        VerdictRow("score", "SC", "4.1c", F, {"pair": ("X2", "X1"), "strength": "strict"}),
        VerdictRow("least-squares", "OP", "4.1a+4.1b", F, {"pair": ("X1", "X2")}),
        VerdictRow("least-squares", "SOP", "4.1a+4.1b", F, {"pair": ("X1", "X2")}),
        VerdictRow("least-squares", "SC", "4.1c", P),
        VerdictRow("index", "SC", "4.2", P),
        VerdictRow("index", "NEU", "4.2", F, {"player": "X1", "image": "X4"}, {"sigma": END_SWAP}),
        VerdictRow("index", "SYM", "4.2", F, {"pair": ("X1", "X2")}),
    ]


def instances_for(example_id: str) -> tuple[Tournament, ...]:
    return tuple(example(part).tournament for part in example_id.split("+"))


def replay_row(row: VerdictRow) -> Verdict:
    return check(row.axiom, row.method, *instances_for(row.example), **row.params)


def row_matches(row: VerdictRow, verdict: Verdict) -> bool:
    if verdict.status is not row.expected:
        return False
    if row.witness:
        return all(verdict.witness.get(k) == v for k, v in row.witness.items())
    return True
