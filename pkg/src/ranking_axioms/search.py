"""Instance generation and falsification campaigns."""

from __future__ import annotations

import itertools
import random
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Union

from .axioms import (
    Verdict,
    check_ano,
    check_iim,
    check_inv,
    check_neu,
    check_op,
    check_sc,
    check_sym,
    player_generators,
    round_generators,
)
from .core import MatchRecord, Tournament, aggregate
from .methods import Method, get_method

__all__ = [
    "CapExceeded",
    "DEFAULT_ALPHABET",
    "Exhaustive",
    "FalsifyReport",
    "GeneratorConfig",
    "enumerate_small",
    "falsify",
    "gen_random",
    "op_split",
    "queries",
]

DEFAULT_ALPHABET = (Fraction(0), Fraction(1, 2), Fraction(1))
DEFAULT_CAP = 10**7


class CapExceeded(ValueError):
    def __init__(self, needed: int, cap: int) -> None:
        self.needed = needed
        super().__init__(f"enumeration needs {needed} tournaments, cap is {cap}")


class IncompatibleQuery(ValueError):
    """The axiom cannot be checked for this method or corpus."""


def _labels(n: int) -> tuple[str, ...]:
    return tuple(f"X{k + 1}" for k in range(n))


def _alphabet(values) -> tuple[Fraction, ...]:
    out = tuple(sorted({Fraction(v) for v in values}))
    if not out:
        raise ValueError("alphabet must not be empty")
    if any(not 0 <= v <= 1 for v in out):
        raise ValueError("alphabet values must lie in [0, 1]")
    return out


@dataclass(frozen=True)
class GeneratorConfig:
    """Random tournament source.

    ``round-robin-rounds`` pairs every player once per round (``n`` even);
    ``free`` lets each pair meet in a round with probability 1/2.
    """

    n: int
    rounds: int = 1
    alphabet: tuple = DEFAULT_ALPHABET
    seed: int = 0
    schedule: Literal["round-robin-rounds", "free"] = "free"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", _alphabet(self.alphabet))
        if self.n < 1 or self.rounds < 1:
            raise ValueError("need at least one player and one round")
        if self.schedule not in ("round-robin-rounds", "free"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.schedule == "round-robin-rounds" and self.n % 2:
            raise ValueError(f"round-robin-rounds needs an even player count, got {self.n}")


@dataclass(frozen=True)
class Exhaustive:
    """Every tournament with ``n`` players and ``rounds`` rounds over ``alphabet``."""

    n: int
    rounds: int = 1
    alphabet: tuple = DEFAULT_ALPHABET

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", _alphabet(self.alphabet))


def _random_tournament(rng: random.Random, cfg: GeneratorConfig) -> Tournament:
    n = cfg.n
    matches = []
    for p in range(1, cfg.rounds + 1):
        if cfg.schedule == "round-robin-rounds":
            order = list(range(n))
            rng.shuffle(order)
            pairs = [(order[k], order[k + 1]) for k in range(0, n, 2)]
        else:
            pairs = [pair for pair in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        matches += [MatchRecord.make(p, i, j, rng.choice(cfg.alphabet)) for i, j in pairs]
    return Tournament(_labels(n), tuple(matches), cfg.rounds)


def gen_random(cfg: GeneratorConfig) -> Tournament:
    """One tournament, fully determined by ``cfg.seed``."""
    return _random_tournament(random.Random(cfg.seed), cfg)


def random_stream(cfg: GeneratorConfig) -> Iterator[Tournament]:
    rng = random.Random(cfg.seed)
    while True:
        yield _random_tournament(rng, cfg)


def enumeration_size(n: int, rounds: int, alphabet: Sequence) -> int:
    return (len(alphabet) + 1) ** (n * (n - 1) // 2 * rounds)


def enumerate_small(n: int, rounds: int = 1, alphabet=DEFAULT_ALPHABET,
                    cap: Optional[int] = DEFAULT_CAP) -> Iterator[Tournament]:
    """Every assignment of "no match" or an alphabet value to each pair in each round.

    Later rounds and later pairs vary fastest.  Raises :class:`CapExceeded`
    up front when the count exceeds ``cap`` (``None`` disables the check).
    """
    alphabet = _alphabet(alphabet)
    needed = enumeration_size(n, rounds, alphabet)
    if cap is not None and needed > cap:
        raise CapExceeded(needed, cap)
    return _enumerate(n, rounds, alphabet)


def _enumerate(n, rounds, alphabet):
    players = _labels(n)
    slots = [(p, i, j) for p in range(1, rounds + 1) for i, j in itertools.combinations(range(n), 2)]
    states = (None,) + alphabet
    for assignment in itertools.product(states, repeat=len(slots)):
        matches = tuple(
            MatchRecord(p, i, j, v) for (p, i, j), v in zip(slots, assignment) if v is not None
        )
        yield Tournament(players, matches, rounds)


def op_split(t: Tournament) -> tuple[Tournament, Tournament]:
    """First and second half of the rounds (the round count must be even)."""
    if t.rounds % 2:
        raise IncompatibleQuery(f"cannot split {t.rounds} rounds into two halves")
    k = t.rounds // 2
    return t.restrict_rounds(range(1, k + 1)), t.restrict_rounds(range(k + 1, 2 * k + 1))


def iim_edits(t: Tournament, alphabet: Sequence[Fraction]):
    """``(p, q)`` pairs where ``q`` changes one pair slot of ``p`` to a single-match state."""
    p = aggregate(t)
    states = [(Fraction(0), 0)] + [(2 * v - 1, 1) for v in alphabet]
    for i, j, r, m in p.slots():
        for r2, m2 in states:
            if (r2, m2) != (r, m):
                yield p, p.with_slot(i, j, r2, m2)


def queries(method: Method, axiom: str, t: Tournament, alphabet=DEFAULT_ALPHABET,
            respect_rounds: bool = True) -> Iterator[Verdict]:
    """Every checker call the falsifier derives from one base tournament."""
    if axiom == "SYM":
        yield check_sym(method, t)
    elif axiom == "INV":
        yield check_inv(method, t)
    elif axiom == "NEU":
        for sigma in player_generators(t.n):
            yield check_neu(method, t, sigma)
    elif axiom == "ANO":
        for sigma in round_generators(t.rounds):
            yield check_ano(method, t, sigma)
    elif axiom == "SC":
        yield check_sc(method, t, respect_rounds)
    elif axiom in ("OP", "SOP"):
        a, b = op_split(t)
        yield check_op(method, a, b, strong=axiom == "SOP")
    elif axiom == "IIM":
        for p, q in iim_edits(t, alphabet):
            yield check_iim(method, p, q)
    else:
        raise IncompatibleQuery(f"unknown axiom {axiom!r}")


@dataclass
class FalsifyReport:
    axiom: str
    method: str
    outcome: Literal["witness-found", "corpus-exhausted"]
    witness: Optional[Verdict] = None
    instances_tested: int = 0
    elapsed: float = 0.0
    violations: int = 0
    checks: int = 0

    def lines(self, *, timing: bool = True) -> list[str]:
        out = []
        if self.witness is not None:
            out.append(self.witness.record(with_instances=True))
        elapsed = f"{round(self.elapsed * 1000)}" if timing else "-"
        out.append(f"tested={self.instances_tested} elapsed_ms={elapsed} outcome={self.outcome}"
                   + (f" violations={self.violations}" if self.violations > 1 else ""))
        return out


def _check_compatible(method: Method, axiom: str, corpus) -> None:
    if axiom == "ANO" and not method.round_aware:
        raise IncompatibleQuery(f"ANO needs a round-aware method, {method.name} aggregates first")
    n = corpus.n
    if axiom == "IIM" and n < 4:
        raise IncompatibleQuery("IIM needs at least four players")
    if axiom in ("OP", "SOP") and corpus.rounds % 2:
        raise IncompatibleQuery("OP/SOP split the rounds in halves; use an even round count")


def falsify(method: Union[str, Method], axiom: str, corpus: Union[GeneratorConfig, Exhaustive],
            budget: Optional[int] = None, *, exhaust_all: bool = False,
            respect_rounds: bool = True) -> FalsifyReport:
    """Stream instances through the checker for ``axiom`` until one fails.

    ``corpus`` is random (:class:`GeneratorConfig`, ``budget`` tournaments)
    or exhaustive (:class:`Exhaustive`, optionally truncated at ``budget``).
    With ``exhaust_all`` the whole corpus is run and failures are counted;
    the reported witness is still the first one.
    """
    method = get_method(method)
    axiom = axiom.upper()
    _check_compatible(method, axiom, corpus)
    if isinstance(corpus, GeneratorConfig):
        if budget is None:
            raise ValueError("a random corpus needs a budget (number of trials)")
        stream: Iterator[Tournament] = random_stream(corpus)
    else:
        stream = enumerate_small(corpus.n, corpus.rounds, corpus.alphabet, cap=None)
    report = FalsifyReport(axiom, method.name, "corpus-exhausted")
    start = time.perf_counter()
    for t in stream:
        if budget is not None and report.instances_tested >= budget:
            break
        report.instances_tested += 1
        for verdict in queries(method, axiom, t, corpus.alphabet, respect_rounds):
            report.checks += 1
            if verdict.failed:
                report.violations += 1
                if report.witness is None:
                    report.witness = verdict
                if not exhaust_all:
                    break
        if report.witness is not None and not exhaust_all:
            break
    if report.witness is not None:
        report.outcome = "witness-found"
    report.elapsed = time.perf_counter() - start
    return report
