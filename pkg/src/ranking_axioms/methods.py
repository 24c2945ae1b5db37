"""Scoring methods and the method registry.

Aggregate methods map a :class:`~ranking_axioms.core.RankingProblem` to one
rating per player; round-aware methods see the individual rounds of a
:class:`~ranking_axioms.core.Tournament`.  Every method is wrapped in a
:class:`Method` so checkers can call it on either kind of input.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Union

import numpy as np

from . import exact
from .core import RankingProblem, Tournament, aggregate, format_value, lift

__all__ = [
    "ConvergenceError",
    "EIGEN_EPSILON",
    "EIGEN_TOLERANCE",
    "Method",
    "REGISTRY",
    "ScoreVector",
    "eigenvector_rating",
    "format_scores",
    "get_method",
    "index_score",
    "individual_method",
    "least_squares",
    "constructed_method",
    "round_sum",
    "score",
]

EIGEN_EPSILON = Fraction(1, 1000)
EIGEN_TOLERANCE = 1e-9
EIGEN_STOP = 1e-12
EIGEN_MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScoreVector:
    """Ratings, one per roster player.

    Exact vectors hold :class:`~fractions.Fraction` values and compare exactly.
    Approximate vectors treat differences within ``tolerance`` as ties.
    """

    values: tuple
    exact: bool = True
    tolerance: float = 0.0

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def cmp(self, i: int, j: int) -> int:
        return compare(self.values[i], self.values[j], self.tolerance)

    def ge(self, i: int, j: int) -> bool:
        return self.cmp(i, j) >= 0

    def gt(self, i: int, j: int) -> bool:
        return self.cmp(i, j) > 0

    def render(self, i: int) -> str:
        v = self.values[i]
        return format_value(v) if self.exact else repr(float(v))


def compare(a, b, tolerance: float = 0.0) -> int:
    """Three-way comparison; ``|a - b| <= tolerance`` counts as a tie."""
    d = a - b
    if tolerance:
        if abs(d) <= tolerance:
            return 0
    elif d == 0:
        return 0
    return 1 if d > 0 else -1


def _exact(values) -> ScoreVector:
    return ScoreVector(tuple(Fraction(v) for v in values))


# --- aggregate methods ------------------------------------------------------

def score(p: RankingProblem) -> ScoreVector:
    """Row sums of the results matrix."""
    return _exact(p.row_sums())


def least_squares(p: RankingProblem) -> ScoreVector:
    """Least-squares ratings: ``L q = d`` with zero-sum ratings per component.

    ``L = diag(M 1) - M`` is the Laplacian of the match graph and ``d`` the row
    sums of ``R``.  Each connected component is solved on its own; isolated
    players get 0.
    """
    n = p.n
    d = p.row_sums()
    q = [Fraction(0)] * n
    for comp in exact.components(p.M):
        if len(comp) == 1:
            continue
        c = len(comp)
        # L_C + J/c is invertible on a connected component and leaves the
        # zero-sum solution unchanged because d sums to zero there.
        system = [
            [
                (sum(p.M[a]) if a == b else -p.M[a][b]) + Fraction(1, c)
                for b in comp
            ]
            for a in comp
        ]
        for v, x in zip(comp, exact.solve(system, [d[a] for a in comp])):
            q[v] = x
    return ScoreVector(tuple(q))


def laplacian(p: RankingProblem) -> list[list[int]]:
    return [[(sum(p.M[i]) if i == j else -p.M[i][j]) for j in range(p.n)] for i in range(p.n)]


def power_iteration(A: np.ndarray, *, max_iter: int = EIGEN_MAX_ITER, stop: float = EIGEN_STOP):
    """Principal right eigenvectors of a batch of non-negative matrices.

    ``A`` has shape ``(B, n, n)``.  Returns ``(x, converged)`` with each row of
    ``x`` normalised to sum 1.  Iterates on ``A + I``, which has the same
    eigenvectors but no period, so bipartite match graphs converge too.
    """
    A = np.asarray(A, dtype=float)
    B, n, _ = A.shape
    shifted = A + np.eye(n)
    x = np.full((B, n), 1.0 / n)
    converged = np.zeros(B, dtype=bool)
    active = np.arange(B)
    for _ in range(max_iter):
        if active.size == 0:
            break
        xa = x[active]
        nxt = np.einsum("bij,bj->bi", shifted[active], xa)
        nxt /= nxt.sum(axis=1, keepdims=True)
        change = np.abs(nxt - xa).max(axis=1)
        x[active] = nxt
        done = change < stop * np.abs(nxt).max(axis=1)
        converged[active[done]] = True
        active = active[~done]
    return x, converged


def perturbed_matrix(p: RankingProblem, epsilon: Fraction = EIGEN_EPSILON) -> np.ndarray:
    n = p.n
    eps = float(epsilon)
    return np.array(
        [[float(p.A[i][j]) + (eps if i != j else 0.0) for j in range(n)] for i in range(n)]
    )


def eigenvector_rating(p: RankingProblem) -> ScoreVector:
    """Principal right eigenvector of ``A + eps*J`` (``J`` with zero diagonal), summing to 1."""
    x, ok = power_iteration(perturbed_matrix(p)[None])
    if not ok[0]:
        raise ConvergenceError(f"power iteration did not converge in {EIGEN_MAX_ITER} steps")
    return ScoreVector(tuple(float(v) for v in x[0]), exact=False, tolerance=EIGEN_TOLERANCE)


def constructed_method(p: RankingProblem, variant: str) -> ScoreVector:
    """The three constructions that separate NEU, SYM and SOP.

    ``prev-player``: row sum of the previous player (player 1 takes the last).
    ``max-other-matches``: largest match count among the other players.
    ``opp-aggregate``: row sums of the opponents, counted with multiplicity.
    """
    n = p.n
    s = p.row_sums()
    if variant == "prev-player":
        return _exact(s[i - 1] for i in range(n))
    if variant == "max-other-matches":
        deg = p.match_counts()
        return _exact(max((deg[j] for j in range(n) if j != i), default=0) for i in range(n))
    if variant == "opp-aggregate":
        return _exact(sum((p.M[i][j] * s[j] for j in range(n)), Fraction(0)) for i in range(n))
    raise ValueError(f"unknown variant {variant!r}")


def index_score(p: RankingProblem) -> ScoreVector:
    """Player ``k`` (1-based) scores ``n - k`` whatever the results."""
    return _exact(p.n - 1 - i for i in range(p.n))


# --- round-aware methods ----------------------------------------------------

def round_problem(t: Tournament, p: int) -> RankingProblem:
    return aggregate(Tournament(t.players, t.round_matches(p), t.rounds))


def individual_method(
    phi: Callable[[RankingProblem], Sequence], delta: Callable[[list[Sequence]], Sequence]
) -> Callable[[Tournament], ScoreVector]:
    """Build ``g = delta(phi(T^(1)), ..., phi(T^(m)))`` from per-round scores."""

    def g(t: Tournament) -> ScoreVector:
        parts = [tuple(phi(round_problem(t, p))) for p in range(1, t.rounds + 1)]
        return _exact(delta(parts))

    return g


def _row_sums(p: RankingProblem):
    return p.row_sums()


def _componentwise_sum(parts: list[Sequence]):
    return [sum(col, Fraction(0)) for col in zip(*parts)]


round_sum = individual_method(_row_sums, _componentwise_sum)
round_sum.__doc__ = "Per-round row sums of the results matrix, added over rounds."


# --- registry ---------------------------------------------------------------

Kind = Literal["aggregate", "round-aware"]


@dataclass(frozen=True)
class Method:
    """A named scoring method callable on tournaments and ranking problems.

    Aggregate methods aggregate a tournament first.  Round-aware methods run
    on a ranking problem through its canonical :func:`~ranking_axioms.core.lift`.
    """

    name: str
    kind: Kind
    fn: Callable
    exact: bool = True
    tolerance: float = 0.0

    def __call__(self, x: Union[Tournament, RankingProblem]) -> ScoreVector:
        if self.kind == "aggregate":
            return self.fn(aggregate(x) if isinstance(x, Tournament) else x)
        return self.fn(x if isinstance(x, Tournament) else lift(x))

    @property
    def round_aware(self) -> bool:
        return self.kind == "round-aware"


def _variant(name: str) -> Callable[[RankingProblem], ScoreVector]:
    def f(p: RankingProblem) -> ScoreVector:
        return constructed_method(p, name)

    f.__name__ = name.replace("-", "_")
    return f


REGISTRY: dict[str, Method] = {
    m.name: m
    for m in [
        Method("score", "aggregate", score),
        Method("least-squares", "aggregate", least_squares),
        Method("eigenvector", "aggregate", eigenvector_rating, exact=False, tolerance=EIGEN_TOLERANCE),
        Method("round-sum", "round-aware", round_sum),
        Method("prev-player", "aggregate", _variant("prev-player")),
        Method("max-other-matches", "aggregate", _variant("max-other-matches")),
        Method("opp-aggregate", "aggregate", _variant("opp-aggregate")),
        Method("index", "aggregate", index_score),
    ]
}


def get_method(name: Union[str, Method]) -> Method:
    if isinstance(name, Method):
        return name
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown method {name!r}; known: {', '.join(REGISTRY)}") from None


def format_scores(players: Sequence[str], s: ScoreVector) -> str:
    return "".join(f"{label} {s.render(i)}\n" for i, label in enumerate(players))
