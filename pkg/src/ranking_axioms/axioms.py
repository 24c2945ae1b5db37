"""Executable axiom checkers.

Each ``check_*`` function returns a :class:`Verdict`.  A ``FAIL`` verdict
carries a witness (the offending players, their scores and any mapping used)
together with the instances and parameters needed to :func:`replay` it.
"""

from __future__ import annotations

import enum
import itertools
import shlex
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, NamedTuple, Optional, Union

from .core import (
    RankingProblem,
    Tournament,
    aggregate,
    format_value,
    lift,
    negate,
    opponent_multiset,
    permute_players,
    permute_problem,
    permute_rounds,
    sum_problems,
    to_inline,
)
from .methods import Method, ScoreVector, compare, get_method

__all__ = [
    "AXIOMS",
    "DominanceCertificate",
    "PreconditionError",
    "Status",
    "Verdict",
    "check_ano",
    "check_iim",
    "check_inv",
    "check_neu",
    "check_op",
    "check_sc",
    "check_sym",
    "player_generators",
    "replay",
    "round_generators",
    "sc_dominance",
    "sc_dominance_bruteforce",
]

AXIOMS = ("ANO", "NEU", "SC", "SYM", "INV", "IIM", "OP", "SOP")

Instance = Union[Tournament, RankingProblem]
MethodLike = Union[str, Method]


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INAPPLICABLE = "INAPPLICABLE"

    def __str__(self) -> str:
        return self.value


class PreconditionError(ValueError):
    """The inputs do not form a valid query for the checker."""


@dataclass(frozen=True)
class Verdict:
    axiom: str
    method: str
    status: Status
    witness: Optional[dict] = None
    note: Optional[str] = None
    instances: tuple = ()
    params: dict = field(default_factory=dict, compare=False)

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    def record(self, *, with_instances: bool = False) -> str:
        """Line-keyed text form, fields in a fixed order."""
        fields = [("axiom", self.axiom), ("method", self.method), ("status", str(self.status))]
        if self.witness is not None:
            fields.append(("witness", render_witness(self.witness)))
        if self.note:
            fields.append(("note", self.note))
        if "sigma" in self.params:
            fields.append(("sigma", render_sigma(self.params["sigma"], self.axiom, self.instances)))
        for key in ("strong", "respect_rounds"):
            if key in self.params:
                fields.append((key, _render(self.params[key])))
        if with_instances:
            for k, inst in enumerate(self.instances):
                t = inst if isinstance(inst, Tournament) else lift(inst)
                fields.append((f"instance{k + 1}", to_inline(t)))
        return " ".join(f"{k}={shlex.quote(v)}" for k, v in fields)


def _render(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        return format_value(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(_render(v) for v in value)
    if isinstance(value, DominanceCertificate):
        return value.render()
    return str(value)


def render_sigma(sigma: Sequence[int], axiom: str, instances: Sequence = ()) -> str:
    """``a>b`` pairs: player labels for NEU, 1-based round numbers for ANO."""
    if axiom == "NEU" and instances:
        players = instances[0].players
        return ",".join(f"{players[i]}>{players[s]}" for i, s in enumerate(sigma))
    return ",".join(f"{p}>{s}" for p, s in enumerate(sigma, start=1))


def parse_sigma(text: str, axiom: str, x: Instance) -> tuple[int, ...]:
    """Inverse of :func:`render_sigma`; unmentioned points stay fixed."""
    if axiom == "NEU":
        index = {label: k for k, label in enumerate(x.players)}
        perm = list(range(x.n))
    else:
        rounds = x.rounds if isinstance(x, Tournament) else lift(x).rounds
        index = {str(p): p for p in range(1, rounds + 1)}
        perm = list(range(1, rounds + 1))
    base = 0 if axiom == "NEU" else 1
    for item in filter(None, text.split(",")):
        src, sep, dst = item.partition(">")
        if not sep or src not in index or dst not in index:
            raise ValueError(f"bad permutation entry {item!r}")
        perm[index[src] - base] = index[dst]
    if sorted(perm) != sorted(index.values()):
        raise ValueError(f"{text!r} is not a bijection")
    return tuple(perm)


def render_witness(witness: dict) -> str:
    return ";".join(f"{k}:{_render(v)}" for k, v in witness.items())


def _inapplicable(axiom, method, reason, instances=(), params=None) -> Verdict:
    return Verdict(axiom, method.name, Status.INAPPLICABLE, note=reason, instances=tuple(instances),
                   params=params or {})


def _as_problem(x: Instance) -> RankingProblem:
    return aggregate(x) if isinstance(x, Tournament) else x


def _ordered_pairs(n: int):
    return ((i, j) for i in range(n) for j in range(n) if i != j)


# --- SYM / INV ----------------------------------------------------------------

def check_sym(method: MethodLike, p: Instance) -> Verdict:
    method = get_method(method)
    p = _as_problem(p)
    if p.n < 2:
        return _inapplicable("SYM", method, "fewer than two players", (p,))
    if not p.is_draw_only():
        return _inapplicable("SYM", method, "R is not the zero matrix", (p,))
    s = method(p)
    for i in range(p.n):
        for j in range(i + 1, p.n):
            if s.cmp(i, j) != 0:
                return Verdict("SYM", method.name, Status.FAIL,
                               {"pair": (p.players[i], p.players[j]), "scores": (s[i], s[j])},
                               instances=(p,))
    return Verdict("SYM", method.name, Status.PASS, instances=(p,))


def check_inv(method: MethodLike, p: Instance) -> Verdict:
    method = get_method(method)
    p = _as_problem(p)
    if p.n < 2:
        return _inapplicable("INV", method, "fewer than two players", (p,))
    f, g = method(p), method(negate(p))
    for i, j in _ordered_pairs(p.n):
        if f.ge(i, j) != (g.cmp(i, j) <= 0):
            return Verdict("INV", method.name, Status.FAIL,
                           {"pair": (p.players[i], p.players[j]), "scores": (f[i], f[j]),
                            "negated": (g[i], g[j])},
                           instances=(p,))
    return Verdict("INV", method.name, Status.PASS, instances=(p,))


# --- IIM ------------------------------------------------------------------------

def differing_slots(p: RankingProblem, q: RankingProblem) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i in range(p.n)
        for j in range(i + 1, p.n)
        if p.R[i][j] != q.R[i][j] or p.M[i][j] != q.M[i][j]
    ]


def check_iim(method: MethodLike, p: Instance, q: Instance) -> Verdict:
    """Independence of irrelevant matches for two problems differing in one pair slot.

    Raises :class:`PreconditionError` if the rosters differ, ``n < 4``, or
    the problems do not differ in exactly one slot.
    """
    method = get_method(method)
    p, q = _as_problem(p), _as_problem(q)
    if p.players != q.players:
        raise PreconditionError("rosters differ")
    if p.n < 4:
        raise PreconditionError("IIM needs at least four players")
    slots = differing_slots(p, q)
    if len(slots) != 1:
        raise PreconditionError(f"problems differ in {len(slots)} pair slots, expected exactly 1")
    (k, l), = slots
    f, g = method(p), method(q)
    others = [x for x in range(p.n) if x not in (k, l)]
    for i, j in itertools.permutations(others, 2):
        for direction, before, after in (("p->q", f, g), ("q->p", g, f)):
            if before.ge(i, j) and not after.ge(i, j):
                return Verdict("IIM", method.name, Status.FAIL,
                               {"pair": (p.players[i], p.players[j]),
                                "slot": (p.players[k], p.players[l]),
                                "direction": direction,
                                "p": (f[i], f[j]), "q": (g[i], g[j])},
                               instances=(p, q))
    return Verdict("IIM", method.name, Status.PASS, instances=(p, q))


# --- OP / SOP ---------------------------------------------------------------------

def check_op(method: MethodLike, a: Instance, b: Instance, strong: bool = False) -> Verdict:
    """Order preservation (``strong=False``) or strong order preservation.

    The weak form needs every player to have the same number of matches
    within ``a`` and, separately, within ``b``; otherwise the verdict is
    ``INAPPLICABLE``.
    """
    method = get_method(method)
    a, b = _as_problem(a), _as_problem(b)
    axiom = "SOP" if strong else "OP"
    params = {"strong": strong}
    if a.n < 2:
        return _inapplicable(axiom, method, "fewer than two players", (a, b), params)
    if not strong:
        for name, x in (("first", a), ("second", b)):
            if len(set(x.match_counts())) > 1:
                return _inapplicable(axiom, method,
                                     f"players have unequal match counts in the {name} problem",
                                     (a, b), params)
    total = sum_problems(a, b)
    fa, fb, fs = method(a), method(b), method(total)
    for i, j in _ordered_pairs(a.n):
        ca, cb = fa.cmp(i, j), fb.cmp(i, j)
        if ca < 0 or cb < 0:
            continue
        cs = fs.cmp(i, j)
        need_strict = ca > 0 or cb > 0
        if cs < 0 or (need_strict and cs == 0):
            return Verdict(axiom, method.name, Status.FAIL,
                           {"pair": (a.players[i], a.players[j]), "a": (fa[i], fa[j]),
                            "b": (fb[i], fb[j]), "sum": (fs[i], fs[j]),
                            "required": "strict" if need_strict else "weak"},
                           instances=(a, b), params=params)
    return Verdict(axiom, method.name, Status.PASS, instances=(a, b), params=params)


# --- ANO / NEU -------------------------------------------------------------------

def player_generators(n: int) -> list[tuple[int, ...]]:
    """All transpositions followed by the cycle ``i -> i+1 (mod n)``, without duplicates."""
    gens: list[tuple[int, ...]] = []
    for a, b in itertools.combinations(range(n), 2):
        perm = list(range(n))
        perm[a], perm[b] = b, a
        gens.append(tuple(perm))
    cycle = tuple((i + 1) % n for i in range(n))
    if n > 1 and cycle not in gens:
        gens.append(cycle)
    return gens


def round_generators(m: int) -> list[tuple[int, ...]]:
    """Same generating set for rounds, as images of rounds ``1..m``."""
    return [tuple(x + 1 for x in g) for g in player_generators(m)]


def _same(x, y, tolerance: float) -> bool:
    return compare(x, y, tolerance) == 0


def check_ano(method: MethodLike, t: Tournament, sigma: Sequence[int]) -> Verdict:
    method = get_method(method)
    sigma = tuple(sigma)
    params = {"sigma": sigma}
    if not method.round_aware:
        return Verdict("ANO", method.name, Status.PASS,
                       note="aggregate method: scores cannot depend on round order",
                       instances=(t,), params=params)
    shuffled = permute_rounds(t, sigma)
    f, g = method(t), method(shuffled)
    for i in range(t.n):
        if not _same(f[i], g[i], f.tolerance):
            return Verdict("ANO", method.name, Status.FAIL,
                           {"player": t.players[i], "before": f[i], "after": g[i]},
                           instances=(t,), params=params)
    return Verdict("ANO", method.name, Status.PASS, instances=(t,), params=params)


def check_neu(method: MethodLike, x: Instance, sigma: Sequence[int]) -> Verdict:
    """Neutrality under the player permutation ``sigma`` (``sigma[i]`` is the image of ``i``)."""
    method = get_method(method)
    sigma = tuple(sigma)
    params = {"sigma": sigma}
    moved = permute_players(x, sigma) if isinstance(x, Tournament) else permute_problem(x, sigma)
    f, g = method(x), method(moved)
    for i in range(x.n):
        if not _same(f[i], g[sigma[i]], f.tolerance):
            return Verdict("NEU", method.name, Status.FAIL,
                           {"player": x.players[i], "image": x.players[sigma[i]],
                            "before": f[i], "after": g[sigma[i]]},
                           instances=(x,), params=params)
    return Verdict("NEU", method.name, Status.PASS, instances=(x,), params=params)


def check_all_generators(axiom: str, method: MethodLike, x: Instance) -> Verdict:
    """Run ANO or NEU under every generator permutation; first FAIL wins."""
    method = get_method(method)
    if axiom == "NEU":
        gens = player_generators(x.n) or [tuple(range(x.n))]
        run = check_neu
    elif axiom == "ANO":
        if not isinstance(x, Tournament):
            x = lift(x)
        gens = round_generators(x.rounds) or [tuple(range(1, x.rounds + 1))]
        run = check_ano
    else:
        raise ValueError(f"{axiom} is not a permutation axiom")
    for sigma in gens:
        verdict = run(method, x, sigma)
        if verdict.failed:
            break
    return verdict


# --- self-consistency ---------------------------------------------------------------

class Pairing(NamedTuple):
    """One edge of a bijection: opponent ``k`` of ``i`` (result ``t_ik``) mapped to ``l`` of ``j``."""

    k: int
    t_ik: Fraction
    l: int
    t_jl: Fraction


@dataclass(frozen=True)
class DominanceCertificate:
    """Evidence that player ``i`` is at least as good as ``j`` in the SC sense.

    ``groups`` holds the round label of each bijection (``None`` when rounds
    are pooled) and ``bijections`` the matching pairs per group.
    """

    pair: tuple[int, int]
    strength: Literal["none", "weak", "strict"]
    groups: tuple = ()
    bijections: tuple[tuple[Pairing, ...], ...] = ()
    strict_witness: Optional[tuple] = None
    reason: Optional[str] = None

    def render(self, players: Optional[Sequence[str]] = None) -> str:
        lab = (lambda k: players[k]) if players else (lambda k: f"X{k + 1}")
        if self.strength == "none":
            return f"none({self.reason})"
        parts = []
        for g, bij in zip(self.groups, self.bijections):
            tag = "all" if g is None else str(g)
            parts.append(tag + ":" + "+".join(f"{lab(e.k)}>{lab(e.l)}" for e in bij))
        out = f"{self.strength}[{'/'.join(parts)}]"
        if self.strict_witness:
            g, e = self.strict_witness
            out += f"!{'all' if g is None else g}:{lab(e.k)}>{lab(e.l)}"
        return out


def _instances(t: Tournament, i: int, respect_rounds: bool):
    if respect_rounds:
        return [(p, list(opponent_multiset(t, i, p).entries)) for p in range(1, t.rounds + 1)]
    return [(None, list(opponent_multiset(t, i).entries))]


def _edge_ok(s: ScoreVector, a, b) -> bool:
    return a[2] >= b[2] and s.ge(a[1], b[1])


def _edge_strict(s: ScoreVector, a, b) -> bool:
    return a[2] > b[2] or s.gt(a[1], b[1])


def _has_perfect_matching(adj: list[list[int]], lefts: Sequence[int], rights: set[int]) -> bool:
    match: dict[int, int] = {}

    def augment(u, seen) -> bool:
        for v in adj[u]:
            if v in rights and v not in seen:
                seen.add(v)
                if v not in match or augment(match[v], seen):
                    match[v] = u
                    return True
        return False

    return all(augment(u, set()) for u in lefts)


def lex_first_matching(adj: list[list[int]], size: int) -> Optional[list[int]]:
    """Lexicographically first perfect matching of a ``size x size`` bipartite graph.

    ``adj[a]`` lists the admissible right vertices of left vertex ``a`` in
    increasing order.  Returns ``match[a]`` or ``None``.
    """
    free = set(range(size))
    if not _has_perfect_matching(adj, range(size), free):
        return None
    out = []
    for a in range(size):
        for b in adj[a]:
            if b in free and _has_perfect_matching(adj, range(a + 1, size), free - {b}):
                out.append(b)
                free.discard(b)
                break
        else:  # unreachable once the full graph has a perfect matching
            return None
    return out


def _dominance(t, s, i, j, respect_rounds, solver) -> DominanceCertificate:
    if i == j:
        raise ValueError("self-consistency compares two different players")
    left = _instances(t, i, respect_rounds)
    right = _instances(t, j, respect_rounds)
    pair = (i, j)
    for (g, L), (_, Rr) in zip(left, right):
        if len(L) != len(Rr):
            where = "overall" if g is None else f"round-{g}"
            return DominanceCertificate(pair, "none", reason=f"size-mismatch-{where}")
    groups = tuple(g for g, _ in left)
    graphs = []
    for (_, L), (_, Rr) in zip(left, right):
        adj = [[b for b in range(len(Rr)) if _edge_ok(s, L[a], Rr[b])] for a in range(len(L))]
        graphs.append((L, Rr, adj))
    base = [solver(adj, len(L)) for L, _, adj in graphs]
    if any(m is None for m in base):
        return DominanceCertificate(pair, "none", reason="no-bijection")

    def pairings(L, Rr, m):
        return tuple(Pairing(L[a][1], L[a][2], Rr[b][1], Rr[b][2]) for a, b in enumerate(m))

    bijections = [pairings(L, Rr, m) for (L, Rr, _), m in zip(graphs, base)]
    for gi, (L, Rr, adj) in enumerate(graphs):
        for a in range(len(L)):
            for b in adj[a]:
                if not _edge_strict(s, L[a], Rr[b]):
                    continue
                forced = [[b] if x == a else [y for y in row if y != b] for x, row in enumerate(adj)]
                m = solver(forced, len(L))
                if m is not None:
                    bijections[gi] = pairings(L, Rr, m)
                    edge = Pairing(L[a][1], L[a][2], Rr[b][1], Rr[b][2])
                    return DominanceCertificate(pair, "strict", groups, tuple(bijections),
                                                (groups[gi], edge))
    return DominanceCertificate(pair, "weak", groups, tuple(bijections))


def sc_dominance(t: Tournament, s: ScoreVector, i: int, j: int,
                 respect_rounds: bool = True) -> DominanceCertificate:
    """Decide whether ``i`` weakly or strictly dominates ``j`` given strengths ``s``.

    Per round (or over the pooled rounds) opponents of ``i`` must be matched
    one-to-one with opponents of ``j`` so that each result of ``i`` is at least
    the paired result of ``j`` against an opponent that is no stronger.
    Strictness needs some admissible matching with one strict edge; each
    strict edge is forced in turn and the matching re-tested.
    """
    return _dominance(t, s, i, j, respect_rounds, lex_first_matching)


BRUTEFORCE_LIMIT = 7


def _lex_first_by_enumeration(adj: list[list[int]], size: int) -> Optional[list[int]]:
    if size > BRUTEFORCE_LIMIT:
        raise ValueError(f"multiset of size {size} exceeds the enumeration bound {BRUTEFORCE_LIMIT}")
    allowed = [set(row) for row in adj]
    for perm in itertools.permutations(range(size)):
        if all(perm[a] in allowed[a] for a in range(size)):
            return list(perm)
    return None


def sc_dominance_bruteforce(t: Tournament, s: ScoreVector, i: int, j: int,
                            respect_rounds: bool = True) -> DominanceCertificate:
    """Reference version of :func:`sc_dominance` that enumerates every bijection."""
    for g, entries in _instances(t, i, respect_rounds) + _instances(t, j, respect_rounds):
        if len(entries) > BRUTEFORCE_LIMIT:
            raise ValueError(f"multiset of size {len(entries)} exceeds the enumeration bound")
    return _dominance(t, s, i, j, respect_rounds, _lex_first_by_enumeration)


def verify_certificate(cert: DominanceCertificate, t: Tournament, s: ScoreVector,
                       respect_rounds: bool = True) -> bool:
    """Re-check a certificate edge by edge against the tournament and scores."""
    if cert.strength == "none":
        return True
    i, j = cert.pair
    left = _instances(t, i, respect_rounds)
    right = _instances(t, j, respect_rounds)
    if tuple(g for g, _ in left) != cert.groups:
        return False
    for (g, L), (_, Rr), bij in zip(left, right, cert.bijections):
        if sorted((e.k, e.t_ik) for e in bij) != sorted((k, v) for _, k, v in L):
            return False
        if sorted((e.l, e.t_jl) for e in bij) != sorted((k, v) for _, k, v in Rr):
            return False
        for e in bij:
            if not (e.t_ik >= e.t_jl and s.ge(e.k, e.l)):
                return False
    if cert.strength == "strict":
        if cert.strict_witness is None:
            return False
        g, e = cert.strict_witness
        bij = cert.bijections[cert.groups.index(g)]
        return e in bij and (e.t_ik > e.t_jl or s.gt(e.k, e.l))
    return cert.strict_witness is None


def check_sc(method: MethodLike, t: Instance, respect_rounds: bool = True) -> Verdict:
    """Self-consistency of ``method`` on ``t``.

    A ranking problem has no rounds, so it is lifted and its opponents pooled.
    """
    method = get_method(method)
    if isinstance(t, RankingProblem):
        t, respect_rounds = lift(t), False
    params = {"respect_rounds": respect_rounds}
    if t.n < 2:
        return _inapplicable("SC", method, "fewer than two players", (t,), params)
    s = method(t)
    for i, j in _ordered_pairs(t.n):
        cert = sc_dominance(t, s, i, j, respect_rounds)
        if cert.strength == "none":
            continue
        c = s.cmp(i, j)
        if c < 0 or (cert.strength == "strict" and c == 0):
            return Verdict("SC", method.name, Status.FAIL,
                           {"pair": (t.players[i], t.players[j]), "scores": (s[i], s[j]),
                            "strength": cert.strength, "certificate": cert.render(t.players)},
                           instances=(t,), params=params)
    return Verdict("SC", method.name, Status.PASS, instances=(t,), params=params)


def sc_certificate_for(verdict: Verdict, method: MethodLike) -> DominanceCertificate:
    """Rebuild the certificate cited by an SC FAIL verdict."""
    t = verdict.instances[0]
    i, j = (t.players.index(x) for x in verdict.witness["pair"])
    return sc_dominance(t, get_method(method)(t), i, j, verdict.params["respect_rounds"])


# --- dispatch and replay ----------------------------------------------------------

def check(axiom: str, method: MethodLike, *instances: Instance, **params) -> Verdict:
    """Run the checker for ``axiom`` with positional instances."""
    axiom = axiom.upper()
    if axiom == "SYM":
        return check_sym(method, *instances)
    if axiom == "INV":
        return check_inv(method, *instances)
    if axiom == "IIM":
        return check_iim(method, *instances)
    if axiom in ("OP", "SOP"):
        return check_op(method, *instances, strong=axiom == "SOP")
    if axiom == "SC":
        return check_sc(method, *instances, respect_rounds=params.get("respect_rounds", True))
    if axiom == "NEU":
        if "sigma" in params:
            return check_neu(method, *instances, params["sigma"])
        return check_all_generators("NEU", method, *instances)
    if axiom == "ANO":
        if "sigma" in params:
            return check_ano(method, *instances, params["sigma"])
        return check_all_generators("ANO", method, *instances)
    raise ValueError(f"unknown axiom {axiom!r}; known: {', '.join(AXIOMS)}")


def replay(verdict: Verdict, method: MethodLike | None = None) -> Verdict:
    """Re-run the checker on the verdict's own instances and parameters."""
    method = method or verdict.method
    params = {k: v for k, v in verdict.params.items() if k != "strong"}
    return check(verdict.axiom, method, *verdict.instances, **params)


def parse_record(line: str) -> dict[str, str]:
    return dict(tok.split("=", 1) for tok in shlex.split(line))


def verdicts_status(verdicts: Iterable[Verdict]) -> int:
    """Exit-status convention: 1 if any verdict failed, else 0."""
    return 1 if any(v.failed for v in verdicts) else 0
