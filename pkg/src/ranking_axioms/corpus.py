"""Exhaustive sweeps over every small ranking problem at once.

For aggregate methods a verdict only depends on the aggregated problem, so
the exhaustive corpus of tournaments with ``n`` players and up to ``rounds``
rounds collapses to a table of distinct ``(R, M)`` pairs.  Each pair slot
takes one of a few states ``(r, m)``; a problem is a mixed-radix code over
its slot states.  Methods are scored once for the whole table with numpy,
then every axiom becomes a vectorised comparison over table lookups.

Every FAIL found here is replayed through the single-instance checkers in
:mod:`ranking_axioms.axioms`, so the table only decides where to look.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from . import exact
from .axioms import Verdict, check_iim, check_inv, check_neu, check_op, check_sym, player_generators
from .core import RankingProblem
from .methods import EIGEN_EPSILON, EIGEN_TOLERANCE, get_method, power_iteration
from .search import DEFAULT_ALPHABET, _alphabet, _labels

__all__ = ["BATCH_SCORERS", "BatchScores", "ProblemTable", "SweepResult", "sweep"]


class BatchScores(NamedTuple):
    """Scores for every table entry.

    Row ``b`` equals the method's scores on problem ``b`` multiplied by the
    positive factor ``scale[b]``, which keeps exact values integral.
    """

    values: np.ndarray
    scale: np.ndarray
    tolerance: float = 0.0
    valid: Optional[np.ndarray] = None

    def exact_row(self, b: int) -> tuple:
        if self.tolerance:
            return tuple(float(v) for v in self.values[b])
        return tuple(Fraction(int(v), int(self.scale[b])) for v in self.values[b])


class ProblemTable:
    """All aggregates of tournaments with ``n`` players and at most ``rounds`` rounds."""

    def __init__(self, n: int, rounds: int = 2, alphabet=DEFAULT_ALPHABET) -> None:
        self.n = n
        self.rounds = rounds
        self.alphabet = _alphabet(alphabet)
        states = set()
        for size in range(rounds + 1):
            for combo in itertools.combinations_with_replacement(self.alphabet, size):
                states.add((sum((2 * t - 1 for t in combo), Fraction(0)), size))
        self.states: list[tuple[Fraction, int]] = sorted(states, key=lambda s: (s[1], s[0]))
        self.S = len(self.states)
        self.scale = math.lcm(*(r.denominator for r, _ in self.states))
        self.index = {s: k for k, s in enumerate(self.states)}
        self.neg = np.array([self.index[(-r, m)] for r, m in self.states])
        self.r_int = np.array([int(r * self.scale) for r, _ in self.states], dtype=np.int64)
        self.m_int = np.array([m for _, m in self.states], dtype=np.int64)
        self.single = [k for k, (r, m) in enumerate(self.states) if m <= 1]
        add = np.full((self.S, self.S), -1)
        for a, (ra, ma) in enumerate(self.states):
            for b, (rb, mb) in enumerate(self.states):
                add[a, b] = self.index.get((ra + rb, ma + mb), -1)
        self.add = add
        self.slots = list(itertools.combinations(range(n), 2))
        self.P = len(self.slots)
        self.slot_of = {s: k for k, s in enumerate(self.slots)}
        self.weights = self.S ** np.arange(self.P - 1, -1, -1, dtype=np.int64)
        self.size = self.S ** self.P
        self.digits = np.indices((self.S,) * self.P).reshape(self.P, self.size).T.astype(np.int64)

    def codes(self, digits: np.ndarray) -> np.ndarray:
        return digits @ self.weights

    @cached_property
    def R(self) -> np.ndarray:
        R = np.zeros((self.size, self.n, self.n), dtype=np.int64)
        for k, (i, j) in enumerate(self.slots):
            R[:, i, j] = self.r_int[self.digits[:, k]]
            R[:, j, i] = -R[:, i, j]
        return R

    @cached_property
    def M(self) -> np.ndarray:
        M = np.zeros((self.size, self.n, self.n), dtype=np.int64)
        for k, (i, j) in enumerate(self.slots):
            M[:, i, j] = M[:, j, i] = self.m_int[self.digits[:, k]]
        return M

    def problem(self, code: int) -> RankingProblem:
        n = self.n
        R = [[Fraction(0)] * n for _ in range(n)]
        M = [[0] * n for _ in range(n)]
        for k, (i, j) in enumerate(self.slots):
            r, m = self.states[self.digits[code, k]]
            R[i][j], R[j][i] = r, -r
            M[i][j] = M[j][i] = m
        return RankingProblem(_labels(n), R, M)

    def code_of(self, p: RankingProblem) -> int:
        return int(sum(self.index[(p.R[i][j], p.M[i][j])] * int(w)
                       for (i, j), w in zip(self.slots, self.weights)))

    @cached_property
    def negated(self) -> np.ndarray:
        return self.codes(self.neg[self.digits])

    def permuted(self, sigma: Sequence[int]) -> np.ndarray:
        """Code of the relabelled problem for every entry (``sigma[i]`` is the new index of ``i``)."""
        inv = [0] * self.n
        for i, s in enumerate(sigma):
            inv[s] = i
        cols = []
        for a, b in self.slots:
            i, j = inv[a], inv[b]
            if i < j:
                cols.append(self.digits[:, self.slot_of[(i, j)]])
            else:
                cols.append(self.neg[self.digits[:, self.slot_of[(j, i)]]])
        return self.codes(np.stack(cols, axis=1)) if cols else np.zeros(self.size, dtype=np.int64)

    @cached_property
    def draw_only(self) -> np.ndarray:
        zero_r = np.array([r == 0 for r, _ in self.states])
        return zero_r[self.digits].all(axis=1) if self.P else np.ones(self.size, dtype=bool)

    @cached_property
    def single_round_codes(self) -> np.ndarray:
        """Entries that a single round can produce, in enumeration order."""
        ok = np.isin(self.digits, self.single).all(axis=1) if self.P else np.ones(1, dtype=bool)
        return np.flatnonzero(ok)

    @cached_property
    def regular(self) -> np.ndarray:
        deg = self.M.sum(axis=2)
        return (deg == deg[:, :1]).all(axis=1)


# --- vectorised scorers --------------------------------------------------------

def _const_scale(table: ProblemTable, scale: int = None) -> np.ndarray:
    return np.full(table.size, table.scale if scale is None else scale, dtype=np.int64)


def batch_score(table: ProblemTable) -> BatchScores:
    return BatchScores(table.R.sum(axis=2), _const_scale(table))


def batch_prev_player(table: ProblemTable) -> BatchScores:
    return BatchScores(np.roll(table.R.sum(axis=2), 1, axis=1), _const_scale(table))


def batch_max_other_matches(table: ProblemTable) -> BatchScores:
    deg = table.M.sum(axis=2)
    n = table.n
    if n == 1:
        return BatchScores(np.zeros((table.size, 1), dtype=np.int64), _const_scale(table, 1))
    cols = [np.delete(deg, i, axis=1).max(axis=1) for i in range(n)]
    return BatchScores(np.stack(cols, axis=1), _const_scale(table, 1))


def batch_opp_aggregate(table: ProblemTable) -> BatchScores:
    s = table.R.sum(axis=2)
    return BatchScores(np.einsum("bij,bj->bi", table.M, s), _const_scale(table))


def batch_index(table: ProblemTable) -> BatchScores:
    vals = np.broadcast_to(np.arange(table.n - 1, -1, -1), (table.size, table.n)).copy()
    return BatchScores(vals, _const_scale(table, 1))


def batch_least_squares(table: ProblemTable) -> BatchScores:
    """Exact least-squares ratings via one rational solve operator per distinct ``M``.

    On each connected component the zero-sum solution is ``(L_C + J/c)^-1 d``;
    the operator is scaled to integers by the lcm of its denominators.
    """
    n = table.n
    d = table.R.sum(axis=2)
    m_digits = table.m_int[table.digits]
    m_codes = m_digits @ ((table.rounds + 1) ** np.arange(table.P - 1, -1, -1, dtype=np.int64))
    values = np.zeros((table.size, n), dtype=np.int64)
    scale = np.ones(table.size, dtype=np.int64)
    for mc in np.unique(m_codes):
        rows = np.flatnonzero(m_codes == mc)
        M = table.M[rows[0]].tolist()
        op = [[Fraction(0)] * n for _ in range(n)]
        for comp in exact.components(M):
            if len(comp) == 1:
                continue
            c = len(comp)
            sys_ = [[(sum(M[a]) if a == b else -M[a][b]) + Fraction(1, c) for b in comp] for a in comp]
            inv = exact.inverse(sys_)
            for x, a in enumerate(comp):
                for y, b in enumerate(comp):
                    op[a][b] = inv[x][y]
        den = math.lcm(*(x.denominator for row in op for x in row))
        op_int = np.array([[int(x * den) for x in row] for row in op], dtype=np.int64)
        values[rows] = d[rows] @ op_int.T
        scale[rows] = den * table.scale
    return BatchScores(values, scale)


def batch_eigenvector(table: ProblemTable) -> BatchScores:
    n = table.n
    A = (table.R / table.scale + table.M) / 2.0
    A = A + float(EIGEN_EPSILON) * (1 - np.eye(n))
    x, ok = power_iteration(A)
    return BatchScores(x, np.ones(table.size), EIGEN_TOLERANCE, ok)


BATCH_SCORERS: dict[str, Callable[[ProblemTable], BatchScores]] = {
    "score": batch_score,
    "least-squares": batch_least_squares,
    "eigenvector": batch_eigenvector,
    "prev-player": batch_prev_player,
    "max-other-matches": batch_max_other_matches,
    "opp-aggregate": batch_opp_aggregate,
    "index": batch_index,
}


# --- vectorised comparisons ---------------------------------------------------------

def _cmp(x: np.ndarray, y: np.ndarray, tol: float) -> np.ndarray:
    d = x - y
    if tol:
        return np.where(np.abs(d) <= tol, 0, np.sign(d)).astype(np.int8)
    return np.sign(d).astype(np.int8)


@dataclass
class SweepResult:
    axiom: str
    method: str
    n: int
    checked: int = 0
    violations: int = 0
    witnesses: list = field(default_factory=list)
    skipped: int = 0
    strict_exceptions: int = 0
    pairs: list = field(default_factory=list)

    @property
    def first(self) -> Optional[Verdict]:
        return self.witnesses[0] if self.witnesses else None


class Sweeper:
    """Runs the vectorised axiom sweeps of one method over one table."""

    def __init__(self, table: ProblemTable, method: str, max_witnesses: int = 1) -> None:
        self.table = table
        self.method = get_method(method)
        if self.method.name not in BATCH_SCORERS:
            raise KeyError(f"no vectorised scorer for {self.method.name}")
        self.scores = BATCH_SCORERS[self.method.name](table)
        self.F = self.scores.values
        self.tol = self.scores.tolerance
        self.valid = self.scores.valid if self.scores.valid is not None else np.ones(table.size, bool)
        self.max_witnesses = max_witnesses

    def _result(self, axiom: str) -> SweepResult:
        return SweepResult(axiom, self.method.name, self.table.n)

    def _keep(self, res: SweepResult, verdict: Verdict) -> None:
        if not verdict.failed:
            raise AssertionError(f"table sweep flagged an instance the checker passes: {verdict.record()}")
        res.witnesses.append(verdict)

    def sym(self, collect: bool = False) -> SweepResult:
        res = self._result("SYM")
        idx = np.flatnonzero(self.table.draw_only & self.valid)
        F = self.F[idx]
        bad = np.zeros(idx.size, dtype=bool)
        for i, j in itertools.combinations(range(self.table.n), 2):
            bad |= _cmp(F[:, i], F[:, j], self.tol) != 0
        res.checked, res.violations = idx.size, int(bad.sum())
        res.skipped = int((~self.valid).sum())
        if collect:
            res.pairs = [int(b) for b in idx[bad]]
        for b in idx[bad][: self.max_witnesses]:
            self._keep(res, check_sym(self.method, self.table.problem(int(b))))
        return res

    def inv_violated(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        F, G = self.F[codes], self.F[self.table.negated[codes]]
        bad = np.zeros(codes.size, dtype=bool)
        for i, j in itertools.permutations(range(self.table.n), 2):
            bad |= (_cmp(F[:, i], F[:, j], self.tol) >= 0) != (_cmp(G[:, i], G[:, j], self.tol) <= 0)
        return bad

    def inv(self) -> SweepResult:
        """INV sweep; also counts strict-order exceptions on the passing entries."""
        res = self._result("INV")
        neg = self.table.negated
        ok = self.valid & self.valid[neg]
        G = self.F[neg]
        bad = np.zeros(self.table.size, dtype=bool)
        strict_bad = np.zeros(self.table.size, dtype=bool)
        for i, j in itertools.permutations(range(self.table.n), 2):
            cf = _cmp(self.F[:, i], self.F[:, j], self.tol)
            cg = _cmp(G[:, i], G[:, j], self.tol)
            bad |= (cf >= 0) != (cg <= 0)
            strict_bad |= (cf > 0) != (cg < 0)
        bad &= ok
        res.checked, res.violations = int(ok.sum()), int(bad.sum())
        res.skipped = int((~ok).sum())
        res.strict_exceptions = int((strict_bad & ok & ~bad).sum())
        for b in np.flatnonzero(bad)[: self.max_witnesses]:
            self._keep(res, check_inv(self.method, self.table.problem(int(b))))
        return res

    def neu(self) -> SweepResult:
        res = self._result("NEU")
        found = np.zeros(self.table.size, dtype=bool)
        first: dict[int, tuple[int, ...]] = {}
        for sigma in player_generators(self.table.n):
            moved = self.table.permuted(sigma)
            ok = self.valid & self.valid[moved]
            G = self.F[moved]
            bad = np.zeros(self.table.size, dtype=bool)
            for i in range(self.table.n):
                bad |= _cmp(self.F[:, i], G[:, sigma[i]], self.tol) != 0
            bad &= ok
            for b in np.flatnonzero(bad & ~found)[: self.max_witnesses]:
                first.setdefault(int(b), sigma)
            found |= bad
            res.checked += int(ok.sum())
        res.violations = int(found.sum())
        for b in sorted(first)[: self.max_witnesses]:
            self._keep(res, check_neu(self.method, self.table.problem(b), first[b]))
        return res

    def op(self, strong: bool, collect: bool = False) -> SweepResult:
        """OP/SOP over every split two-round tournament, i.e. all ordered pairs of one-round problems.

        With ``collect`` the failing ``(a, b)`` code pairs are kept in ``res.pairs``.
        """
        t = self.table
        res = self._result("SOP" if strong else "OP")
        singles = t.single_round_codes
        dig = t.digits[singles]
        reg = t.regular[singles]
        Fs = self.F[singles]
        vs = self.valid[singles]
        pairs = list(itertools.permutations(range(t.n), 2))
        for ai, a in enumerate(singles):
            if not strong and not reg[ai]:
                continue
            sum_codes = t.codes(t.add[dig[ai][None, :], dig])
            mask = vs[ai] & vs & self.valid[sum_codes]
            if not strong:
                mask &= reg
            Fa, Fb, Fsum = self.F[a], Fs, self.F[sum_codes]
            bad = np.zeros(singles.size, dtype=bool)
            for i, j in pairs:
                ca = _cmp(Fa[i], Fa[j], self.tol)
                cb = _cmp(Fb[:, i], Fb[:, j], self.tol)
                cs = _cmp(Fsum[:, i], Fsum[:, j], self.tol)
                pre = (ca >= 0) & (cb >= 0)
                bad |= pre & ((cs < 0) | (((ca > 0) | (cb > 0)) & (cs == 0)))
            bad &= mask
            res.checked += int(mask.sum())
            res.violations += int(bad.sum())
            if collect and bad.any():
                res.pairs.extend((int(a), int(c)) for c in singles[bad])
            for b in np.flatnonzero(bad):
                if len(res.witnesses) >= self.max_witnesses:
                    break
                self._keep(res, check_op(self.method, t.problem(int(a)), t.problem(int(singles[b])), strong))
        return res

    def sop_violated(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Strong order preservation violated on each pair ``(a[k], b[k])``, with no precondition."""
        t = self.table
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        total = t.codes(t.add[t.digits[a], t.digits[b]])
        Fa, Fb, Fs = self.F[a], self.F[b], self.F[total]
        bad = np.zeros(a.size, dtype=bool)
        for i, j in itertools.permutations(range(t.n), 2):
            ca = _cmp(Fa[:, i], Fa[:, j], self.tol)
            cb = _cmp(Fb[:, i], Fb[:, j], self.tol)
            cs = _cmp(Fs[:, i], Fs[:, j], self.tol)
            bad |= (ca >= 0) & (cb >= 0) & ((cs < 0) | (((ca > 0) | (cb > 0)) & (cs == 0)))
        return bad

    def iim(self) -> SweepResult:
        t = self.table
        res = self._result("IIM")
        if t.n < 4:
            return res
        for k, (kk, ll) in enumerate(t.slots):
            others = [x for x in range(t.n) if x not in (kk, ll)]
            pairs = list(itertools.permutations(others, 2))
            for v in t.single:
                d = t.digits[:, k]
                change = d != v
                q = np.arange(t.size) + (v - d) * t.weights[k]
                ok = change & self.valid & self.valid[q]
                Fq = self.F[q]
                bad = np.zeros(t.size, dtype=bool)
                for i, j in pairs:
                    cp = _cmp(self.F[:, i], self.F[:, j], self.tol)
                    cq = _cmp(Fq[:, i], Fq[:, j], self.tol)
                    bad |= ((cp >= 0) & (cq < 0)) | ((cq >= 0) & (cp < 0))
                bad &= ok
                res.checked += int(ok.sum())
                res.violations += int(bad.sum())
                for b in np.flatnonzero(bad):
                    if len(res.witnesses) >= self.max_witnesses:
                        break
                    self._keep(res, check_iim(self.method, t.problem(int(b)), t.problem(int(q[b]))))
        return res

    def implication_checks(self, replay: int = 20) -> dict[str, int]:
        """Exception counts for the three implications between axiom failures.

        ``sym->inv``: SYM failures that pass INV.  ``op->sop``: weak OP
        failures that are not strong failures.  ``inv-strict``: INV passes
        where the strict order is not reversed.  ``replay`` entries of each
        failure list are also pushed through the single-instance checkers.
        """
        t = self.table
        sym = self.sym(collect=True)
        sym_codes = np.array(sym.pairs, dtype=np.int64)
        out = {"sym-failures": len(sym_codes)}
        out["sym->inv"] = int((~self.inv_violated(sym_codes)).sum()) if sym_codes.size else 0
        for b in sym_codes[:replay]:
            out["sym->inv"] += not check_inv(self.method, t.problem(int(b))).failed
        op = self.op(strong=False, collect=True)
        out["op-failures"] = len(op.pairs)
        if op.pairs:
            a, b = np.array(op.pairs, dtype=np.int64).T
            out["op->sop"] = int((~self.sop_violated(a, b)).sum())
            for x, y in op.pairs[:replay]:
                out["op->sop"] += not check_op(self.method, t.problem(x), t.problem(y), strong=True).failed
        else:
            out["op->sop"] = 0
        out["inv-strict"] = self.inv().strict_exceptions
        return out

    def run(self, axiom: str) -> SweepResult:
        axiom = axiom.upper()
        if axiom in ("OP", "SOP"):
            return self.op(strong=axiom == "SOP")
        return getattr(self, axiom.lower())()


_TABLES: dict[tuple, ProblemTable] = {}


def table(n: int, rounds: int = 2, alphabet=DEFAULT_ALPHABET) -> ProblemTable:
    key = (n, rounds, _alphabet(alphabet))
    if key not in _TABLES:
        _TABLES[key] = ProblemTable(n, rounds, alphabet)
    return _TABLES[key]


def sweep(method: str, axiom: str, max_n: int = 4, rounds: int = 2, alphabet=DEFAULT_ALPHABET,
          max_witnesses: int = 1) -> list[SweepResult]:
    """Sweep ``axiom`` for ``method`` over every player count ``1..max_n``."""
    return [Sweeper(table(n, rounds, alphabet), method, max_witnesses).run(axiom)
            for n in range(1, max_n + 1)]
