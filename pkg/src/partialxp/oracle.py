"""Weak-AXp / weak-CXp predicates behind one oracle interface.

``waxp_holds(W)``: fixing the features in ``W`` to their values in ``z``
(everything else free, unspecified features included) forces a prediction
inside the target set.  ``wcxp_holds(Y)``: freeing ``Y`` (and the
unspecified features) while fixing the rest of the specified features
admits a prediction outside the target set.  Both are answered by one
consistency query, so ``wcxp_holds(Y) == not waxp_holds(S - Y)``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import kernel
from .compiled import CompiledTree
from .model import (
    Categorical,
    ExplanationProblem,
    Integer,
    ModelError,
    UsageError,
)

AXP = "axp"
CXP = "cxp"


class OracleError(RuntimeError):
    """A scripted oracle received a query it has no answer for."""


class UnsupportedError(ValueError):
    """The query needs finite domains but the problem has a real feature."""


class XpOracle:
    """Base class: call counting and argument checks around two predicates.

    Subclasses implement ``_waxp`` and ``_wcxp`` over frozensets of feature ids.
    """

    def __init__(self, specified: Iterable[int]):
        self.specified = frozenset(specified)
        self.calls = Counter()

    @property
    def total_calls(self) -> int:
        return sum(self.calls.values())

    def _subset(self, s: Iterable[int], what: str) -> frozenset:
        s = frozenset(s)
        if not s <= self.specified:
            extra = sorted(s - self.specified)
            raise UsageError(f"{what} mentions non-specified features {extra}")
        return s

    def waxp_holds(self, w: Iterable[int]) -> bool:
        w = self._subset(w, "weak AXp query")
        self.calls[AXP] += 1
        return self._waxp(w)

    def wcxp_holds(self, y: Iterable[int]) -> bool:
        y = self._subset(y, "weak CXp query")
        self.calls[CXP] += 1
        return self._wcxp(y)

    def holds(self, kind: str, s: Iterable[int]) -> bool:
        if kind == AXP:
            return self.waxp_holds(s)
        if kind == CXP:
            return self.wcxp_holds(s)
        raise UsageError(f"unknown explanation kind {kind!r}")

    def _waxp(self, w: frozenset) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def _wcxp(self, y: frozenset) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError


class TreeOracle(XpOracle):
    """Predicates decided by one traversal of the (cell-compiled) tree per call.

    ``last_visits`` and ``max_visits`` record how many tree nodes the latest and
    the costliest query touched; neither can exceed ``len(problem.tree)``.
    """

    def __init__(self, problem: ExplanationProblem, compiled: CompiledTree | None = None):
        super().__init__(problem.specified)
        self.problem = problem
        self.ct = compiled if compiled is not None else CompiledTree(problem.tree)
        self._cells = self.ct.instance_cells(problem.z)
        self._off = self.ct.class_mask(frozenset(problem.space.classes) - problem.targets)
        self.last_visits = 0
        self.max_visits = 0

    def off_target_reachable(self, fixed: frozenset) -> bool:
        cells = [c if i in fixed else -1 for i, c in enumerate(self._cells, 1)]
        mask, visits = kernel.reach(self.ct, cells, self._off)
        self.last_visits = visits
        self.max_visits = max(self.max_visits, visits)
        return bool(mask & self._off)

    def _waxp(self, w):
        return not self.off_target_reachable(w)

    def _wcxp(self, y):
        return self.off_target_reachable(self.specified - y)


class ScriptedOracle(XpOracle):
    """Answers from fixed tables keyed by the queried set.

    ``axp`` and ``cxp`` map feature sets to predicate outcomes; a query that
    is absent from its table raises :class:`OracleError`.  ``log`` keeps
    ``(kind, set, outcome)`` for every query in order.
    """

    def __init__(
        self,
        specified: Iterable[int],
        axp: Mapping[Iterable[int], bool] | None = None,
        cxp: Mapping[Iterable[int], bool] | None = None,
    ):
        super().__init__(specified)
        self.tables = {
            AXP: {frozenset(k): bool(v) for k, v in (axp or {}).items()},
            CXP: {frozenset(k): bool(v) for k, v in (cxp or {}).items()},
        }
        self.log: list[tuple[str, frozenset, bool]] = []

    def _answer(self, kind, s):
        try:
            out = self.tables[kind][s]
        except KeyError:
            raise OracleError(f"unscripted {kind} query on {sorted(s)}") from None
        self.log.append((kind, s, out))
        return out

    def _waxp(self, w):
        return self._answer(AXP, w)

    def _wcxp(self, y):
        return self._answer(CXP, y)


def tree_oracle(problem: ExplanationProblem) -> TreeOracle:
    return TreeOracle(problem)


def waxp_holds(problem: ExplanationProblem, w: Iterable[int]) -> bool:
    return TreeOracle(problem).waxp_holds(w)


def wcxp_holds(problem: ExplanationProblem, y: Iterable[int]) -> bool:
    return TreeOracle(problem).wcxp_holds(y)


# ---------------------------------------------------------------------------
# Input constraints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    """``x[feature] in values``."""

    feature: int
    values: frozenset

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))


@dataclass(frozen=True)
class InputConstraint:
    """A CNF over finite-domain feature literals; the allowed points satisfy it.

    ``clauses`` is a tuple of clauses, each a tuple of :class:`Literal`.  No
    clauses means every point is allowed; an empty clause allows none.
    """

    clauses: tuple = ()

    def __post_init__(self):
        clauses = tuple(
            tuple(l if isinstance(l, Literal) else Literal(*l) for l in c)
            for c in self.clauses
        )
        object.__setattr__(self, "clauses", clauses)

    def validate(self, space) -> None:
        for clause in self.clauses:
            for lit in clause:
                dom = space.domain(lit.feature)
                if not dom.finite:
                    raise UnsupportedError(
                        f"constraint on real-valued feature {space.name(lit.feature)}"
                    )
                bad = [v for v in lit.values if v not in dom]
                if bad:
                    raise ModelError(
                        f"constraint values {bad!r} outside domain of {space.name(lit.feature)}"
                    )

    def allows(self, x) -> bool:
        return all(any(x[l.feature - 1] in l.values for l in c) for c in self.clauses)

    @property
    def features(self) -> frozenset:
        return frozenset(l.feature for c in self.clauses for l in c)


ENUMERATION_LIMIT = 10**6


def _cnf_satisfiable(clauses, domains: dict) -> bool:
    """Does some assignment from ``domains`` (feature -> value set) satisfy ``clauses``?

    Unit propagation first; whatever it leaves open is settled by enumerating
    the remaining domains.
    """
    domains = dict(domains)
    pending = list(clauses)
    changed = True
    while changed:
        changed = False
        still = []
        for clause in pending:
            open_lits = []
            satisfied = False
            for lit in clause:
                d = domains[lit.feature]
                if d <= lit.values:
                    satisfied = True
                    break
                if d & lit.values:
                    open_lits.append(lit)
            if satisfied:
                continue
            if not open_lits:
                return False
            if len({l.feature for l in open_lits}) == 1:
                f = open_lits[0].feature
                allowed = frozenset().union(*(l.values for l in open_lits))
                domains[f] = domains[f] & allowed
                changed = True
                continue
            still.append(clause)
        pending = still
    if not pending:
        return True
    feats = sorted({l.feature for c in pending for l in c})
    pools = [sorted(domains[f], key=repr) for f in feats]
    if math.prod(len(p) for p in pools) > ENUMERATION_LIMIT:
        raise UnsupportedError("constraint too large to settle by enumeration")
    pos = {f: k for k, f in enumerate(feats)}
    for combo in itertools.product(*pools):
        if all(any(combo[pos[l.feature]] in l.values for l in c) for c in pending):
            return True
    return False


def constrained_waxp(
    problem: ExplanationProblem, w: Iterable[int], constraint: InputConstraint
) -> bool:
    """Weak AXp check restricted to the points the constraint allows."""
    sp = problem.space
    constraint.validate(sp)
    w = frozenset(w)
    if not w <= problem.specified:
        raise UsageError(f"weak AXp query mentions non-specified features {sorted(w - problem.specified)}")
    ct = CompiledTree(problem.tree)
    cells = ct.instance_cells(problem.z)
    fixed = [c if i in w else -1 for i, c in enumerate(cells, 1)]
    feats = constraint.features
    for k, masks in ct.leaf_paths(fixed):
        if ct.space.classes[ct.label[k]] in problem.targets:
            continue
        domains = {f: frozenset(ct.cell_values(f - 1, masks[f - 1])) for f in feats}
        for f in feats:
            if f in w:
                domains[f] = domains[f] & {problem.z[f]}
        if _cnf_satisfiable(constraint.clauses, domains):
            return False
    return True


# ---------------------------------------------------------------------------
# Probabilistic explanations
# ---------------------------------------------------------------------------


def _require_finite(problem: ExplanationProblem) -> None:
    for i, d in enumerate(problem.space.domains, 1):
        if not isinstance(d, (Categorical, Integer)):
            raise UnsupportedError(f"feature {problem.space.name(i)} is real-valued")


def paxp_probability(problem: ExplanationProblem, x: Iterable[int]) -> Fraction:
    """Probability of a target-class prediction given ``x_X = z_X``.

    Every feature outside ``X`` (unspecified ones included) is uniform and
    independent over its domain.  Computed exactly by summing, over target
    leaves consistent with the conditioning, the product of per-feature
    admissible value counts.
    """
    _require_finite(problem)
    x = frozenset(x)
    if not x <= problem.specified:
        raise UsageError(f"conditioning set mentions non-specified features {sorted(x - problem.specified)}")
    ct = CompiledTree(problem.tree)
    cells = ct.instance_cells(problem.z)
    fixed = [c if i in x else -1 for i, c in enumerate(cells, 1)]
    hits = 0
    for k, masks in ct.leaf_paths(fixed):
        if ct.space.classes[ct.label[k]] not in problem.targets:
            continue
        n = 1
        for f, mask in enumerate(masks):
            n *= 1 if f + 1 in x else ct.cell_count(f, mask)
        hits += n
    total = math.prod(d.size() for i, d in enumerate(problem.space.domains, 1) if i not in x)
    return Fraction(hits, total)


def is_weak_paxp(problem: ExplanationProblem, x: Iterable[int], delta) -> bool:
    delta = Fraction(delta)
    if not 0 <= delta <= 1:
        raise UsageError(f"delta must lie in [0, 1], got {delta}")
    return paxp_probability(problem, x) >= delta
