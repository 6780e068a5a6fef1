"""Joint enumeration of all AXp's and CXp's, feature relevancy, MHS duality.

Selector ``u_i`` is true when specified feature ``i`` is *freed*.  Each
model of the selector formula splits the specified features into the freed
set ``Q`` and the fixed set ``R``.  If freeing ``Q`` admits an off-target
prediction, ``Q`` shrinks to a CXp ``P`` blocked by ``(-u_i for i in P)``;
otherwise ``R`` is a weak AXp, shrinks to an AXp ``P`` blocked by
``(u_i for i in P)``.  The loop stops when the formula is unsatisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .extract import ASCENDING, Source, as_oracle, shrink
from .model import UsageError
from .oracle import AXP, CXP
from .sat import PREFER_TRUE, SelectorFormula, sat_solve


@dataclass(frozen=True)
class Step:
    """One iteration: the model, its split, the CXp test and the new clause."""

    assignment: dict
    fixed: frozenset
    freed: frozenset
    freed_is_wcxp: bool
    kind: str
    explanation: frozenset
    clause: tuple


@dataclass
class XpReport:
    """Explanations in discovery order, with the trace that produced them."""

    entries: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    clauses: list = field(default_factory=list)

    @property
    def axps(self) -> set:
        return {s for k, s in self.entries if k == AXP}

    @property
    def cxps(self) -> set:
        return {s for k, s in self.entries if k == CXP}

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def iter_xps(source: Source, bias: str = PREFER_TRUE) -> Iterator[Step]:
    """Yield enumeration steps as explanations are discovered."""
    oracle = as_oracle(source)
    spec = oracle.specified
    formula = SelectorFormula(tuple(spec), bias=bias)
    while True:
        ok, u = sat_solve(formula)
        if not ok:
            return
        freed = frozenset(i for i in spec if u[i])
        fixed = spec - freed
        if oracle.wcxp_holds(freed):
            p = shrink(oracle, CXP, freed, ASCENDING)
            kind, clause = CXP, tuple(-i for i in sorted(p))
        else:
            p = shrink(oracle, AXP, fixed, ASCENDING)
            kind, clause = AXP, tuple(sorted(p))
        formula.add(clause)
        yield Step(dict(u), fixed, freed, kind == CXP, kind, p, clause)


def enumerate_xps(source: Source, bias: str = PREFER_TRUE) -> XpReport:
    """All AXp's and CXp's of the problem, each exactly once."""
    report = XpReport()
    for step in iter_xps(source, bias):
        report.entries.append((step.kind, step.explanation))
        report.steps.append(step)
        report.clauses.append(step.clause)
    return report


def _relevancy_witness(oracle, i: int) -> frozenset | None:
    spec = oracle.specified
    if i not in spec:
        raise UsageError(f"feature {i} is not specified")
    formula = SelectorFormula(tuple(spec))
    while True:
        ok, u = sat_solve(formula, {i: False})
        if not ok:
            return None
        freed = frozenset(j for j in spec if u[j])
        if oracle.wcxp_holds(freed):
            p = shrink(oracle, CXP, freed, ASCENDING)
            formula.add(tuple(-j for j in sorted(p)))
            continue
        if oracle.wcxp_holds(freed | {i}):
            return spec - freed
        p = shrink(oracle, AXP, spec - freed - {i}, ASCENDING)
        formula.add(tuple(sorted(p)))


def is_relevant(source: Source, i: int) -> bool:
    """Whether feature ``i`` occurs in some AXp.

    Searches for a weak AXp ``R`` containing ``i`` such that ``R - {i}`` is
    not weak; shrinking such an ``R`` never drops ``i``.  Every model keeps
    ``i`` fixed (``u_i`` false).  Freed sets that are weak CXp's are blocked
    by the CXp they contain; fixed sets in which ``i`` is redundant are
    blocked by an AXp avoiding ``i``.  Neither block can hide a witness.
    """
    return _relevancy_witness(as_oracle(source), i) is not None


def relevant_axp(source: Source, i: int) -> frozenset | None:
    """An AXp containing ``i``, or None when ``i`` is irrelevant."""
    oracle = as_oracle(source)
    witness = _relevancy_witness(oracle, i)
    if witness is None:
        return None
    return shrink(oracle, AXP, witness, ASCENDING)


def is_hitting_set(h: Iterable[int], family: Iterable[Iterable[int]]) -> bool:
    h = set(h)
    return all(h & set(s) for s in family)


def is_minimal_hitting_set(h: Iterable[int], family: Iterable[Iterable[int]]) -> bool:
    family = [frozenset(s) for s in family]
    h = frozenset(h)
    if not is_hitting_set(h, family):
        return False
    # hitting is monotone, so single-element removals decide minimality
    return all(not is_hitting_set(h - {e}, family) for e in h)


def check_mhs_duality(axps: Iterable[Iterable[int]], cxps: Iterable[Iterable[int]]) -> bool:
    """Each AXp is a minimal hitting set of the CXp's and vice versa."""
    axps = [frozenset(s) for s in axps]
    cxps = [frozenset(s) for s in cxps]
    return all(is_minimal_hitting_set(a, cxps) for a in axps) and all(
        is_minimal_hitting_set(c, axps) for c in cxps
    )
