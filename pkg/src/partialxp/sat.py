"""A small DPLL solver over selector variables.

Clauses are tuples of signed integers (``4`` is u4, ``-4`` is not u4).
Decisions take variables in descending order and try the preferred
polarity first; unit propagation runs before every decision.  The clause
sets met during explanation enumeration hold one clause per explanation,
so no clause learning is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

PREFER_TRUE = "pos"
PREFER_FALSE = "neg"


@dataclass
class SelectorFormula:
    """Selector variables, the clause set and the polarity bias."""

    variables: tuple
    clauses: list = field(default_factory=list)
    bias: str = PREFER_TRUE

    def __post_init__(self):
        self.variables = tuple(sorted(self.variables))
        if self.bias not in (PREFER_TRUE, PREFER_FALSE):
            raise ValueError(f"unknown polarity bias {self.bias!r}")
        clauses, self.clauses = self.clauses, []
        for c in clauses:
            self.add(c)

    def add(self, clause: Iterable[int]) -> tuple:
        clause = tuple(clause)
        known = set(self.variables)
        for lit in clause:
            if abs(lit) not in known or lit == 0:
                raise ValueError(f"literal {lit} is not over the selector variables")
        self.clauses.append(clause)
        return clause


def _propagate(clauses, assign: dict) -> bool:
    """Extend ``assign`` by unit propagation; False on a conflict."""
    changed = True
    while changed:
        changed = False
        for clause in clauses:
            unassigned = None
            n_open = 0
            satisfied = False
            for lit in clause:
                val = assign.get(abs(lit))
                if val is None:
                    n_open += 1
                    unassigned = lit
                elif val == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if n_open == 0:
                return False
            if n_open == 1:
                assign[abs(unassigned)] = unassigned > 0
                changed = True
    return True


def sat_solve(
    formula: SelectorFormula, assumptions: Mapping[int, bool] | None = None
) -> tuple[bool, dict | None]:
    """``(True, assignment)`` for a total model honouring the bias, else ``(False, None)``.

    ``assumptions`` fixes some variables for this call only.
    """
    prefer = formula.bias == PREFER_TRUE
    order = sorted(formula.variables, reverse=True)
    clauses = formula.clauses

    def search(assign: dict) -> dict | None:
        if not _propagate(clauses, assign):
            return None
        for v in order:
            if v not in assign:
                break
        else:
            return assign
        for value in (prefer, not prefer):
            trial = dict(assign)
            trial[v] = value
            out = search(trial)
            if out is not None:
                return out
        return None

    start = dict(assumptions or {})
    for v in start:
        if v not in formula.variables:
            raise ValueError(f"assumption on unknown variable {v}")
    model = search(start)
    if model is None:
        return False, None
    return True, {v: model[v] for v in formula.variables}
