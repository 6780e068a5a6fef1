"""Deletion-based extraction of one AXp or CXp, and feature necessity."""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .model import ExplanationProblem, UsageError
from .oracle import AXP, CXP, TreeOracle, XpOracle

ASCENDING = "ascending"
DESCENDING = "descending"

Order = Union[str, Sequence[int]]
Source = Union[ExplanationProblem, XpOracle]


def as_oracle(source: Source) -> XpOracle:
    if isinstance(source, XpOracle):
        return source
    if isinstance(source, ExplanationProblem):
        return TreeOracle(source)
    raise UsageError(f"expected an ExplanationProblem or an XpOracle, got {type(source).__name__}")


def traversal(order: Order, specified: frozenset) -> list[int]:
    """Feature visiting order over the specified features."""
    if order == ASCENDING:
        return sorted(specified)
    if order == DESCENDING:
        return sorted(specified, reverse=True)
    if isinstance(order, str):
        raise UsageError(f"unknown order {order!r}")
    seq = list(order)
    if len(seq) != len(specified) or set(seq) != specified:
        raise UsageError(f"explicit order {seq} is not a permutation of {sorted(specified)}")
    return seq


def shrink(
    oracle: XpOracle,
    kind: str,
    seed: Iterable[int],
    order: Order = ASCENDING,
    chain: list | None = None,
) -> frozenset:
    """Drop each element of ``seed`` whose removal keeps the predicate true.

    ``seed`` must satisfy the ``kind`` predicate.  One predicate call per
    seed element.  When ``chain`` is given, the working set after each step
    is appended to it, starting with the seed itself.
    """
    if kind not in (AXP, CXP):
        raise UsageError(f"unknown explanation kind {kind!r}")
    w = set(seed)
    if chain is not None:
        chain.append(frozenset(w))
    for i in traversal(order, oracle.specified):
        if i not in w:
            continue
        w.discard(i)
        if not oracle.holds(kind, w):
            w.add(i)
        if chain is not None:
            chain.append(frozenset(w))
    return frozenset(w)


def find_one_xp(
    source: Source,
    kind: str = AXP,
    order: Order = ASCENDING,
    chain: list | None = None,
) -> frozenset:
    """One AXp (or CXp) of the problem, extracted from the specified features.

    The seed is the specified set, so unspecified features are never
    queried and exactly ``|S|`` predicate calls are made.

    >>> find_one_xp(problem, "axp")               # doctest: +SKIP
    frozenset({4, 6})
    """
    oracle = as_oracle(source)
    if not oracle.specified:
        raise UsageError("problem has no specified features")
    return shrink(oracle, kind, oracle.specified, order, chain)


def is_necessary(source: Source, i: int) -> bool:
    """Whether feature ``i`` belongs to every AXp."""
    oracle = as_oracle(source)
    if i not in oracle.specified:
        raise UsageError(f"feature {i} is not specified")
    return not oracle.waxp_holds(oracle.specified - {i})
