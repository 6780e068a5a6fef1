"""Assessing a leaf's prediction once its active symptoms are withheld.

For a leaf, the root path is turned into a partial instance: path features
that are symptoms *and* active become unspecified, every other path feature
is fixed to a value consistent with the path, and features the path never
tests stay unspecified.  If the leaf class is still forced, an AXp of that
instance shows which fixed features carry the prediction.  An AXp that
avoids every symptom feature is flagged: the class is reachable without
any active symptom.  No flag is raised when no symptoms are declared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, Mapping

from .extract import find_one_xp
from .model import (
    UNSPECIFIED,
    DecisionTree,
    ExplanationProblem,
    PartialInstance,
    UsageError,
    _initial_region,
    _pick,
    _refine,
    is_sufficient,
)
from .oracle import AXP

SUFFICIENT = "sufficient"
INCONCLUSIVE = "inconclusive"

# (feature id, allowed region on the path, declared positive value) -> active?
ActivityPredicate = Callable[[int, Any, Any], bool]


def positive_value_active(feature: int, region, positive) -> bool:
    """Active when the path admits the symptom's positive value."""
    if isinstance(region, frozenset):
        return positive in region
    return region.contains(positive)


@dataclass(frozen=True)
class Assessment:
    leaf: Hashable
    leaf_class: Hashable
    instance: PartialInstance
    path_features: frozenset
    active_symptoms: frozenset
    outcome: str
    axp: frozenset | None
    no_active_symptom: bool

    def as_record(self) -> dict:
        sp = self.instance.space
        return {
            "leaf": self.leaf,
            "class": self.leaf_class,
            "outcome": self.outcome,
            "active_symptoms": [sp.name(i) for i in sorted(self.active_symptoms)],
            "instance": {
                sp.name(i): self.instance[i] for i in sorted(self.instance.specified)
            },
            "axp": None if self.axp is None else sorted(self.axp),
            "axp_names": None if self.axp is None else [sp.name(i) for i in sorted(self.axp)],
            "no_active_symptom": self.no_active_symptom,
        }


def assess(
    tree: DecisionTree,
    leaf_id: Hashable,
    symptoms: Mapping[int, Any],
    is_active: ActivityPredicate = positive_value_active,
) -> Assessment:
    """Assess leaf ``leaf_id``; ``symptoms`` maps feature id to its positive value."""
    sp = tree.space
    for f in symptoms:
        sp.domain(f)
    try:
        node = tree.node(leaf_id)
    except KeyError:
        raise UsageError(f"no node {leaf_id!r}") from None
    if not node.is_leaf:
        raise UsageError(f"node {leaf_id!r} is not a leaf")

    regions = [_initial_region(d, UNSPECIFIED) for d in sp.domains]
    for n, k in tree.path_to(leaf_id):
        f = n.feature - 1
        regions[f] = _refine(regions[f], sp.domains[f], n.test, k)
    on_path = frozenset(n.feature for n, _ in tree.path_to(leaf_id))

    active = frozenset(
        f for f in on_path if f in symptoms and is_active(f, regions[f - 1], symptoms[f])
    )
    values = [UNSPECIFIED] * sp.m
    for f in on_path - active:
        values[f - 1] = _pick(regions[f - 1], sp.domains[f - 1])
    z = PartialInstance(sp, tuple(values))

    targets = frozenset([node.label])
    if not is_sufficient(tree, z, targets):
        return Assessment(leaf_id, node.label, z, on_path, active, INCONCLUSIVE, None, False)
    axp = find_one_xp(ExplanationProblem(tree, z, targets), AXP)
    # with no symptoms declared there is nothing to withhold, so no flag
    flag = bool(symptoms) and not (axp & frozenset(symptoms))
    return Assessment(leaf_id, node.label, z, on_path, active, SUFFICIENT, axp, flag)

