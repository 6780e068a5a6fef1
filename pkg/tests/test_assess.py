import pytest

from conftest import FIXTURES, binary_space
from partialxp import (
    UNSPECIFIED,
    DecisionTree,
    ExplanationProblem,
    UsageError,
    ValueSplit,
    leaf,
    parse_model,
    split,
)
from partialxp.assess import INCONCLUSIVE, SUFFICIENT, assess
from partialxp.verify import brute_force_xps

VOMITING, HEADACHE, AGE, ZONE = 1, 2, 3, 4
SYMPTOMS = {VOMITING: 1, HEADACHE: 1}


@pytest.fixture(scope="module")
def tree():
    return parse_model((FIXTURES / "symptoms.model.json").read_text()).tree


def test_decisive_symptom_is_inconclusive():
    sp = binary_space(1, ("sick", "well"))
    t = DecisionTree(sp, [split(0, 1, ValueSplit(((1,), (0,))), [1, 2]), leaf(1, "sick"), leaf(2, "well")], 0)
    a = assess(t, 1, {1: 1})
    assert a.outcome == INCONCLUSIVE
    assert a.axp is None and not a.no_active_symptom
    assert a.instance.specified == frozenset()


def test_non_symptom_pair_forces_the_class(tree):
    a = assess(tree, "b0_md", SYMPTOMS)
    assert a.outcome == SUFFICIENT
    assert a.active_symptoms == {VOMITING}
    assert a.instance.values == (UNSPECIFIED, UNSPECIFIED, 0, 2)
    assert a.axp == {AGE, ZONE}
    assert a.no_active_symptom
    # every AXp of the assessed instance avoids the symptoms
    bf = brute_force_xps(ExplanationProblem(tree, a.instance, {"meningitis"}))
    assert bf.axps == {frozenset({AGE, ZONE})}


def test_empty_symptom_set_is_an_ordinary_explanation(tree):
    a = assess(tree, "b0_md", {})
    assert a.instance.values == (1, UNSPECIFIED, 0, 2)
    assert a.outcome == SUFFICIENT
    assert a.axp <= a.path_features == {VOMITING, AGE, ZONE}
    assert not a.no_active_symptom


def test_inactive_symptom_stays_fixed(tree):
    a = assess(tree, "a0_ok", SYMPTOMS)
    # headache=0 and vomiting=0 on this path: neither symptom is active
    assert a.active_symptoms == frozenset()
    assert a.instance.values == (0, 0, 0, 0)
    assert a.outcome == SUFFICIENT
    assert HEADACHE in a.axp


def test_symptom_needed_for_the_class(tree):
    a = assess(tree, "b_md", SYMPTOMS)
    assert a.active_symptoms == {VOMITING, HEADACHE}
    assert a.outcome == INCONCLUSIVE


def test_record(tree):
    rec = assess(tree, "b0_md", SYMPTOMS).as_record()
    assert rec["axp_names"] == ["age_band", "zone"]
    assert rec["instance"] == {"age_band": 0, "zone": 2}
    assert rec["active_symptoms"] == ["vomiting"]


def test_bad_arguments(tree):
    with pytest.raises(UsageError):
        assess(tree, "root", SYMPTOMS)
    with pytest.raises(UsageError):
        assess(tree, "nowhere", SYMPTOMS)
    with pytest.raises(UsageError):
        assess(tree, "b0_md", {9: 1})
