import itertools
import random
from pathlib import Path

import pytest

from partialxp import (
    UNSPECIFIED,
    Categorical,
    DecisionTree,
    ExplanationProblem,
    FeatureSpace,
    PartialInstance,
    ScriptedOracle,
    ValueSplit,
    leaf,
    split,
)

FIXTURES = Path(__file__).parent / "fixtures"

# Predicate outcomes of the four-feature worked example: S = {1, 2, 4, 6},
# AXp's {4, 6} and {1, 4}, CXp's {4} and {1, 6}.
EX4_SPECIFIED = frozenset({1, 2, 4, 6})
EX4_AXPS = [frozenset({4, 6}), frozenset({1, 4})]
EX4_CXPS = [frozenset({4}), frozenset({1, 6})]


def _subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


def example4_oracle() -> ScriptedOracle:
    axp = {s: any(a <= s for a in EX4_AXPS) for s in _subsets(EX4_SPECIFIED)}
    cxp = {s: any(c <= s for c in EX4_CXPS) for s in _subsets(EX4_SPECIFIED)}
    return ScriptedOracle(EX4_SPECIFIED, axp=axp, cxp=cxp)


@pytest.fixture
def ex4_oracle():
    return example4_oracle()


@pytest.fixture
def model_path():
    return str(FIXTURES / "six_features.model.json")


@pytest.fixture
def query_path():
    return str(FIXTURES / "six_features.query.json")


def binary_space(m, classes=("no", "yes")):
    return FeatureSpace(tuple(Categorical((0, 1)) for _ in range(m)), classes)


def xor_tree():
    """yes iff x1 != x2, over three binary features (x3 unused)."""
    sp = binary_space(3)
    b = ValueSplit(((0,), (1,)))
    nodes = [
        split(0, 1, b, [1, 2]),
        split(1, 2, b, [3, 4]),
        split(2, 2, b, [5, 6]),
        leaf(3, "no"),
        leaf(4, "yes"),
        leaf(5, "yes"),
        leaf(6, "no"),
    ]
    return DecisionTree(sp, nodes, 0)


def instance(space, *values):
    return PartialInstance(space, tuple(UNSPECIFIED if v is None else v for v in values))


@pytest.fixture
def rng():
    return random.Random(20240601)


# One line per acceptance criterion, printed at the end of the session.
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
