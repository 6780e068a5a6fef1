"""Abductive and contrastive explanations of decision trees on partially specified inputs."""

from .assess import Assessment, assess
from .compiled import CompiledTree
from .documents import (
    DocumentError,
    Query,
    parse_model,
    parse_query,
    serialize_model,
    serialize_query,
)
from .enumeration import (
    XpReport,
    check_mhs_duality,
    enumerate_xps,
    is_hitting_set,
    is_minimal_hitting_set,
    is_relevant,
    iter_xps,
    relevant_axp,
)
from .extract import ASCENDING, DESCENDING, find_one_xp, is_necessary, shrink
from .kernel import BACKEND
from .model import (
    UNSPECIFIED,
    Categorical,
    DecisionTree,
    DomainError,
    ExplanationProblem,
    FeatureSpace,
    Integer,
    ModelError,
    Node,
    PartialInstance,
    Real,
    Threshold,
    UsageError,
    ValueSplit,
    covers,
    evaluate,
    is_sufficient,
    leaf,
    prediction_set,
    split,
    witness,
)
from .oracle import (
    AXP,
    CXP,
    InputConstraint,
    Literal,
    OracleError,
    ScriptedOracle,
    TreeOracle,
    UnsupportedError,
    XpOracle,
    constrained_waxp,
    is_weak_paxp,
    paxp_probability,
    waxp_holds,
    wcxp_holds,
)
from .sat import PREFER_FALSE, PREFER_TRUE, SelectorFormula, sat_solve

__version__ = "0.1.0"
