"""JSON documents for models, queries and explanation reports.

Model document::

    {"format": "partialxp-model", "version": 1,
     "features": [{"name": "HCT", "domain": {"type": "real", "lo": 0, "hi": 100}},
                  {"name": "Sex", "domain": {"type": "categorical", "values": [0, 1]}}],
     "classes": [{"name": "negative", "number": 1}, "positive"],
     "root": 0,
     "nodes": [{"id": 0, "kind": "split", "feature": "HCT",
                "test": {"type": "threshold", "value": 40.0}, "children": [1, 2]},
               {"id": 1, "kind": "leaf", "class": "negative"}, ...]}

Threshold splits send ``x <= value`` to the first child.  Value splits
carry ``{"type": "values", "groups": [[...], [...]]}``, one group per child.

Query document::

    {"format": "partialxp-query", "version": 1,
     "instance": {"HCT": 35.0, "Sex": "unspecified"},
     "target": "infer" | {"classes": [...]} | {"unwanted": [...]}}

Every feature must appear in ``instance``; ``"unspecified"`` or ``null``
marks a missing value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .model import (
    UNSPECIFIED,
    Categorical,
    DecisionTree,
    DomainError,
    FeatureSpace,
    Integer,
    ModelError,
    PartialInstance,
    Real,
    Threshold,
    ValueSplit,
    leaf,
    prediction_set,
    split,
)

MODEL_FORMAT = "partialxp-model"
QUERY_FORMAT = "partialxp-query"
VERSION = 1
UNSPECIFIED_TOKEN = "unspecified"


class DocumentError(ValueError):
    """A document is malformed; ``where`` locates the offending entry."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class ModelDocument:
    tree: DecisionTree
    class_numbers: dict = field(default_factory=dict)

    @property
    def space(self) -> FeatureSpace:
        return self.tree.space

    def __iter__(self):
        yield self.tree
        yield self.space


def _load(text: str, fmt: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"line {e.lineno}", f"invalid JSON: {e.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("$", "document must be a JSON object")
    if doc.get("format") != fmt:
        raise DocumentError("format", f"expected {fmt!r}, got {doc.get('format')!r}")
    if doc.get("version") != VERSION:
        raise DocumentError("version", f"unsupported version {doc.get('version')!r}")
    return doc


def _require(obj: Any, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(where, f"missing {key!r}")
    return obj[key]


def _parse_domain(d: Any, where: str):
    kind = _require(d, "type", where)
    try:
        if kind == "categorical":
            values = _require(d, "values", where)
            if not isinstance(values, list):
                raise DocumentError(where, "categorical values must be a list")
            return Categorical(tuple(values))
        if kind == "integer":
            lo, hi = _require(d, "lo", where), _require(d, "hi", where)
            if not (isinstance(lo, int) and isinstance(hi, int)):
                raise DocumentError(where, "integer bounds must be integers")
            return Integer(lo, hi)
        if kind == "real":
            return Real(float(_require(d, "lo", where)), float(_require(d, "hi", where)))
    except ModelError as e:
        raise DocumentError(where, str(e)) from None
    raise DocumentError(where, f"unknown domain type {kind!r}")


def parse_model(text: str) -> ModelDocument:
    """Parse and validate a model document; unpacks as ``(tree, space)``."""
    doc = _load(text, MODEL_FORMAT)
    feats = _require(doc, "features", "$")
    if not isinstance(feats, list) or not feats:
        raise DocumentError("features", "need a nonempty list")
    names, domains = [], []
    for k, f in enumerate(feats):
        where = f"features[{k}]"
        name = _require(f, "name", where)
        if name in names:
            raise DocumentError(where, f"duplicate feature {name!r}")
        names.append(name)
        domains.append(_parse_domain(_require(f, "domain", where), f"{where}.domain"))

    classes, numbers = [], {}
    for k, c in enumerate(_require(doc, "classes", "$")):
        where = f"classes[{k}]"
        if isinstance(c, dict):
            name = _require(c, "name", where)
            if "number" in c:
                numbers[name] = c["number"]
        else:
            name = c
        if name in classes:
            raise DocumentError(where, f"duplicate class {name!r}")
        classes.append(name)
    try:
        space = FeatureSpace(tuple(domains), tuple(classes), tuple(names))
    except ModelError as e:
        raise DocumentError("$", str(e)) from None

    nodes, seen = [], set()
    for k, n in enumerate(_require(doc, "nodes", "$")):
        where = f"nodes[{k}]"
        nid = _require(n, "id", where)
        if nid in seen:
            raise DocumentError(where, f"duplicate node id {nid!r}")
        seen.add(nid)
        kind = _require(n, "kind", where)
        if kind == "leaf":
            cls = _require(n, "class", where)
            if cls not in classes:
                raise DocumentError(where, f"unknown class {cls!r}")
            nodes.append(leaf(nid, cls))
            continue
        if kind != "split":
            raise DocumentError(where, f"unknown node kind {kind!r}")
        fname = _require(n, "feature", where)
        if fname not in names:
            raise DocumentError(where, f"unknown feature {fname!r}")
        fid = names.index(fname) + 1
        test = _require(n, "test", where)
        ttype = _require(test, "type", f"{where}.test")
        if ttype == "threshold":
            value = _require(test, "value", f"{where}.test")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DocumentError(f"{where}.test", "threshold value must be a number")
            t = Threshold(value)
        elif ttype == "values":
            groups = _require(test, "groups", f"{where}.test")
            t = ValueSplit(tuple(tuple(g) for g in groups))
        else:
            raise DocumentError(f"{where}.test", f"unknown test type {ttype!r}")
        nodes.append(split(nid, fid, t, _require(n, "children", where)))
    try:
        tree = DecisionTree(space, tuple(nodes), _require(doc, "root", "$"))
    except ModelError as e:
        raise DocumentError("nodes", str(e)) from None
    return ModelDocument(tree, numbers)


def model_to_dict(model: ModelDocument | DecisionTree) -> dict:
    if isinstance(model, DecisionTree):
        model = ModelDocument(model)
    tree, sp = model.tree, model.space
    features = []
    for name, d in zip(sp.names, sp.domains):
        if isinstance(d, Categorical):
            dom = {"type": "categorical", "values": list(d.values)}
        elif isinstance(d, Integer):
            dom = {"type": "integer", "lo": d.lo, "hi": d.hi}
        else:
            dom = {"type": "real", "lo": d.lo, "hi": d.hi}
        features.append({"name": name, "domain": dom})
    classes = [
        {"name": c, "number": model.class_numbers[c]} if c in model.class_numbers else c
        for c in sp.classes
    ]
    nodes = []
    for n in tree.nodes:
        if n.is_leaf:
            nodes.append({"id": n.id, "kind": "leaf", "class": n.label})
            continue
        if isinstance(n.test, Threshold):
            test = {"type": "threshold", "value": n.test.threshold}
        else:
            dom = sp.domains[n.feature - 1]
            # keep domain order inside groups so output is deterministic
            test = {
                "type": "values",
                "groups": [[v for v in dom.values if v in g] for g in n.test.groups],
            }
        nodes.append(
            {
                "id": n.id,
                "kind": "split",
                "feature": sp.names[n.feature - 1],
                "test": test,
                "children": list(n.children),
            }
        )
    return {
        "format": MODEL_FORMAT,
        "version": VERSION,
        "features": features,
        "classes": classes,
        "root": tree.root,
        "nodes": nodes,
    }


def serialize_model(model: ModelDocument | DecisionTree) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


@dataclass
class Query:
    instance: PartialInstance
    target: Any  # "infer", ("classes", [...]) or ("unwanted", [...])

    def resolve_targets(self, tree: DecisionTree) -> frozenset:
        """The target class set this query asks about."""
        classes = set(tree.space.classes)
        if self.target == "infer":
            t = prediction_set(tree, self.instance)
        else:
            kind, names = self.target
            unknown = [c for c in names if c not in classes]
            if unknown:
                raise DocumentError(f"target.{kind}", f"unknown classes {unknown!r}")
            t = frozenset(names) if kind == "classes" else frozenset(classes - set(names))
        if not t:
            raise DocumentError("target", "resolves to an empty class set")
        if t == classes:
            raise DocumentError("target", "resolves to every class; nothing to explain")
        return frozenset(t)


def parse_query(text: str, space: FeatureSpace) -> Query:
    doc = _load(text, QUERY_FORMAT)
    inst = _require(doc, "instance", "$")
    if not isinstance(inst, dict):
        raise DocumentError("instance", "must be an object")
    unknown = [k for k in inst if k not in space.names]
    if unknown:
        raise DocumentError("instance", f"unknown features {unknown!r}")
    values = []
    for name, dom in zip(space.names, space.domains):
        if name not in inst:
            raise DocumentError("instance", f"feature {name!r} missing (use \"unspecified\")")
        v = inst[name]
        if v is None or (v == UNSPECIFIED_TOKEN and v not in getattr(dom, "values", ())):
            values.append(UNSPECIFIED)
            continue
        if isinstance(dom, Real) and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        if v not in dom:
            raise DocumentError(f"instance.{name}", f"value {v!r} outside the domain")
        values.append(v)
    try:
        z = PartialInstance(space, tuple(values))
    except DomainError as e:
        raise DocumentError("instance", str(e)) from None
    target = doc.get("target", "infer")
    if target != "infer":
        if not isinstance(target, dict) or len(target) != 1:
            raise DocumentError("target", 'expected "infer", {"classes": [...]} or {"unwanted": [...]}')
        (kind, names), = target.items()
        if kind not in ("classes", "unwanted") or not isinstance(names, list):
            raise DocumentError("target", f"unknown target spec {kind!r}")
        target = (kind, names)
    return Query(z, target)


def query_to_dict(query: Query) -> dict:
    sp = query.instance.space
    inst = {
        n: (UNSPECIFIED_TOKEN if v is UNSPECIFIED else v)
        for n, v in zip(sp.names, query.instance.values)
    }
    target = query.target if query.target == "infer" else {query.target[0]: list(query.target[1])}
    return {"format": QUERY_FORMAT, "version": VERSION, "instance": inst, "target": target}


def serialize_query(query: Query) -> str:
    return json.dumps(query_to_dict(query), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def xp_record(kind: str, features, space: FeatureSpace) -> dict:
    ids = sorted(features)
    return {"kind": kind, "features": ids, "names": [space.name(i) for i in ids]}


def format_xp(kind: str, features, space: FeatureSpace) -> str:
    ids = sorted(features)
    label = {"axp": "AXp", "cxp": "CXp"}[kind]
    names = ", ".join(space.name(i) for i in ids)
    return f"{label} {{{', '.join(map(str, ids))}}}  ({names})"
