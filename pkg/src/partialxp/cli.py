"""Command-line interface.

Every explanation command takes a model document and a query document (see
``partialxp.documents``).  Exit status is 0 on success, 1 when a document or
the query fails validation, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .assess import assess
from .documents import DocumentError, format_xp, parse_model, parse_query, xp_record
from .enumeration import check_mhs_duality, enumerate_xps, is_relevant, relevant_axp
from .extract import ASCENDING, DESCENDING, find_one_xp, is_necessary
from .model import (
    DomainError,
    ExplanationProblem,
    ModelError,
    UsageError,
    is_sufficient,
    prediction_set,
)
from .oracle import AXP, CXP, UnsupportedError, is_weak_paxp, paxp_probability
from .sat import PREFER_FALSE, PREFER_TRUE
from .verify import CapacityError, run_suite

SEED_ENV = "PARTIALXP_SEED"


class ValidationError(ValueError):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_model(path: str):
    return parse_model(_read(path))


def _load(args):
    model = _load_model(args.model)
    query = parse_query(_read(args.query), model.space)
    return model, query


def _problem(args) -> ExplanationProblem:
    model, query = _load(args)
    targets = query.resolve_targets(model.tree)
    if not is_sufficient(model.tree, query.instance, targets):
        pred = sorted(map(str, prediction_set(model.tree, query.instance)))
        raise ValidationError(
            f"instance is not sufficient for targets {sorted(map(str, targets))} "
            f"(predicted classes: {pred})"
        )
    return ExplanationProblem(model.tree, query.instance, targets)


def _feature(space, ref: str) -> int:
    ref = ref.strip()
    if ref in space.names:
        return space.feature_id(ref)
    if ref.isdigit() and 1 <= int(ref) <= space.m:
        return int(ref)
    raise UsageError(f"unknown feature {ref!r}")


def _features(space, refs: str) -> list[int]:
    return [_feature(space, r) for r in refs.split(",") if r.strip()]


def _emit(args, record, text: str) -> None:
    if args.json:
        print(json.dumps(record, default=str))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_predict_set(args) -> int:
    model, query = _load(args)
    pred = [c for c in model.space.classes if c in prediction_set(model.tree, query.instance)]
    _emit(args, {"classes": pred}, " ".join(map(str, pred)))
    return 0


def cmd_check_sufficient(args) -> int:
    model, query = _load(args)
    targets = query.resolve_targets(model.tree)
    ok = is_sufficient(model.tree, query.instance, targets)
    tnames = [c for c in model.space.classes if c in targets]
    _emit(
        args,
        {"sufficient": ok, "targets": tnames},
        f"{'sufficient' if ok else 'not sufficient'} for {{{', '.join(map(str, tnames))}}}",
    )
    return 0


def _order(space, spec: str):
    if spec in (ASCENDING, DESCENDING):
        return spec
    return _features(space, spec)


def cmd_explain(args) -> int:
    p = _problem(args)
    xp = find_one_xp(p, args.kind, _order(p.space, args.order))
    _emit(args, xp_record(args.kind, xp, p.space), format_xp(args.kind, xp, p.space))
    return 0


def cmd_enumerate(args) -> int:
    p = _problem(args)
    report = enumerate_xps(p, args.bias)
    if not check_mhs_duality(report.axps, report.cxps):
        raise ValidationError("enumerated families violate hitting-set duality")
    if args.json:
        print(
            json.dumps(
                {
                    "bias": args.bias,
                    "explanations": [xp_record(k, s, p.space) for k, s in report.entries],
                    "duality": True,
                },
                default=str,
            )
        )
    else:
        for k, s in report.entries:
            print(format_xp(k, s, p.space))
    return 0


def cmd_necessary(args) -> int:
    p = _problem(args)
    i = _feature(p.space, args.feature)
    ok = is_necessary(p, i)
    name = p.space.name(i)
    _emit(
        args,
        {"feature": i, "name": name, "necessary": ok},
        f"{name} is {'necessary' if ok else 'not necessary'}",
    )
    return 0


def cmd_relevant(args) -> int:
    p = _problem(args)
    i = _feature(p.space, args.feature)
    name = p.space.name(i)
    ok = is_relevant(p, i)
    axp = relevant_axp(p, i) if ok else None
    text = f"{name} is {'relevant' if ok else 'not relevant'}"
    if axp is not None:
        text += f"; witness {format_xp(AXP, axp, p.space)}"
    _emit(
        args,
        {
            "feature": i,
            "name": name,
            "relevant": ok,
            "witness": None if axp is None else xp_record(AXP, axp, p.space),
        },
        text,
    )
    return 0


def cmd_paxp(args) -> int:
    p = _problem(args)
    x = _features(p.space, args.features)
    try:
        delta = Fraction(args.delta)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad delta {args.delta!r}") from None
    prob = paxp_probability(p, x)
    ok = is_weak_paxp(p, x, delta)
    names = [p.space.name(i) for i in sorted(x)]
    _emit(
        args,
        {
            "features": sorted(x),
            "names": names,
            "probability": str(prob),
            "delta": str(delta),
            "weak_paxp": ok,
        },
        f"P(target | {', '.join(names) or '-'}) = {prob} ({float(prob):.6g}); "
        f"{'weak PAXp' if ok else 'not a weak PAXp'} at delta {delta}",
    )
    return 0


def _symptom_value(dom, raw: str):
    try:
        v = json.loads(raw)
    except json.JSONDecodeError:
        v = raw
    if v not in dom and raw in dom:
        v = raw
    if v not in dom:
        raise UsageError(f"symptom value {raw!r} outside the domain")
    return v


def _leaf_id(tree, raw: str):
    for n in tree.nodes:
        if str(n.id) == raw:
            return n.id
    raise UsageError(f"no node {raw!r}")


def cmd_assess(args) -> int:
    model = _load_model(args.model)
    sp = model.space
    symptoms = {}
    for item in filter(None, (s.strip() for s in args.symptoms.split(","))):
        ref, sep, raw = item.partition("=")
        if not sep:
            raise UsageError(f"symptom {item!r} needs the form FEATURE=VALUE")
        f = _feature(sp, ref)
        symptoms[f] = _symptom_value(sp.domain(f), raw.strip())
    a = assess(model.tree, _leaf_id(model.tree, args.leaf), symptoms)
    lines = [f"leaf {a.leaf} predicts {a.leaf_class}: {a.outcome}"]
    if a.active_symptoms:
        lines.append("active symptoms: " + ", ".join(sp.name(i) for i in sorted(a.active_symptoms)))
    if a.axp is not None:
        lines.append(format_xp(AXP, a.axp, sp))
    if a.no_active_symptom:
        lines.append("FLAG: prediction reachable with no active symptom")
    _emit(args, a.as_record(), "\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    report = run_suite(args.seed, args.instances)
    if args.json:
        print(json.dumps({"seed": args.seed, "instances": args.instances, "failures": report.failures}))
    else:
        for f in report.failures:
            print(f)
        verdict = "ok" if report.ok else f"{len(report.failures)} failures"
        print(f"verify: {args.instances} instances, seed {args.seed}: {verdict}")
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON record instead of text")
    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("model", help="model document (JSON)")
    io.add_argument("query", help="query document (JSON)")

    parser = argparse.ArgumentParser(
        prog="partialxp",
        description="Explanations for decision trees on partially specified inputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help, parents=(common, io)):
        p = sub.add_parser(name, parents=list(parents), help=help, description=help)
        p.set_defaults(func=func)
        return p

    add("predict-set", cmd_predict_set, "classes predicted by some completion of the instance")
    add("check-sufficient", cmd_check_sufficient, "whether every completion is predicted in the targets")
    p = add("explain", cmd_explain, "compute one AXp or CXp")
    p.add_argument("--kind", choices=(AXP, CXP), default=AXP, help="explanation kind (default axp)")
    p.add_argument(
        "--order",
        default=ASCENDING,
        help="ascending, descending, or a comma-separated feature order (default ascending)",
    )
    p = add("enumerate", cmd_enumerate, "list every AXp and CXp in discovery order")
    p.add_argument(
        "--bias",
        choices=(PREFER_TRUE, PREFER_FALSE),
        default=PREFER_TRUE,
        help="preferred selector polarity: pos frees features first, neg fixes them (default pos)",
    )
    p = add("necessary", cmd_necessary, "whether a feature occurs in every AXp")
    p.add_argument("--feature", required=True, help="feature name or id")
    p = add("relevant", cmd_relevant, "whether a feature occurs in some AXp")
    p.add_argument("--feature", required=True, help="feature name or id")
    p = add("paxp", cmd_paxp, "probability of a target prediction with the given features fixed")
    p.add_argument("--features", required=True, help="comma-separated feature names or ids")
    p.add_argument("--delta", required=True, help="threshold in [0, 1], e.g. 0.9 or 9/10")
    p = add("assess", cmd_assess, "withhold the active symptoms on a leaf's path and explain", (common,))
    p.add_argument("model", help="model document (JSON)")
    p.add_argument("--leaf", required=True, help="leaf node id")
    p.add_argument(
        "--symptoms",
        default="",
        help="comma-separated FEATURE=POSITIVE_VALUE pairs; a symptom is active when its path admits the value",
    )
    p = add("verify", cmd_verify, "check the algorithms against brute force on random problems", (common,))
    p.add_argument(
        "--seed", type=int, default=None, help=f"corpus seed (default ${SEED_ENV} or 0)"
    )
    p.add_argument("--instances", type=int, default=100, help="number of random problems (default 100)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as e:
        print(f"partialxp: usage error: {e}", file=sys.stderr)
        return 2
    except (DocumentError, ModelError, DomainError, ValidationError, UnsupportedError, CapacityError) as e:
        print(f"partialxp: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
