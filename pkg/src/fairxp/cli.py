"""Command-line interface.

Exit codes: 0 success, 1 failed verification, 2 parse/validation error,
3 domain precondition violated (e.g. unreal individual), 4 cap exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bundle
from .bias import audit_bk_aware_bias, audit_explicit_bias, find_proxies, is_biased_decision, is_process_biased
from .errors import AuditError, DomainError, InputError
from .explain import compute_explanation, enumerate_minimal_explanations
from .fairness import audit_individual_fairness, check_mapping_consistency
from .io import bk_features, format_bk, parse_bk, parse_dataset, parse_mapping, parse_partition
from .knowledge import check_real, mine_forbidden_patterns
from .logic import FeatureSpace
from .models import load_model
from .report import (
    SCHEMA_NOTES,
    AuditRun,
    bias_entry,
    explanation_entry,
    fairness_entry,
    individual_label,
    mapping_entry,
    proxy_entries,
    render_audit,
    trace_entry,
)


def _read(run: AuditRun | None, role: str, path: str) -> bytes:
    try:
        raw = bundle.read_bytes(path)
    except (OSError, FileNotFoundError) as exc:
        raise InputError(f"cannot read {role} file {path!r}: {exc}") from None
    if run is not None:
        run.add_input(role, path, raw)
    return raw


def _text(raw: bytes, path: str) -> str:
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError:
        raise InputError(f"{path}: not a 7-bit text file") from None


def _load_model(run, path):
    return load_model(_read(run, "model", path))


def _load_bk(run, path, features: FeatureSpace):
    raw = _read(run, "bk", path)
    return parse_bk(features, _text(raw, path))


def _load_dataset(run, path, features: FeatureSpace | None = None):
    raw = _read(run, "dataset", path)
    data = parse_dataset(_text(raw, path))
    if features is not None and data.features != features:
        raise InputError("dataset columns differ from the model's features")
    return data


def _individuals(args, run, features):
    """[(row index or None, individual)] from --individual or --dataset/--row."""
    if args.individual:
        return [(None, features.parse_individual(args.individual))]
    if not args.dataset:
        raise InputError("give --individual or --dataset")
    data = _load_dataset(run, args.dataset, features)
    if args.row is not None:
        if not 0 <= args.row < len(data):
            raise InputError(f"row {args.row} out of range (dataset has {len(data)} rows)")
        return [(args.row, data.rows[args.row])]
    if not getattr(args, "all_rows_ok", False):
        raise InputError("give --row")
    return list(enumerate(data.rows))


def _order(text: str | None, features: FeatureSpace):
    if not text:
        return None
    names = [t.strip() for t in text.split(",") if t.strip()]
    order = [features.index(n) for n in names]
    if sorted(order) != list(range(features.n)):
        raise InputError("--order must list every feature exactly once")
    return order


def _emit(run: AuditRun, args, text: str) -> None:
    run.finish()
    sys.stdout.write(text)
    if getattr(args, "report", None):
        Path(args.report).write_text(run.document(), encoding="ascii")


# ---------------------------------------------------------------------------
# commands


def cmd_explain(args) -> int:
    run = AuditRun("explain", {"order": args.order, "bk": args.bk is not None, "all": args.all})
    m = _load_model(run, args.model)
    k = _load_bk(run, args.bk, m.features) if args.bk else None
    order = _order(args.order, m.features)
    ((row, x),) = _individuals(args, run, m.features)
    if k is not None and not check_real(k, x):
        raise DomainError("not a real individual: the individual violates the background knowledge")
    e, trace = compute_explanation(m, x, order, k)
    out = {
        **individual_label(m.features, x, row),
        "decision": e.decision,
        "explanation": explanation_entry(m.features, e, k),
        "trace": trace_entry(m.features, trace),
    }
    lines = []
    if args.trace:
        lines.append(trace.render(m.features))
    lines.append(f"decision: {e.decision}")
    lines.append(f"explanation: {e.format(m.features)}")
    if args.all:
        expls = enumerate_minimal_explanations(m, x, k)
        out["all_minimal"] = [explanation_entry(m.features, a, k) for a in expls]
        lines.append("all minimal explanations:")
        lines.extend(f"  - {a.format(m.features)}" for a in expls)
    run.outputs = out
    _emit(run, args, "\n".join(lines) + "\n")
    return 0


def cmd_audit(args) -> int:
    run = AuditRun(
        "audit",
        {"protected": args.protected, "context_arity": args.context_arity, "bk": args.bk is not None,
         "mapping": args.mapping is not None},
    )
    m = _load_model(run, args.model)
    features = m.features
    p = features.index(args.protected)
    k = _load_bk(run, args.bk, features) if args.bk else None
    ms = fp = None
    if args.mapping or args.partition:
        if not (args.mapping and args.partition):
            raise InputError("--mapping and --partition go together")
        fp = parse_partition(features, _text(_read(run, "partition", args.partition), args.partition))
        if p not in fp.protected:
            raise InputError(f"{args.protected} is not in the partition's protected set")
        ms = parse_mapping(features, _text(_read(run, "mapping", args.mapping), args.mapping), fp)
        if ms.protected != p:
            raise InputError("mapping is over a different protected feature")
    args.all_rows_ok = True
    people = _individuals(args, run, features)

    entries = []
    counts = {"explicitly_biased": 0, "bk_aware_biased": 0, "fair": 0, "unfair": 0, "skipped_unreal": 0}
    for row, x in people:
        entry = individual_label(features, x, row)
        if k is not None and not check_real(k, x):
            if len(people) == 1:
                raise DomainError("not a real individual: the individual violates the background knowledge")
            entry["error"] = "not a real individual"
            counts["skipped_unreal"] += 1
            entries.append(entry)
            continue
        verdict = audit_bk_aware_bias(m, x, k, p) if k is not None else audit_explicit_bias(m, x, p)
        entry["decision"] = verdict.decision
        entry["bias"] = bias_entry(features, verdict, is_biased_decision(m, x, p))
        counts["explicitly_biased"] += verdict.explicit_bias
        counts["bk_aware_biased"] += bool(verdict.bk_aware_bias)
        if ms is not None:
            mapping = ms
            if x[p] == ms.target:
                mapping = ms.inverse()
            elif x[p] != ms.source:
                raise InputError("individual belongs to neither subgroup of the mapping")
            fv = audit_individual_fairness(m, x, mapping, fp, k)
            entry["fairness"] = fairness_entry(features, fv)
            counts["fair" if fv.fair else "unfair"] += 1
        entries.append(entry)

    witness = is_process_biased(m, p)
    summary = {"individuals": len(people), **counts}
    summary["process_bias_witness"] = features.format_individual(witness) if witness else None
    if k is not None and k.provenance:
        summary["bk_provenance"] = k.provenance
    outputs = {"individuals": entries, "summary": summary, "definitions": SCHEMA_NOTES}
    outputs["proxies"] = proxy_entries(features, find_proxies(k, p, args.context_arity)) if k is not None else None
    run.outputs = outputs
    _emit(run, args, render_audit(outputs))
    return 0


def cmd_mine_bk(args) -> int:
    raw = _read(None, "dataset", args.dataset)
    data = parse_dataset(_text(raw, args.dataset))
    if not len(data):
        raise InputError("dataset has no rows")
    k = mine_forbidden_patterns(data, args.max_arity)
    text = format_bk(k)
    if args.output:
        Path(args.output).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return 0


def _features_for(args, bk_text: str | None) -> FeatureSpace:
    if args.features:
        return FeatureSpace(tuple(t.strip() for t in args.features.split(",") if t.strip()))
    if args.model:
        return load_model(_read(None, "model", args.model)).features
    if bk_text is not None:
        found = bk_features(bk_text)
        if found is not None:
            return found
    raise InputError("cannot determine the feature set; give --features or --model")


def cmd_find_proxies(args) -> int:
    run = AuditRun("find-proxies", {"protected": args.protected, "context_arity": args.context_arity})
    raw = _read(run, "bk", args.bk)
    text = _text(raw, args.bk)
    features = _features_for(args, text)
    k = parse_bk(features, text)
    p = features.index(args.protected)
    witnesses = find_proxies(k, p, args.context_arity)
    run.outputs = {"proxies": proxy_entries(features, witnesses)}
    _emit(run, args, "".join(w.format(features) + "\n" for w in witnesses))
    return 0


def cmd_check_mapping(args) -> int:
    run = AuditRun("check-mapping", {})
    features = _features_for(args, None)
    fp = parse_partition(features, _text(_read(run, "partition", args.partition), args.partition))
    ms = parse_mapping(features, _text(_read(run, "mapping", args.mapping), args.mapping))
    k = _load_bk(run, args.bk, features) if args.bk else None
    rep = check_mapping_consistency(ms, fp, k)
    entry = mapping_entry(features, rep)
    run.outputs = entry
    lines = [f"consistent: {str(rep.consistent).lower()}", f"injective: {str(rep.injective).lower()}"]
    lines += [f"  ambiguous source: {s}" for s in entry["ambiguous_sources"]]
    lines += [f"  collision: {' , '.join(g)}" for g in entry["collisions"]]
    lines.append(f"uncovered real individuals: {entry['uncovered_count']}")
    lines += [f"  {x}" for x in entry["uncovered"]]
    _emit(run, args, "\n".join(lines) + "\n")
    return 0


def cmd_verify_bundle(args) -> int:
    from .verify import verify_bundle

    results = verify_bundle()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    return 0 if all(ok for _, ok, _ in results) else 1


# ---------------------------------------------------------------------------


def _who(p: argparse.ArgumentParser) -> None:
    p.add_argument("--individual", help="NAME=0/1 comma list covering every feature")
    p.add_argument("--dataset", help="dataset CSV (header + 0/1 rows)")
    p.add_argument("--row", type=int, help="row index into --dataset")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairxp",
        description="Abductive explanations and bias/fairness audits for Boolean classifiers. "
        "File arguments accept bundle:<name> for the shipped reference bundle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="compute one subset-minimal explanation")
    p.add_argument("model")
    _who(p)
    p.add_argument("--order", help="comma-separated feature order (default: column order)")
    p.add_argument("--bk", help="background knowledge file")
    p.add_argument("--trace", action="store_true", help="print the step table")
    p.add_argument("--all", action="store_true", help="also enumerate every minimal explanation")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("audit", help="bias, proxy and fairness audit")
    p.add_argument("model")
    _who(p)
    p.add_argument("--protected", required=True)
    p.add_argument("--bk")
    p.add_argument("--mapping")
    p.add_argument("--partition")
    p.add_argument("--context-arity", type=int, default=2)
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("mine-bk", help="mine zero-support forbidden patterns")
    p.add_argument("dataset")
    p.add_argument("--max-arity", type=int, default=3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mine_bk)

    p = sub.add_parser("find-proxies", help="list proxy variables of a protected feature")
    p.add_argument("bk")
    p.add_argument("--protected", required=True)
    p.add_argument("--context-arity", type=int, default=2)
    p.add_argument("--features")
    p.add_argument("--model")
    p.add_argument("--report")
    p.set_defaults(func=cmd_find_proxies)

    p = sub.add_parser("check-mapping", help="injectivity and coverage of a mapping")
    p.add_argument("mapping")
    p.add_argument("--partition", required=True)
    p.add_argument("--bk")
    p.add_argument("--features")
    p.add_argument("--model")
    p.add_argument("--report")
    p.set_defaults(func=cmd_check_mapping)

    p = sub.add_parser("verify-bundle", help="reproduce the reference examples")
    p.set_defaults(func=cmd_verify_bundle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
