"""Text formats: background knowledge, mappings, partitions and datasets.

All formats are plain 7-bit text.  Parsers raise ``InputError`` with a line
number; serializers produce text their parser reads back to an equal value.
"""
from __future__ import annotations

import csv
import io
import re

from .errors import InputError
from .fairness import FeaturePartition, MappingSpec
from .knowledge import ConstraintSet, Dataset
from .logic import And, FeatureSpace, Formula, Implies, Individual, Literal, Not

# ---------------------------------------------------------------------------
# background knowledge


def _lits(features: FeatureSpace, text: str, lineno: int) -> list[Literal]:
    parts = [t.strip() for t in text.split("&")]
    if not all(parts):
        raise InputError(f"line {lineno}: empty literal in {text!r}")
    try:
        return [features.literal(t) for t in parts]
    except InputError as exc:
        raise InputError(f"line {lineno}: {exc}") from None


def parse_constraint(features: FeatureSpace, line: str, lineno: int = 1) -> Formula:
    line = line.strip()
    if line.startswith("forbid "):
        return Not(And(*_lits(features, line[len("forbid "):], lineno)))
    if "->" in line:
        body, _, head = line.partition("->")
        body_lits = _lits(features, body, lineno)
        head_lits = _lits(features, head, lineno)
        if len(head_lits) != 1:
            raise InputError(f"line {lineno}: implication head must be a single literal")
        lhs = body_lits[0] if len(body_lits) == 1 else And(*body_lits)
        return Implies(lhs, head_lits[0])
    raise InputError(f"line {lineno}: expected 'forbid <lit> & ...' or '<lit> & ... -> <lit>', got {line!r}")


def format_constraint(features: FeatureSpace, f: Formula) -> str:
    fmt = features.format_literal
    if isinstance(f, Not) and isinstance(f.arg, And) and all(isinstance(a, Literal) for a in f.arg.args):
        return "forbid " + " & ".join(fmt(a) for a in f.arg.args)
    if isinstance(f, Implies) and isinstance(f.head, Literal):
        body = f.body
        if isinstance(body, Literal):
            return f"{fmt(body)} -> {fmt(f.head)}"
        if isinstance(body, And) and body.args and all(isinstance(a, Literal) for a in body.args):
            return " & ".join(fmt(a) for a in body.args) + f" -> {fmt(f.head)}"
    raise InputError(f"constraint {f!r} has no BK-file form")


def parse_bk(features: FeatureSpace, text: str) -> ConstraintSet:
    constraints = []
    provenance = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            if line.startswith("# provenance:"):
                provenance = line[len("# provenance:"):].strip()
            continue
        if line:
            constraints.append(parse_constraint(features, line, lineno))
    return ConstraintSet(features, tuple(constraints), provenance)


def bk_features(text: str) -> FeatureSpace | None:
    """Feature set named by a ``# features: A, B, ...`` header line, if present."""
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# features:"):
            names = [t.strip() for t in line[len("# features:"):].split(",") if t.strip()]
            return FeatureSpace(tuple(names))
    return None


def format_bk(k: ConstraintSet) -> str:
    lines = ["# features: " + ", ".join(k.features.names)]
    if k.provenance:
        lines.append(f"# provenance: {k.provenance}")
    lines.extend(format_constraint(k.features, f) for f in k.constraints)
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# partitions and mappings

_PART_KEYS = ("base", "protected", "equivalence")


def parse_partition(features: FeatureSpace, text: str) -> FeaturePartition:
    parts: dict[str, frozenset[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in _PART_KEYS:
            raise InputError(f"line {lineno}: expected 'base:', 'protected:' or 'equivalence:'")
        if key in parts:
            raise InputError(f"line {lineno}: '{key}' given twice")
        names = [t.strip() for t in rest.split(",") if t.strip()]
        parts[key] = frozenset(features.index(name) for name in names)
    missing = [k for k in _PART_KEYS if k not in parts]
    if missing:
        raise InputError("partition file lacks " + ", ".join(missing))
    return FeaturePartition(features, parts["base"], parts["protected"], parts["equivalence"])


def format_partition(fp: FeaturePartition) -> str:
    names = fp.features.names
    out = []
    for key in _PART_KEYS:
        idx = sorted(getattr(fp, key))
        out.append(f"{key}: " + ", ".join(names[i] for i in idx) + "\n")
    return "".join(out)


_HEADER_RE = re.compile(r"^mapping\s+(\w+)\s*:\s*([01])\s*->\s*([01])$")
_RULE_RE = re.compile(r"^\{(.*)\}\s*=>\s*\{(.*)\}$")


def _lit_set(features: FeatureSpace, text: str, lineno: int) -> frozenset[Literal]:
    parts = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return frozenset(features.literal(t) for t in parts)
    except InputError as exc:
        raise InputError(f"line {lineno}: {exc}") from None


def parse_mapping(features: FeatureSpace, text: str, fp: FeaturePartition | None = None) -> MappingSpec:
    """Parse a mapping file; with ``fp`` given, configuration errors are fatal."""
    header = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            match = _HEADER_RE.match(line)
            if not match:
                raise InputError(f"line {lineno}: expected header 'mapping <feature>: <source> -> <target>'")
            header = (features.index(match.group(1)), int(match.group(2)), int(match.group(3)))
            continue
        match = _RULE_RE.match(line)
        if not match:
            raise InputError(f"line {lineno}: expected rule '{{<lit>,...}} => {{<lit>,...}}'")
        rules.append((_lit_set(features, match.group(1), lineno), _lit_set(features, match.group(2), lineno)))
    if header is None:
        raise InputError("mapping file has no header")
    protected, source, target = header
    if source == target:
        raise InputError("mapping source and target subgroups coincide")
    ms = MappingSpec(features, protected, source, target, tuple(rules))
    if fp is not None:
        if protected not in fp.protected:
            raise InputError(f"mapping feature {features.names[protected]!r} is not protected in the partition")
        problems = ms.problems(fp)
        if problems:
            raise InputError("mapping configuration error: " + "; ".join(problems))
    return ms


def format_mapping(ms: MappingSpec) -> str:
    names = ms.features
    out = [f"mapping {names.names[ms.protected]}: {ms.source} -> {ms.target}\n"]
    for src, dst in ms.rules:
        lhs = ", ".join(names.format_literal(l) for l in sorted(src))
        rhs = ", ".join(names.format_literal(l) for l in sorted(dst))
        out.append(f"{{{lhs}}} => {{{rhs}}}\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# datasets


def parse_dataset(text: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError("dataset file is empty")
    features = FeatureSpace(tuple(c.strip() for c in rows[0]))
    out = []
    for lineno, row in enumerate(rows[1:], 2):
        cells = [c.strip() for c in row]
        if len(cells) != features.n:
            raise InputError(f"line {lineno}: {len(cells)} values, expected {features.n}")
        if any(c not in ("0", "1") for c in cells):
            raise InputError(f"line {lineno}: values must be 0 or 1")
        out.append(Individual(tuple(int(c) for c in cells)))
    return Dataset(features, tuple(out))


def format_dataset(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(data.features.names)
    for row in data.rows:
        writer.writerow(row.values)
    return buf.getvalue()
