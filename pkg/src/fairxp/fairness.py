"""Counterpart explanations across protected subgroups and individual
fairness verdicts.

A mapping is a finite list of rewrite rules over the protected and
equivalence literals of an explanation.  A rule applies when the
protected/equivalence part of the explanation is exactly its source; base
literals are always copied unchanged.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DomainError, InputError
from .explain import Explanation, enumerate_minimal_explanations, is_explanation, is_vacuous
from .knowledge import ConstraintSet, check_real
from .logic import FeatureSpace, Individual, Literal, codes, is_consistent, literal_sets
from .models import DecisionModel

FAIR = "fair"
NO_CRITERION = "no-criterion"
COUNTERPART_CHANGES = "counterpart-changes-decision"
COUNTERPART_UNREAL = "counterpart-unrealizable"


@dataclass(frozen=True)
class FeaturePartition:
    features: FeatureSpace
    base: frozenset[int]
    protected: frozenset[int]
    equivalence: frozenset[int]

    def __post_init__(self):
        for name in ("base", "protected", "equivalence"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        parts = [self.base, self.protected, self.equivalence]
        if not self.protected:
            raise InputError("partition needs at least one protected feature")
        if sum(len(s) for s in parts) != len(frozenset().union(*parts)):
            raise InputError("partition parts overlap")
        if frozenset().union(*parts) != frozenset(range(self.features.n)):
            raise InputError("partition does not cover every feature")

    @property
    def group_dependent(self) -> frozenset[int]:
        return self.protected | self.equivalence

    def split(self, lits: Iterable[Literal]) -> tuple[frozenset[Literal], frozenset[Literal]]:
        lits = frozenset(lits)
        pe = frozenset(l for l in lits if l.feature in self.group_dependent)
        return lits - pe, pe


@dataclass(frozen=True)
class MappingSpec:
    """Rules rewriting the protected/equivalence part of explanations from the
    ``source`` subgroup (``protected == source``) to the ``target`` one."""

    features: FeatureSpace
    protected: int
    source: int
    target: int
    rules: tuple[tuple[frozenset[Literal], frozenset[Literal]], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "rules", tuple((frozenset(a), frozenset(b)) for a, b in self.rules)
        )

    def problems(self, fp: FeaturePartition) -> list[str]:
        """Configuration errors: inconsistent sides, base literals, ambiguity."""
        out = []
        names = self.features
        for src, dst in self.rules:
            shown = f"{{{names.format_literals(src, ',')}}} => {{{names.format_literals(dst, ',')}}}"
            if not is_consistent(src) or not is_consistent(dst):
                out.append(f"rule {shown} has an inconsistent side")
            if any(l.feature not in fp.group_dependent for l in src | dst):
                out.append(f"rule {shown} rewrites a base literal")
        for src, count in Counter(src for src, _ in self.rules).items():
            if count > 1:
                out.append(f"{count} rules share the source {{{names.format_literals(src, ',')}}}")
        return out

    def rule_for(self, pe: frozenset[Literal]) -> frozenset[Literal] | None:
        matches = [dst for src, dst in self.rules if src == pe]
        if len(matches) > 1:
            raise InputError("ambiguous mapping: several rules apply")
        return matches[0] if matches else None

    def inverse(self) -> "MappingSpec":
        targets = Counter(dst for _, dst in self.rules)
        if any(c > 1 for c in targets.values()):
            raise InputError("mapping is not injective and cannot be inverted")
        return MappingSpec(
            self.features, self.protected, self.target, self.source, tuple((b, a) for a, b in self.rules)
        )


def map_explanation(ms: MappingSpec, fp: FeaturePartition, xp: Explanation) -> Explanation | None:
    base, pe = fp.split(xp.literals)
    dst = ms.rule_for(pe)
    if dst is None:
        return None
    return Explanation(base | dst, xp.decision, xp.bk_aware)


def base_literals(fp: FeaturePartition, lits: Iterable[Literal]) -> frozenset[Literal]:
    return frozenset(l for l in lits if l.feature in fp.base)


def is_fairness_criterion(ms: MappingSpec, fp: FeaturePartition, xp: Explanation) -> bool:
    cp = map_explanation(ms, fp, xp)
    return cp is not None and base_literals(fp, xp.literals) == base_literals(fp, cp.literals)


@dataclass
class FairnessVerdict:
    subject: Individual
    decision: int
    fair: bool
    reason: str
    criterion: Explanation | None = None
    counterpart: Explanation | None = None
    checked: list[tuple[Explanation, Explanation | None, str]] = field(default_factory=list)


def audit_individual_fairness(
    m: DecisionModel,
    x: Individual,
    ms: MappingSpec,
    fp: FeaturePartition,
    k: ConstraintSet | None = None,
) -> FairnessVerdict:
    """Fair iff some minimal explanation (under ``k``) is a fairness criterion
    whose counterpart is sufficient for the same decision.

    Explanations are tried in ``Explanation.sort_key`` order and the first
    qualifying pair is reported.  A counterpart no real individual satisfies
    does not qualify.
    """
    if not check_real(k, x):
        raise DomainError("not a real individual: the individual violates the background knowledge")
    d = m.decide(x)
    checked = []
    reason = NO_CRITERION
    for xp in enumerate_minimal_explanations(m, x, k):
        if not is_fairness_criterion(ms, fp, xp):
            checked.append((xp, None, NO_CRITERION))
            continue
        cp = map_explanation(ms, fp, xp)
        if is_vacuous(cp.literals, k):
            checked.append((xp, cp, COUNTERPART_UNREAL))
            if reason == NO_CRITERION:
                reason = COUNTERPART_UNREAL
            continue
        if is_explanation(m, cp.literals, d, k):
            checked.append((xp, cp, FAIR))
            return FairnessVerdict(x, d, True, FAIR, xp, cp, checked)
        checked.append((xp, cp, COUNTERPART_CHANGES))
        reason = COUNTERPART_CHANGES
    return FairnessVerdict(x, d, False, reason, checked=checked)


@dataclass
class MappingReport:
    ambiguous: list[frozenset[Literal]] = field(default_factory=list)
    collisions: list[tuple[frozenset[Literal], ...]] = field(default_factory=list)
    uncovered: list[Individual] = field(default_factory=list)

    @property
    def injective(self) -> bool:
        """Rules sharing a source also break injectivity of the induced relation."""
        return not (self.ambiguous or self.collisions)

    @property
    def consistent(self) -> bool:
        return self.injective and not self.uncovered


def check_mapping_consistency(
    ms: MappingSpec, fp: FeaturePartition, k: ConstraintSet | None = None
) -> MappingReport:
    """Injectivity of the induced map and coverage of the real source subgroup.

    Every consistent protected/equivalence literal set is pushed through the
    rules; two inputs with one image are a collision.  Every real individual
    with ``protected == source`` must satisfy the source side of some rule.
    """
    report = MappingReport()
    for src, count in Counter(src for src, _ in ms.rules).items():
        if count > 1:
            report.ambiguous.append(src)
    images: dict[frozenset[Literal], list[frozenset[Literal]]] = {}
    for pe in literal_sets(fp.group_dependent, len(fp.group_dependent)):
        matches = [dst for src, dst in ms.rules if src == pe]
        if len(matches) == 1:
            images.setdefault(matches[0], []).append(pe)
    report.collisions = [tuple(srcs) for srcs in images.values() if len(srcs) > 1]

    n = ms.features.n
    pool = np.ones(1 << n, dtype=bool) if k is None else np.array(k.real_mask)
    pool &= ((codes(n) >> (n - 1 - ms.protected)) & 1) == ms.source
    for code in np.flatnonzero(pool):
        x = Individual.from_code(int(code), n)
        if not any(x.extends(src) for src, _ in ms.rules):
            report.uncovered.append(x)
    return report
