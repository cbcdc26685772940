"""Abductive explanations: greedy computation of one subset-minimal
explanation, sufficiency checks, and enumeration of all minimal ones."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import DomainError, InputError
from .logic import FeatureSpace, Individual, Literal, check_cap, codes, partial, satisfiable, variables_of
from .models import Decision, DecisionModel, exists_flip, insufficient_subsets

if TYPE_CHECKING:
    from .knowledge import ConstraintSet

TOP = "⊤"
BOTTOM = "⊥"


@dataclass(frozen=True)
class Explanation:
    literals: frozenset[Literal]
    decision: Decision
    bk_aware: bool = False

    @property
    def features(self) -> frozenset[int]:
        return variables_of(self.literals)

    def sort_key(self) -> tuple:
        """Lexicographic by sorted feature indices, then polarities."""
        lits = sorted(self.literals)
        return (tuple(l.feature for l in lits), tuple(l.positive for l in lits))

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.literals

    def __len__(self):
        return len(self.literals)

    def format(self, features: FeatureSpace) -> str:
        return features.format_literals(self.literals)


@dataclass(frozen=True)
class TraceStep:
    feature: int
    probe: frozenset[Literal]
    flip_found: bool

    @property
    def kept(self) -> bool:
        return self.flip_found


@dataclass(frozen=True)
class ExplanationTrace:
    individual: Individual
    steps: tuple[TraceStep, ...]

    def replay(self) -> frozenset[Literal]:
        xp = set(self.individual.literals())
        for step in self.steps:
            if not step.kept:
                xp.discard(self.individual.literal(step.feature))
        return frozenset(xp)

    def rows(self, features: FeatureSpace) -> list[list[str]]:
        header = ["Steps", *features.names, "∃x'"]
        out = [header]
        for i, step in enumerate(self.steps, 1):
            out.append([str(i), *_cells(step.probe, features.n), TOP if step.flip_found else BOTTOM])
        out.append(["final", *_cells(self.replay(), features.n), ""])
        return out

    def render(self, features: FeatureSpace) -> str:
        rows = self.rows(features)
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        lines = []
        for j, row in enumerate(rows):
            lines.append(" | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if j == 0:
                lines.append("-+-".join("-" * w for w in widths))
        return "\n".join(lines)


def _cells(lits: Iterable[Literal], n: int) -> list[str]:
    cells = ["?"] * n
    for lit in lits:
        cells[lit.feature] = str(lit.value)
    return cells


def _require_real(k: "ConstraintSet | None", x: Individual) -> None:
    if k is not None and not bool(k.real_mask[x.code]):
        raise DomainError("not a real individual: the individual violates the background knowledge")


def is_explanation(
    m: DecisionModel, xp: Iterable[Literal], d: Decision, k: "ConstraintSet | None" = None
) -> bool:
    return not exists_flip(m, partial(xp), d, k)


def is_vacuous(xp: Iterable[Literal], k: "ConstraintSet | None") -> bool:
    """No real individual satisfies ``xp``; sufficiency under ``k`` then holds trivially."""
    if k is None:
        return False
    return not satisfiable(k.constraints, xp)


def compute_explanation(
    m: DecisionModel,
    x: Individual,
    order: Sequence[int] | None = None,
    k: "ConstraintSet | None" = None,
) -> tuple[Explanation, ExplanationTrace]:
    """Drop literals one at a time in ``order``, keeping those whose removal
    lets some (real) individual get a different decision."""
    if len(x) != m.n:
        raise InputError(f"individual has {len(x)} values, model expects {m.n}")
    order = list(range(m.n)) if order is None else list(order)
    if sorted(order) != list(range(m.n)):
        raise InputError("order must be a permutation of the feature indices")
    _require_real(k, x)
    d = m.decide(x)
    xp = set(x.literals())
    steps = []
    for v in order:
        lit = x.literal(v)
        xp.discard(lit)
        flip = exists_flip(m, xp, d, k)
        steps.append(TraceStep(v, frozenset(xp), flip))
        if flip:
            xp.add(lit)
    return Explanation(frozenset(xp), d, k is not None), ExplanationTrace(x, tuple(steps))


def _literals_of_mask(x: Individual, mask: int) -> frozenset[Literal]:
    n = x.n
    return frozenset(x.literal(i) for i in range(n) if mask >> (n - 1 - i) & 1)


def enumerate_minimal_explanations(
    m: DecisionModel, x: Individual, k: "ConstraintSet | None" = None
) -> list[Explanation]:
    """Every subset-minimal explanation of ``m``'s decision on ``x``.

    Sufficiency is monotone, so the insufficient subsets form a down-set;
    a subset is minimal when it is sufficient and every one-literal
    deletion lands in that down-set.  Sorted by ``Explanation.sort_key``.
    """
    check_cap(m.n)
    if len(x) != m.n:
        raise InputError(f"individual has {len(x)} values, model expects {m.n}")
    _require_real(k, x)
    d = m.decide(x)
    bad = insufficient_subsets(m, x, d, k)
    minimal = ~bad
    idx = codes(m.n)
    for i in range(m.n):
        b = 1 << i
        has = (idx & b) != 0
        minimal[has] &= bad[idx[has] ^ b]
    found = [Explanation(_literals_of_mask(x, int(mask)), d, k is not None) for mask in np.flatnonzero(minimal)]
    return sorted(found, key=Explanation.sort_key)
