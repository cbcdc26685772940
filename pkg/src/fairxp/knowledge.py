"""Background knowledge: constraint sets, real individuals and mining of
forbidden patterns from a dataset."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .logic import (
    FeatureSpace,
    Formula,
    Individual,
    Literal,
    check_cap,
    evaluate,
    forbid,
    is_independent,
    literal_sets,
)


@dataclass(frozen=True)
class ConstraintSet:
    """Constraints every real individual satisfies.

    ``provenance`` is free text recorded in reports (e.g. how the constraints
    were learned); it does not take part in equality.
    """

    features: FeatureSpace
    constraints: tuple[Formula, ...] = ()
    provenance: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = self.features.n
        for f in self.constraints:
            bad = [v for v in f.variables() if v >= n]
            if bad:
                raise InputError(f"constraint mentions feature index {bad[0]} outside the feature set")
        if not self.real_mask.any():
            raise InputError("background knowledge is unsatisfiable: no real individual exists")

    def __eq__(self, other):
        if not isinstance(other, ConstraintSet):
            return NotImplemented
        return self.features == other.features and self.constraints == other.constraints

    def __hash__(self):
        return hash((self.features, self.constraints))

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    @cached_property
    def real_mask(self) -> np.ndarray:
        """Which codes of the cube satisfy every constraint."""
        n = self.features.n
        check_cap(n)
        out = np.ones(1 << n, dtype=bool)
        for f in self.constraints:
            out &= f.table(n)
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class RealPopulation:
    members: tuple[Individual, ...]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return x in set(self.members)


def real_individuals(k: ConstraintSet) -> RealPopulation:
    n = k.features.n
    return RealPopulation(tuple(Individual.from_code(int(c), n) for c in np.flatnonzero(k.real_mask)))


def check_real(k: ConstraintSet | None, x: Individual) -> bool:
    if k is None:
        return True
    return all(evaluate(f, x) for f in k.constraints)


def mentions(k: ConstraintSet | None, v: int) -> bool:
    """Does some constraint semantically depend on feature ``v``?"""
    if k is None:
        return False
    return any(not is_independent(f, v) for f in k.constraints)


@dataclass(frozen=True)
class Dataset:
    features: FeatureSpace
    rows: tuple[Individual, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for i, row in enumerate(self.rows):
            if len(row) != self.features.n:
                raise InputError(f"row {i} has {len(row)} values, expected {self.features.n}")

    def __len__(self):
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        return np.array([r.values for r in self.rows], dtype=bool).reshape(len(self.rows), self.features.n)


def _support(matrix: np.ndarray, lits: Iterable[Literal]) -> int:
    sel = np.ones(matrix.shape[0], dtype=bool)
    for lit in lits:
        sel &= matrix[:, lit.feature] == lit.positive
    return int(sel.sum())


def zero_support_patterns(data: Dataset, max_arity: int) -> list[frozenset[Literal]]:
    """Minimal conjunctions of at most ``max_arity`` literals no row satisfies.

    Candidates come in increasing size, so a candidate is minimal exactly when
    it contains no pattern already found.
    """
    if not len(data):
        raise InputError("dataset is empty")
    n = data.features.n
    if not 0 <= max_arity <= n:
        raise InputError(f"max arity must be between 0 and {n}")
    matrix = data.matrix()
    found: list[frozenset[Literal]] = []
    for cand in literal_sets(range(n), max_arity):
        if not cand:
            continue
        if any(p <= cand for p in found):
            continue
        if _support(matrix, cand) == 0:
            found.append(cand)
    return found


def mine_forbidden_patterns(data: Dataset, max_arity: int) -> ConstraintSet:
    patterns = zero_support_patterns(data, max_arity)
    note = f"learned: zero-support patterns of arity <= {max_arity} over {len(data)} rows"
    return ConstraintSet(data.features, tuple(forbid(p) for p in patterns), provenance=note)


def from_patterns(features: FeatureSpace, patterns: Sequence[Iterable[Literal]]) -> ConstraintSet:
    return ConstraintSet(features, tuple(forbid(p) for p in patterns))
