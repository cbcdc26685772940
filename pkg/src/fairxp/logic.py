"""Propositional core: features, literals, individuals, formulas and the
satisfiability / entailment oracle.

Individuals are encoded as integers in big-endian feature order: the first
feature is the most significant bit, so ``[x1, ..., xn]`` has code
``sum(x_i * 2 ** (n - i))``.  All enumeration in the package walks this code
space, which makes "lexicographically first" and "lowest code" the same thing.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CapExceeded, InputError

MAX_FEATURES = 24

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def check_cap(n: int) -> None:
    if n > MAX_FEATURES:
        raise CapExceeded(f"{n} features exceeds the enumeration cap of {MAX_FEATURES}")


# ---------------------------------------------------------------------------
# code-space helpers


@lru_cache(maxsize=32)
def codes(n: int) -> np.ndarray:
    """All individual codes ``0 .. 2**n - 1`` (read-only)."""
    check_cap(n)
    out = np.arange(1 << n, dtype=np.int64)
    out.setflags(write=False)
    return out


def bit(i: int, n: int) -> int:
    """Bit of feature ``i`` inside a code over ``n`` features."""
    return 1 << (n - 1 - i)


@lru_cache(maxsize=256)
def column(i: int, n: int) -> np.ndarray:
    """Truth value of feature ``i`` across the whole cube of ``n`` features."""
    out = (codes(n) & bit(i, n)) != 0
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# features


@dataclass(frozen=True)
class FeatureSpace:
    """Ordered, uniquely named Boolean features."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise InputError("feature set is empty")
        for name in names:
            if not _NAME_RE.match(name):
                raise InputError(f"invalid feature name {name!r}")
        if len(set(names)) != len(names):
            raise InputError("feature names are not unique")
        check_cap(len(names))

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown feature {name!r}") from None

    def literal(self, text: str) -> "Literal":
        """Parse ``NAME`` or ``!NAME`` (``~`` and ``¬`` accepted too)."""
        text = text.strip()
        positive = True
        while text[:1] in ("!", "~", "¬"):
            positive = not positive
            text = text[1:].strip()
        return Literal(self.index(text), positive)

    def format_literal(self, lit: "Literal") -> str:
        return ("" if lit.positive else "!") + self.names[lit.feature]

    def format_literals(self, lits: Iterable["Literal"], sep: str = " & ") -> str:
        lits = sorted(lits)
        if not lits:
            return "TRUE"
        return sep.join(self.format_literal(lit) for lit in lits)

    def parse_individual(self, text: str) -> "Individual":
        """Parse ``A=1,G=0,...``; every feature must be given exactly once."""
        values: dict[int, int] = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, value = part.partition("=")
            if not sep or value.strip() not in ("0", "1"):
                raise InputError(f"bad assignment {part!r}; expected NAME=0 or NAME=1")
            idx = self.index(name.strip())
            if idx in values:
                raise InputError(f"feature {name.strip()!r} assigned twice")
            values[idx] = int(value.strip())
        missing = [self.names[i] for i in range(self.n) if i not in values]
        if missing:
            raise InputError("individual is not total; missing " + ", ".join(missing))
        return Individual(tuple(values[i] for i in range(self.n)))

    def format_individual(self, x: "Individual") -> str:
        return ",".join(f"{name}={v}" for name, v in zip(self.names, x.values))


# ---------------------------------------------------------------------------
# formulas


class Formula:
    """Base class of propositional formulas over feature indices.

    ``_eval`` works on any environment mapping a feature index to a bool or
    to a numpy bool array, so one definition serves both single individuals
    and whole-cube evaluation.
    """

    def variables(self) -> frozenset[int]:
        raise NotImplementedError

    def _eval(self, env):
        raise NotImplementedError

    def holds(self, values: Sequence[int]) -> bool:
        return bool(self._eval(values))

    def table(self, n: int) -> np.ndarray:
        """Truth value on every individual of the ``n``-feature cube."""
        bad = [v for v in self.variables() if v >= n]
        if bad:
            raise InputError(f"formula mentions feature index {bad[0]} outside 0..{n - 1}")
        out = self._eval(_CubeEnv(n))
        return np.broadcast_to(np.asarray(out, dtype=bool), (1 << n,))

    def substitute(self, var: int, value: bool) -> "Formula":
        raise NotImplementedError


class _CubeEnv:
    def __init__(self, n: int):
        self.n = n

    def __getitem__(self, i: int) -> np.ndarray:
        return column(i, self.n)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def variables(self):
        return frozenset()

    def _eval(self, env):
        return np.bool_(self.value)

    def substitute(self, var, value):
        return self

    def __str__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, order=True)
class Literal(Formula):
    feature: int
    positive: bool = True

    def __invert__(self) -> "Literal":
        return Literal(self.feature, not self.positive)

    @property
    def value(self) -> int:
        return int(self.positive)

    def variables(self):
        return frozenset((self.feature,))

    def _eval(self, env):
        v = env[self.feature]
        if isinstance(v, np.ndarray):
            v = v.astype(bool, copy=False)
        else:
            v = np.bool_(bool(v))
        return v if self.positive else np.logical_not(v)

    def substitute(self, var, value):
        if var != self.feature:
            return self
        return TRUE if bool(value) == self.positive else FALSE

    def __str__(self):
        return ("" if self.positive else "!") + f"x{self.feature}"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def variables(self):
        return self.arg.variables()

    def _eval(self, env):
        return np.logical_not(self.arg._eval(env))

    def substitute(self, var, value):
        return Not(self.arg.substitute(var, value))


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __init__(self, *args: Formula):
        object.__setattr__(self, "args", tuple(args))

    def variables(self):
        return frozenset().union(*(a.variables() for a in self.args))

    def _eval(self, env):
        out = np.bool_(True)
        for a in self.args:
            out = np.logical_and(out, a._eval(env))
        return out

    def substitute(self, var, value):
        return And(*(a.substitute(var, value) for a in self.args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __init__(self, *args: Formula):
        object.__setattr__(self, "args", tuple(args))

    def variables(self):
        return frozenset().union(*(a.variables() for a in self.args))

    def _eval(self, env):
        out = np.bool_(False)
        for a in self.args:
            out = np.logical_or(out, a._eval(env))
        return out

    def substitute(self, var, value):
        return Or(*(a.substitute(var, value) for a in self.args))


@dataclass(frozen=True)
class Implies(Formula):
    body: Formula
    head: Formula

    def variables(self):
        return self.body.variables() | self.head.variables()

    def _eval(self, env):
        return np.logical_or(np.logical_not(self.body._eval(env)), self.head._eval(env))

    def substitute(self, var, value):
        return Implies(self.body.substitute(var, value), self.head.substitute(var, value))


def conjunction(lits: Iterable[Literal]) -> Formula:
    lits = sorted(lits)
    if not lits:
        return TRUE
    if len(lits) == 1:
        return lits[0]
    return And(*lits)


def forbid(lits: Iterable[Literal]) -> Formula:
    """``not (l1 and l2 and ...)``: the pattern never occurs."""
    return Not(And(*sorted(lits)))


def exists(var: int, f: Formula) -> Formula:
    """Boolean existential quantification ``f[var<-0] or f[var<-1]``."""
    return Or(f.substitute(var, False), f.substitute(var, True))


# ---------------------------------------------------------------------------
# individuals and partial assignments


@dataclass(frozen=True)
class Individual:
    """Total Boolean assignment, one 0/1 value per feature."""

    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v not in (0, 1) for v in values):
            raise InputError("individual values must be 0 or 1")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_code(cls, code: int, n: int) -> "Individual":
        return cls(tuple((code >> (n - 1 - i)) & 1 for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def code(self) -> int:
        out = 0
        for v in self.values:
            out = (out << 1) | v
        return out

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def literal(self, i: int) -> Literal:
        return Literal(i, bool(self.values[i]))

    def literals(self) -> frozenset[Literal]:
        return frozenset(self.literal(i) for i in range(self.n))

    def flip(self, i: int) -> "Individual":
        values = list(self.values)
        values[i] ^= 1
        return Individual(tuple(values))

    def extends(self, lits: Iterable[Literal]) -> bool:
        return all(self.values[lit.feature] == lit.value for lit in lits)

    def __str__(self):
        return "".join(map(str, self.values))


def is_consistent(lits: Iterable[Literal]) -> bool:
    seen: dict[int, bool] = {}
    for lit in lits:
        if seen.setdefault(lit.feature, lit.positive) != lit.positive:
            return False
    return True


def partial(lits: Iterable[Literal]) -> frozenset[Literal]:
    """Validate and freeze a partial assignment."""
    lits = frozenset(lits)
    if not is_consistent(lits):
        raise InputError("partial assignment contains a literal and its negation")
    return lits


def variables_of(lits: Iterable[Literal]) -> frozenset[int]:
    return frozenset(lit.feature for lit in lits)


def cube_key(lits: Iterable[Literal], n: int) -> tuple[int, int]:
    """``(mask, value)`` such that ``code & mask == value`` selects the extensions."""
    mask = value = 0
    for lit in lits:
        if lit.feature >= n:
            raise InputError(f"literal on feature index {lit.feature} outside 0..{n - 1}")
        b = bit(lit.feature, n)
        mask |= b
        if lit.positive:
            value |= b
    return mask, value


def extensions(lits: Iterable[Literal], n: int) -> np.ndarray:
    """Boolean selector over the cube of the individuals extending ``lits``."""
    mask, value = cube_key(lits, n)
    return (codes(n) & mask) == value


# ---------------------------------------------------------------------------
# oracle


def evaluate(f: Formula, x: Individual | Sequence[int]) -> bool:
    values = x.values if isinstance(x, Individual) else tuple(x)
    bad = [v for v in f.variables() if v >= len(values)]
    if bad:
        raise InputError(f"formula mentions feature index {bad[0]} unknown to the individual")
    return f.holds(values)


def _local_models(fs: Sequence[Formula], fixed: Iterable[Literal]) -> bool:
    """Exhaustive check over the variables the problem actually mentions."""
    fixed = list(fixed)
    relevant = sorted(set().union(*(f.variables() for f in fs), variables_of(fixed)))
    m = len(relevant)
    check_cap(m)
    cols = {v: column(j, m) for j, v in enumerate(relevant)} if m else {}
    env = _MapEnv(cols)
    ok = np.ones(1 << m, dtype=bool)
    for lit in fixed:
        ok &= np.asarray(lit._eval(env), dtype=bool)
    for f in fs:
        if not ok.any():
            return False
        ok &= np.asarray(f._eval(env), dtype=bool)
    return bool(ok.any())


class _MapEnv:
    def __init__(self, cols: Mapping[int, np.ndarray]):
        self.cols = cols

    def __getitem__(self, i):
        return self.cols[i]


def as_clause(f: Formula) -> frozenset[Literal] | None:
    """Disjunction-of-literals view of ``f``, or None if ``f`` is not clause-shaped."""
    if isinstance(f, Literal):
        return frozenset((f,))
    if isinstance(f, Const):
        return None if f.value else frozenset()
    if isinstance(f, Or) and all(isinstance(a, Literal) for a in f.args):
        return frozenset(f.args)
    if isinstance(f, Not):
        inner = f.arg
        if isinstance(inner, Literal):
            return frozenset((~inner,))
        if isinstance(inner, And) and all(isinstance(a, Literal) for a in inner.args):
            return frozenset(~a for a in inner.args)
    if isinstance(f, Implies) and isinstance(f.head, Literal):
        body = f.body
        if isinstance(body, Literal):
            return frozenset((~body, f.head))
        if isinstance(body, And) and all(isinstance(a, Literal) for a in body.args):
            return frozenset([~a for a in body.args] + [f.head])
    return None


def _dpll(clauses: list[frozenset[Literal]], assignment: dict[int, bool]) -> bool:
    assignment = dict(assignment)
    while True:
        unit = None
        remaining = []
        for clause in clauses:
            open_lits = []
            satisfied = False
            for lit in clause:
                val = assignment.get(lit.feature)
                if val is None:
                    open_lits.append(lit)
                elif val == lit.positive:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not open_lits:
                return False
            if len(open_lits) == 1 and unit is None:
                unit = open_lits[0]
            remaining.append(clause)
        if not remaining:
            return True
        if unit is None:
            break
        assignment[unit.feature] = unit.positive
        clauses = remaining
    var = min(lit.feature for clause in remaining for lit in clause if lit.feature not in assignment)
    for choice in (True, False):
        assignment[var] = choice
        if _dpll(remaining, assignment):
            return True
    return False


def satisfiable(
    fs: Iterable[Formula], fixed: Iterable[Literal] = (), method: str = "enumerate"
) -> bool:
    """Is there a total assignment extending ``fixed`` that satisfies every formula?

    ``method="enumerate"`` scans all assignments of the mentioned variables;
    ``method="propagate"`` runs DPLL with unit propagation and needs every
    formula to be clause-shaped.  An inconsistent ``fixed`` is unsatisfiable.
    """
    fs = list(fs)
    fixed = list(fixed)
    if not is_consistent(fixed):
        return False
    if method == "enumerate":
        return _local_models(fs, fixed)
    if method == "propagate":
        clauses = []
        for f in fs:
            clause = as_clause(f)
            if clause is None:
                if isinstance(f, Const) and f.value:
                    continue
                raise InputError(f"formula {f} is not clause-shaped")
            clauses.append(clause)
        return _dpll(clauses, {lit.feature: lit.positive for lit in fixed})
    raise ValueError(f"unknown method {method!r}")


def entails(
    fs: Iterable[Formula], assumptions: Iterable[Literal], goal: Literal, method: str = "enumerate"
) -> bool:
    return not satisfiable(fs, list(assumptions) + [~goal], method=method)


def is_independent(f: Formula, v: int) -> bool:
    """True iff flipping ``v`` never changes the value of ``f``."""
    vs = f.variables()
    if v not in vs:
        return True
    rest = sorted(vs - {v})
    m = len(rest) + 1
    check_cap(m)
    cols = {u: column(j, m) for j, u in enumerate(rest)}
    low = dict(cols)
    high = dict(cols)
    low[v] = np.zeros(1 << m, dtype=bool)
    high[v] = np.ones(1 << m, dtype=bool)
    a = np.broadcast_to(f._eval(_MapEnv(low)), (1 << m,))
    b = np.broadcast_to(f._eval(_MapEnv(high)), (1 << m,))
    return bool(np.array_equal(a, b))


def literal_sets(features: Sequence[int], max_size: int) -> Iterator[frozenset[Literal]]:
    """Every consistent conjunction of at most ``max_size`` literals over ``features``.

    Ordered by size, then feature indices, then polarity (negative first).
    """
    features = sorted(features)
    for size in range(max_size + 1):
        for combo in itertools.combinations(features, size):
            for signs in itertools.product((False, True), repeat=size):
                yield frozenset(Literal(f, s) for f, s in zip(combo, signs))
