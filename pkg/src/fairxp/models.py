"""Decision models and the sufficiency oracle.

A model is a total function from individuals to a 0/1 decision.  Every model
can materialise its decision table over the whole cube; the sufficiency
oracle ``exists_flip`` and its batch form ``insufficient_subsets`` both work
off that table.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np

from .errors import InputError
from .logic import FeatureSpace, Individual, Literal, check_cap, codes, column, extensions

if TYPE_CHECKING:
    from .knowledge import ConstraintSet

Decision = int


class DecisionModel:
    features: FeatureSpace

    @property
    def n(self) -> int:
        return self.features.n

    @cached_property
    def table(self) -> np.ndarray:
        """Decision for every code, as a read-only bool array."""
        out = np.asarray(self._table(), dtype=bool)
        out.setflags(write=False)
        return out

    def _table(self) -> np.ndarray:
        raise NotImplementedError

    def decide(self, x: Individual) -> Decision:
        if len(x) != self.n:
            raise InputError(f"individual has {len(x)} values, model expects {self.n}")
        return int(self.table[x.code])


@dataclass(frozen=True, eq=True)
class TruthTableModel(DecisionModel):
    features: FeatureSpace
    bits: str

    def __post_init__(self):
        expected = 1 << self.features.n
        if len(self.bits) != expected:
            raise InputError(f"truth table has {len(self.bits)} entries, expected 2^{self.features.n} = {expected}")
        if set(self.bits) - {"0", "1"}:
            raise InputError("truth table must contain only 0 and 1")

    @classmethod
    def from_array(cls, features: FeatureSpace, table: Iterable[int | bool]) -> "TruthTableModel":
        return cls(features, "".join("1" if v else "0" for v in table))

    @classmethod
    def from_function(cls, features: FeatureSpace, fn) -> "TruthTableModel":
        n = features.n
        return cls.from_array(features, (fn(Individual.from_code(c, n)) for c in range(1 << n)))

    def _table(self):
        return np.frombuffer(self.bits.encode("ascii"), dtype=np.uint8) == ord("1")


@dataclass(frozen=True, eq=True)
class LinearThresholdModel(DecisionModel):
    """Decision 1 iff ``sum(w_i * x_i) + bias > 0``; exact rational arithmetic."""

    features: FeatureSpace
    weights: tuple[Fraction, ...]
    bias: Fraction

    def __post_init__(self):
        weights = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", Fraction(self.bias))
        if len(weights) != self.features.n:
            raise InputError(f"{len(weights)} weights for {self.features.n} features")
        scores = self.scores
        if (scores == 0).any():
            tie = Individual.from_code(int(np.flatnonzero(scores == 0)[0]), self.n)
            raise InputError(
                f"linear threshold model has a tie (score exactly 0) at {self.features.format_individual(tie)}"
            )

    @cached_property
    def scores(self) -> np.ndarray:
        """Integer-scaled scores over the cube (same sign as the rational score)."""
        n = self.features.n
        check_cap(n)
        scale = math.lcm(*(v.denominator for v in (*self.weights, self.bias)))
        ints = [int(w * scale) for w in self.weights]
        total = np.full(1 << n, int(self.bias * scale), dtype=object if _big(ints, self.bias * scale) else np.int64)
        for i, w in enumerate(ints):
            if w:
                total = total + np.where(column(i, n), w, 0)
        return total

    def _table(self):
        return self.scores > 0


def _big(ints, bias) -> bool:
    return sum(abs(w) for w in ints) + abs(int(bias)) >= 2**62


@dataclass(frozen=True, eq=True)
class ModelOverride(DecisionModel):
    """A base model whose decision is replaced on finitely many individuals."""

    base: DecisionModel
    exceptions: tuple[tuple[int, Decision], ...] = ()

    def __init__(self, base: DecisionModel, exceptions: Mapping[Individual | int, Decision] = None):
        pairs = {}
        for key, d in (exceptions or {}).items():
            code = key.code if isinstance(key, Individual) else int(key)
            if not 0 <= code < (1 << base.n):
                raise InputError(f"exception code {code} outside the feature cube")
            if d not in (0, 1):
                raise InputError("decisions are 0 or 1")
            pairs[code] = int(d)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exceptions", tuple(sorted(pairs.items())))

    @property
    def features(self) -> FeatureSpace:
        return self.base.features

    def _table(self):
        out = np.array(self.base.table, dtype=bool)
        for code, d in self.exceptions:
            out[code] = bool(d)
        return out


# ---------------------------------------------------------------------------
# oracle


def decide(m: DecisionModel, x: Individual) -> Decision:
    return m.decide(x)


def _real_mask(k: "ConstraintSet | None", n: int) -> np.ndarray | None:
    if k is None:
        return None
    if k.features.n != n:
        raise InputError("background knowledge and model use different feature sets")
    return k.real_mask


def exists_flip(
    m: DecisionModel, xp: Iterable[Literal], d: Decision, k: "ConstraintSet | None" = None
) -> bool:
    """Is there an individual extending ``xp`` (and satisfying ``k``) decided other than ``d``?"""
    sel = extensions(xp, m.n)
    real = _real_mask(k, m.n)
    if real is not None:
        sel &= real
    return bool(np.any(m.table[sel] != bool(d)))


def counterexample(
    m: DecisionModel, xp: Iterable[Literal], d: Decision, k: "ConstraintSet | None" = None
) -> Individual | None:
    """Lowest-code witness for ``exists_flip``, if any."""
    sel = extensions(xp, m.n) & (m.table != bool(d))
    real = _real_mask(k, m.n)
    if real is not None:
        sel &= real
    hits = np.flatnonzero(sel)
    return Individual.from_code(int(hits[0]), m.n) if hits.size else None


def insufficient_subsets(
    m: DecisionModel, x: Individual, d: Decision, k: "ConstraintSet | None" = None
) -> np.ndarray:
    """``exists_flip`` for every subset of ``x``'s literals at once.

    Subsets are indexed by the code mask of the features they keep.  A subset
    is insufficient exactly when it is contained in the agreement set of some
    counterexample, so the result is the downward closure of those agreement
    masks.
    """
    n = m.n
    full = (1 << n) - 1
    wrong = m.table != bool(d)
    real = _real_mask(k, n)
    if real is not None:
        wrong = wrong & real
    agree = full & ~(codes(n)[wrong] ^ x.code)
    out = np.zeros(1 << n, dtype=bool)
    out[agree] = True
    idx = codes(n)
    for i in range(n):
        b = 1 << i
        has = (idx & b) == 0
        out[has] |= out[idx[has] | b]
    return out


def equiv_under_bk(m1: DecisionModel, m2: DecisionModel, k: "ConstraintSet | None" = None) -> bool:
    if m1.features != m2.features:
        raise InputError("models use different feature sets")
    same = m1.table == m2.table
    real = _real_mask(k, m1.n)
    if real is not None:
        same = same | ~real
    return bool(same.all())


def negate(m: DecisionModel) -> TruthTableModel:
    return TruthTableModel.from_array(m.features, ~m.table)


# ---------------------------------------------------------------------------
# model files


def _decimal(v: Fraction) -> str:
    """Exact decimal text when the fraction terminates, ``p/q`` otherwise."""
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{v.numerator}/{v.denominator}"
    places = max(twos, fives)
    scaled = v * 10**places
    assert scaled.denominator == 1
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    sign = "-" if v < 0 else ""
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def model_to_dict(m: DecisionModel) -> dict:
    if isinstance(m, TruthTableModel):
        return {"features": list(m.features.names), "kind": "truth-table", "table": m.bits}
    if isinstance(m, LinearThresholdModel):
        return {
            "features": list(m.features.names),
            "kind": "linear-threshold",
            "weights": [_decimal(w) for w in m.weights],
            "bias": _decimal(m.bias),
        }
    if isinstance(m, ModelOverride):
        n = m.n
        return {
            "features": list(m.features.names),
            "kind": "override",
            "base": model_to_dict(m.base),
            "exceptions": [
                {"individual": format(code, f"0{n}b"), "decision": d} for code, d in m.exceptions
            ],
        }
    raise TypeError(f"cannot serialise {type(m).__name__}")


def model_from_dict(data: Mapping) -> DecisionModel:
    try:
        features = FeatureSpace(tuple(data["features"]))
        kind = data["kind"]
        if kind == "truth-table":
            return TruthTableModel(features, str(data["table"]))
        if kind == "linear-threshold":
            weights = tuple(_fraction(w) for w in data["weights"])
            return LinearThresholdModel(features, weights, _fraction(data["bias"]))
        if kind == "override":
            base = model_from_dict(data["base"])
            if base.features != features:
                raise InputError("override base uses a different feature set")
            exceptions = {}
            for item in data["exceptions"]:
                bits = str(item["individual"])
                if len(bits) != features.n or set(bits) - {"0", "1"}:
                    raise InputError(f"bad exception individual {bits!r}")
                exceptions[int(bits, 2)] = int(item["decision"])
            return ModelOverride(base, exceptions)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed model file: missing or bad field {exc}") from None
    raise InputError(f"unknown model kind {kind!r}")


def _fraction(text) -> Fraction:
    if isinstance(text, float):
        raise InputError("weights must be decimal strings, not floats")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad rational number {text!r}") from None


def save_model(m: DecisionModel) -> bytes:
    return (json.dumps(model_to_dict(m), indent=2) + "\n").encode("ascii")


def load_model(raw: bytes | str) -> DecisionModel:
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("model file must hold a JSON object")
    return model_from_dict(data)
