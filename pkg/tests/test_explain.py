import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairxp.errors import DomainError, InputError
from fairxp.explain import (
    compute_explanation,
    enumerate_minimal_explanations,
    is_explanation,
    is_vacuous,
)
from fairxp.logic import Individual, Literal
from fairxp.models import TruthTableModel

from conftest import constant, lits, random_bk, random_table_model
from oracles import brute_exists_flip, brute_minimal_explanations

# Hawa trace table, rows 1-10 then the final row; '?' marks a dropped literal.
HAWA_TABLE = [
    "? 0 0 0 0 1 0 0 1 1 ⊤",
    "1 ? 0 0 0 1 0 0 1 1 ⊥",
    "1 ? ? 0 0 1 0 0 1 1 ⊥",
    "1 ? ? ? 0 1 0 0 1 1 ⊥",
    "1 ? ? ? ? 1 0 0 1 1 ⊥",
    "1 ? ? ? ? ? 0 0 1 1 ⊤",
    "1 ? ? ? ? 1 ? 0 1 1 ⊥",
    "1 ? ? ? ? 1 ? ? 1 1 ⊤",
    "1 ? ? ? ? 1 ? 0 ? 1 ⊤",
    "1 ? ? ? ? 1 ? 0 1 ? ⊥",
    "1 ? ? ? ? 1 ? 0 1 ?",
]


def test_hawa_trace_table(credit, F, hawa):
    e, trace = compute_explanation(credit, hawa)
    rows = [" ".join(r[1:]).strip() for r in trace.rows(F)[1:]]
    assert rows == HAWA_TABLE
    assert e.literals == lits(F, "A & B & !D & P")
    assert trace.replay() == e.literals
    assert len(trace.steps) == 10


def test_yahya_documented_order(credit, F, yahya):
    order = [F.index(c) for c in "GJHBCASDPM"]
    e, _ = compute_explanation(credit, yahya, order)
    assert e.literals == lits(F, "A & !S & !D & P & M")


def test_constant_model_empty_explanation(F, yahya, rng):
    for _ in range(3):
        order = list(rng.permutation(10))
        e, _ = compute_explanation(constant(F, 0), yahya, order)
        assert e.literals == frozenset()


def test_is_explanation_examples(credit, F):
    assert is_explanation(credit, lits(F, "A & B & !D & P"), 1)
    assert not is_explanation(credit, frozenset(), 1)
    assert (credit.table == 0).any()
    assert is_explanation(constant(F, 1), frozenset(), 1)


def test_bk_mode_refuses_unreal(credit, k1, hawa):
    with pytest.raises(DomainError, match="not a real individual"):
        compute_explanation(credit, hawa, k=k1)
    with pytest.raises(DomainError):
        enumerate_minimal_explanations(credit, hawa, k1)


def test_bad_order(credit, hawa):
    with pytest.raises(InputError):
        compute_explanation(credit, hawa, [0, 0, 1, 2, 3, 4, 5, 6, 7, 8])


def test_enumeration_examples(F, yahya, credit):
    assert [e.literals for e in enumerate_minimal_explanations(constant(F, 1), yahya)] == [frozenset()]
    a_model = TruthTableModel.from_function(F, lambda x: x[0])
    assert [e.literals for e in enumerate_minimal_explanations(a_model, yahya)] == [frozenset({Literal(0)})]
    found = {e.literals for e in enumerate_minimal_explanations(credit, yahya)}
    assert lits(F, "A & !S & !D & P & M") in found
    assert found == brute_minimal_explanations(credit, yahya)
    assert not any(a < b for a in found for b in found)


def test_enumeration_under_k1(credit, F, k1, yahya):
    found = {e.literals for e in enumerate_minimal_explanations(credit, yahya, k1)}
    assert found == brute_minimal_explanations(credit, yahya, k1.constraints)


def test_vacuous_flag(F, k1):
    assert is_vacuous(lits(F, "!G & P & M"), k1)
    assert not is_vacuous(lits(F, "P & M"), k1)
    assert not is_vacuous(lits(F, "!G & P & M"), None)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_sound_minimal_and_covered(n, seed):
    rng = np.random.default_rng(seed)
    m = random_table_model(rng, n)
    x = Individual.from_code(int(rng.integers(0, 1 << n)), n)
    d = m.decide(x)
    all_min = {e.literals for e in enumerate_minimal_explanations(m, x)}
    assert not any(a < b for a in all_min for b in all_min)
    for _ in range(50):
        e, trace = compute_explanation(m, x, list(rng.permutation(n)))
        assert not brute_exists_flip(m, e.literals, d)
        for lit in e.literals:
            assert brute_exists_flip(m, e.literals - {lit}, d)
        assert e.literals in all_min
        assert trace.replay() == e.literals


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_enumeration_matches_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    m = random_table_model(rng, n)
    k = random_bk(rng, n)
    x = Individual.from_code(int(rng.integers(0, 1 << n)), n)
    assert {e.literals for e in enumerate_minimal_explanations(m, x)} == brute_minimal_explanations(m, x)
    if k.real_mask[x.code]:
        got = {e.literals for e in enumerate_minimal_explanations(m, x, k)}
        assert got == brute_minimal_explanations(m, x, k.constraints)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_plain_explanations_stay_sufficient_under_bk(n, seed):
    rng = np.random.default_rng(seed)
    m = random_table_model(rng, n)
    k = random_bk(rng, n)
    x = Individual.from_code(int(rng.integers(0, 1 << n)), n)
    for e in enumerate_minimal_explanations(m, x):
        assert is_explanation(m, e.literals, e.decision, k)
