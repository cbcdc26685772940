import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairxp import bundle
from fairxp.errors import InputError
from fairxp.explain import Explanation
from fairxp.fairness import (
    COUNTERPART_CHANGES,
    FAIR,
    FeaturePartition,
    MappingSpec,
    audit_individual_fairness,
    base_literals,
    check_mapping_consistency,
    is_fairness_criterion,
    map_explanation,
)
from fairxp.knowledge import ConstraintSet
from fairxp.logic import Individual, Literal
from fairxp.models import TruthTableModel

from conftest import lits, random_bk, random_table_model, space
from oracles import all_individuals, brute_exists_flip, extends, is_real


@pytest.fixture(scope="module")
def fp():
    return bundle.partition()


@pytest.fixture(scope="module")
def ms():
    return bundle.mapping()


def expl(F, text, d=1):
    return Explanation(lits(F, text), d)


def test_map_examples(F, fp, ms):
    cp = map_explanation(ms, fp, expl(F, "A & !S & !D & P & M"))
    assert cp.literals == lits(F, "A & !G & !S & !D & !M")
    assert map_explanation(ms, fp, expl(F, "A & B")).literals == lits(F, "A & B")
    assert map_explanation(ms, fp, expl(F, "A & G")).literals == lits(F, "A & !G")
    assert map_explanation(ms, fp, expl(F, "A & P")) is None


def test_identity_mapping(F, fp):
    G = F.index("G")
    ident = MappingSpec(F, G, 1, 0, ((frozenset(), frozenset()),))
    xp = expl(F, "A & !S & C")
    assert map_explanation(ident, fp, xp) == xp
    assert is_fairness_criterion(ident, fp, xp)
    assert not is_fairness_criterion(ident, fp, expl(F, "A & M"))


def test_yahya_criterion(F, fp, ms):
    assert is_fairness_criterion(ms, fp, expl(F, "A & !S & !D & P & M"))


def test_yahya_fair(credit, F, k1, yahya, fp, ms):
    v = audit_individual_fairness(credit, yahya, ms, fp, k1)
    assert v.fair and v.reason == FAIR
    assert v.criterion.literals == lits(F, "A & !S & !D & P & M")
    assert v.counterpart.literals == lits(F, "A & !G & !S & !D & !M")


def test_protected_decision_is_unfair(F, fp):
    G = F.index("G")
    m = TruthTableModel.from_function(F, lambda x: x[G])
    swap = MappingSpec(F, G, 1, 0, ((lits(F, "G"), lits(F, "!G")),))
    x = Individual.from_code(1 << 8, 10)
    v = audit_individual_fairness(m, x, swap, fp)
    assert not v.fair and v.reason == COUNTERPART_CHANGES


def test_model_ignoring_group_features_is_fair(F, fp):
    A, S = F.index("A"), F.index("S")
    m = TruthTableModel.from_function(F, lambda x: x[A] & (1 - x[S]))
    ident = MappingSpec(F, F.index("G"), 1, 0, ((frozenset(), frozenset()),))
    for code in range(0, 1024, 7):
        x = Individual.from_code(code, 10)
        assert audit_individual_fairness(m, x, ident, fp).fair


def test_bundle_mapping_consistent(ms, fp, k1):
    rep = check_mapping_consistency(ms, fp, k1)
    assert rep.consistent and rep.injective


def test_shared_source_reported(F, fp):
    G = F.index("G")
    bad = MappingSpec(F, G, 1, 0, ((lits(F, "G"), lits(F, "!G")), (lits(F, "G"), lits(F, "!G & M"))))
    rep = check_mapping_consistency(bad, fp)
    assert rep.ambiguous == [lits(F, "G")]
    assert not rep.injective
    assert bad.problems(fp)
    with pytest.raises(InputError, match="ambiguous"):
        map_explanation(bad, fp, expl(F, "G & A"))


def test_collision_reported(F, fp):
    G = F.index("G")
    many = MappingSpec(F, G, 1, 0, ((lits(F, "G"), lits(F, "!G")), (lits(F, "G & M"), lits(F, "!G"))))
    rep = check_mapping_consistency(many, fp)
    assert rep.collisions == [(lits(F, "G"), lits(F, "G & M"))]
    assert not rep.consistent
    with pytest.raises(InputError):
        many.inverse()


def test_partial_mapping_uncovered(F, fp):
    G = F.index("G")
    partial = MappingSpec(F, G, 1, 0, ((lits(F, "G & P"), lits(F, "!G & P")),))
    rep = check_mapping_consistency(partial, fp, ConstraintSet(F))
    assert len(rep.uncovered) == 256
    assert all(x[G] == 1 and x[F.index("P")] == 0 for x in rep.uncovered)


def test_partition_validation(F):
    with pytest.raises(InputError):
        FeaturePartition(F, range(9), (), (9,))
    with pytest.raises(InputError):
        FeaturePartition(F, range(8), (1,), (8, 9))
    with pytest.raises(InputError):
        FeaturePartition(F, range(2, 8), (1,), (8,))


def test_inverse_round_trip(ms):
    assert ms.inverse().inverse() == ms
    assert ms.inverse().source == ms.target


# ---------------------------------------------------------------------------
# properties

SMALL = space(6)
SMALL_FP = FeaturePartition(SMALL, (0, 1, 2, 3), (4,), (5,))
SMALL_MS = MappingSpec(
    SMALL,
    4,
    1,
    0,
    (
        (frozenset(), frozenset()),
        (frozenset({Literal(4)}), frozenset({~Literal(4)})),
        (frozenset({Literal(5)}), frozenset({~Literal(5)})),
        (frozenset({Literal(4), Literal(5)}), frozenset({~Literal(4), Literal(5)})),
    ),
)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_fair_verdicts_are_sound(seed, with_bk):
    rng = np.random.default_rng(seed)
    m = random_table_model(rng, 6)
    k = random_bk(rng, 6) if with_bk else None
    cons = k.constraints if k is not None else None
    for x in all_individuals(6):
        if x[4] != 1 or (k is not None and not is_real(cons, x)):
            continue
        v = audit_individual_fairness(m, x, SMALL_MS, SMALL_FP, k)
        if not v.fair:
            assert v.criterion is None
            continue
        d = m.decide(x)
        assert extends(x, v.criterion.literals)
        assert not brute_exists_flip(m, v.criterion.literals, d, cons)
        assert not brute_exists_flip(m, v.counterpart.literals, d, cons)
        assert any(is_real(cons or (), y) and extends(y, v.counterpart.literals) for y in all_individuals(6))
        assert base_literals(SMALL_FP, v.criterion.literals) == base_literals(SMALL_FP, v.counterpart.literals)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mapping_preserves_base_literals(seed):
    rng = np.random.default_rng(seed)
    x = Individual.from_code(int(rng.integers(0, 64)), 6)
    chosen = [l for l in x.literals() if rng.integers(0, 2)]
    xp = Explanation(frozenset(chosen), 1)
    cp = map_explanation(SMALL_MS, SMALL_FP, xp)
    if cp is not None:
        assert base_literals(SMALL_FP, cp.literals) == base_literals(SMALL_FP, xp.literals)
        back = map_explanation(SMALL_MS.inverse(), SMALL_FP, cp)
        assert back == xp
