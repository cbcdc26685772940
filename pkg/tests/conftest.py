import numpy as np
import pytest

from fairxp import bundle
from fairxp.knowledge import ConstraintSet
from fairxp.logic import FeatureSpace, Literal, forbid
from fairxp.models import TruthTableModel

NAMES = "ABCDEFGHIJKL"


def space(n):
    return FeatureSpace(tuple(NAMES[:n]))


def random_table_model(rng, n):
    return TruthTableModel.from_array(space(n), rng.integers(0, 2, size=1 << n))


def random_patterns(rng, n, count, max_arity=3, avoid=()):
    feats = [v for v in range(n) if v not in avoid]
    out = []
    for _ in range(count):
        size = int(rng.integers(1, min(max_arity, len(feats)) + 1))
        chosen = rng.choice(feats, size=size, replace=False)
        out.append([Literal(int(f), bool(rng.integers(0, 2))) for f in chosen])
    return out


def random_bk(rng, n, count=None, avoid=()):
    """A satisfiable set of forbidden patterns (retries until satisfiable)."""
    from fairxp.errors import InputError

    while True:
        c = int(rng.integers(1, 4)) if count is None else count
        try:
            return ConstraintSet(space(n), tuple(forbid(p) for p in random_patterns(rng, n, c, avoid=avoid)))
        except InputError:
            continue


@pytest.fixture(scope="session")
def credit():
    return bundle.model()


@pytest.fixture(scope="session")
def k1():
    return bundle.knowledge()


@pytest.fixture(scope="session")
def F(credit):
    return credit.features


@pytest.fixture(scope="session")
def hawa():
    return bundle.hawa()


@pytest.fixture(scope="session")
def yahya():
    return bundle.yahya()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def lits(features, text):
    """'A & !S & P' -> frozenset of literals."""
    text = text.strip()
    if not text:
        return frozenset()
    return frozenset(features.literal(t) for t in text.split("&"))


def constant(features, value):
    return TruthTableModel(features, ("1" if value else "0") * (1 << features.n))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
