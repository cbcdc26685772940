"""Regenerate the reference bundle under src/fairxp/data/.

The dataset is a fixed-seed sample of real individuals under the
forbidden pattern !G & P & M, with Yahya as row 0.
"""
from pathlib import Path

import numpy as np

from fairxp.io import format_bk, format_dataset
from fairxp.knowledge import ConstraintSet, Dataset, mine_forbidden_patterns
from fairxp.logic import FeatureSpace, Individual, Literal, forbid
from fairxp.models import LinearThresholdModel, save_model

OUT = Path(__file__).resolve().parents[1] / "src" / "fairxp" / "data"
FEATURES = FeatureSpace(tuple("AGJHSBCDPM"))
SEED = 20240917
ROWS = 400

WEIGHTS = ("12", "-6", "0", "0", "-2", "4", "0", "-4", "4", "2")
BIAS = "-10.5"

MAPPING = """\
# Credit mapping from male (G=1) to female (G=0) applicants.
# Base literals (A, J, H, S, B, C, D) are copied unchanged.
mapping G: 1 -> 0
{} => {}
{G} => {!G}
{P, M} => {!G, !M}
"""

PARTITION = """\
base: A, J, H, S, B, C, D
protected: G
equivalence: P, M
"""


def main():
    G, P, M = (FEATURES.index(c) for c in "GPM")
    k1 = ConstraintSet(FEATURES, (forbid([Literal(G, False), Literal(P), Literal(M)]),))
    real = np.flatnonzero(k1.real_mask)
    rng = np.random.default_rng(SEED)
    picks = rng.choice(real, size=ROWS - 1, replace=True)
    yahya = Individual((1, 1, 0, 0, 0, 0, 0, 0, 1, 1))
    rows = [yahya] + [Individual.from_code(int(c), FEATURES.n) for c in picks]
    data = Dataset(FEATURES, tuple(rows))

    mined = mine_forbidden_patterns(data, 3)
    assert mined.constraints == k1.constraints, mined.constraints

    model = LinearThresholdModel(FEATURES, WEIGHTS, BIAS)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "credit_model.json").write_bytes(save_model(model))
    (OUT / "credit_data.csv").write_text(format_dataset(data))
    (OUT / "k1.bk").write_text("# Learned from credit_data.csv (zero support, arity 3).\n" + format_bk(k1))
    (OUT / "credit.map").write_text(MAPPING)
    (OUT / "credit.partition").write_text(PARTITION)
    print(f"wrote bundle to {OUT}")


if __name__ == "__main__":
    main()
