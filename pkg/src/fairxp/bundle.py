"""The reference bundle: a 10-feature credit model, dataset, background
knowledge, mapping and partition reproducing the worked credit examples.

Paths of the form ``bundle:<name>`` resolve to files shipped in this package.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .fairness import FeaturePartition, MappingSpec
from .io import parse_bk, parse_dataset, parse_mapping, parse_partition
from .knowledge import ConstraintSet, Dataset
from .logic import Individual
from .models import DecisionModel, load_model

PREFIX = "bundle:"

MODEL = "credit_model.json"
DATASET = "credit_data.csv"
BK = "k1.bk"
MAPPING = "credit.map"
PARTITION = "credit.partition"

HAWA = "A=1,G=0,J=0,H=0,S=0,B=1,C=0,D=0,P=1,M=1"
YAHYA = "A=1,G=1,J=0,H=0,S=0,B=0,C=0,D=0,P=1,M=1"


def read_bytes(path: str | Path) -> bytes:
    path = str(path)
    if path.startswith(PREFIX):
        name = path[len(PREFIX):]
        return resources.files("fairxp").joinpath("data").joinpath(name).read_bytes()
    return Path(path).read_bytes()


def read_text(path: str | Path) -> str:
    return read_bytes(path).decode("ascii")


def model() -> DecisionModel:
    return load_model(read_bytes(PREFIX + MODEL))


def dataset() -> Dataset:
    return parse_dataset(read_text(PREFIX + DATASET))


def knowledge() -> ConstraintSet:
    return parse_bk(model().features, read_text(PREFIX + BK))


def partition() -> FeaturePartition:
    return parse_partition(model().features, read_text(PREFIX + PARTITION))


def mapping() -> MappingSpec:
    return parse_mapping(model().features, read_text(PREFIX + MAPPING), partition())


def hawa() -> Individual:
    return model().features.parse_individual(HAWA)


def yahya() -> Individual:
    return model().features.parse_individual(YAHYA)
