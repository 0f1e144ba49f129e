import json
import random
from fractions import Fraction
from importlib import resources

import pytest

from spinhom.model import LatticeModel, parse_model

FIXTURES = resources.files("spinhom").joinpath("fixtures")

FIXTURE_NAMES = [
    "chain_soft_even",
    "chain_soft_even_anti",
    "two_chains",
    "chain_two_weak_scales",
    "soft_inclusions_2d",
    "diagonal_2d",
    "islands_1d",
]


def fixture_document(name: str) -> dict:
    return json.loads(FIXTURES.joinpath(name + ".json").read_text())


def fixture_model(name: str) -> LatticeModel:
    return parse_model(fixture_document(name))


@pytest.fixture(params=FIXTURE_NAMES)
def any_model(request):
    return fixture_model(request.param)


def random_chain_model(rng: random.Random, nonneg_weak: bool = True) -> LatticeModel:
    """Small random two-residue chain with a hard sublattice on the odd sites.

    The even residue is soft (label 0) with probability one half, otherwise a
    second hard chain.  Weak couplings and forcing terms are random dyadics,
    strong couplings stay positive so the model always validates.
    """
    soft = rng.random() < 0.5
    labels = {"0": 0 if soft else 2, "1": 1}
    w1 = str(Fraction(rng.randrange(1, 5), 8))
    strong = [
        {"from": "1", "offset": [2], "weight": w1},
        {"from": "1", "offset": [-2], "weight": w1},
    ]
    if not soft:
        w0 = str(Fraction(rng.randrange(1, 5), 8))
        strong += [
            {"from": "0", "offset": [2], "weight": w0},
            {"from": "0", "offset": [-2], "weight": w0},
        ]
    lo = 0 if nonneg_weak else -4
    wv = Fraction(rng.randrange(lo, 5), 16)
    weak = []
    if wv:
        for res in ("0", "1"):
            weak += [
                {"from": res, "offset": [1], "weight": str(wv)},
                {"from": res, "offset": [-1], "weight": str(wv)},
            ]
    doc = {
        "dimension": 1,
        "period": 2,
        "num_phases": 1 if soft else 2,
        "labels": labels,
        "strong_bonds": strong,
        "weak_bonds": weak,
    }
    if rng.random() < 0.7:
        doc["forcing"] = {
            "0": {"plus": str(Fraction(rng.randrange(0, 4), 2)), "minus": "0"},
            "1": {"plus": "0", "minus": str(Fraction(rng.randrange(0, 4), 2))},
        }
    return parse_model(doc)
