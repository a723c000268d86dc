import random
from fractions import Fraction
from pathlib import Path

import pytest

from blinfty import (
    Alphabet,
    CoefficientRing,
    Element,
    MaurerCartanElement,
    OperatorFamily,
    RingKind,
    Tag,
    Workbench,
    load_model,
)
from blinfty.graded import enumerate_words


GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def xyz():
    """One odd and two even generators"""
    return Alphabet.from_degrees({"x": 1, "y": 0, "z": 0})


@pytest.fixture
def model():
    return load_model


@pytest.fixture
def workbench():
    benches = []

    def make(name, **kwargs):
        bench = Workbench(name, **kwargs)
        benches.append(bench)
        return bench

    yield make
    for bench in benches:
        bench.close()


@pytest.fixture
def golden():
    def read(name):
        return (GOLDEN / f"{name}.txt").read_text(encoding="utf-8").rstrip("\n")

    return read


def make_random_family(alphabet, seed, entries=4, max_input=2):
    """
    An operator family with random structure constants. It satisfies the degree
    contract but usually not the BL_∞ axiom.
    """
    rng = random.Random(seed)
    words = [w for w in enumerate_words(alphabet, max_input) if not w.is_scalar]
    outputs = enumerate_words(alphabet, 2)
    table = {}
    for word in rng.sample(words, min(entries, len(words))):
        targets = [o for o in outputs if o.z2 != word.z2]
        output = Element()
        for target in rng.sample(targets, min(2, len(targets))):
            value = Fraction(rng.choice([-2, -1, 1, 3]))
            output = output + Element.of_word(target, value)
        table[word] = output
    return OperatorFamily(alphabet, table)


@pytest.fixture
def random_family():
    return make_random_family


LAYERED_SOURCE = {"w", "x", "y"}
LAYERED_TARGET = {"u", "v"}


def make_layered_model(seed, entries=4):
    """
    A BL_∞ algebra with a Maurer-Cartan element, both random.

    Inputs are words in w, x, y with at least one odd letter, outputs are words in u, v,
    so no output feeds another entry. The Maurer-Cartan element only uses even words
    with at most one y, so p̂ sees it solely through entries that read y.
    """
    rng = random.Random(seed)
    alphabet = Alphabet.from_degrees({"w": 1, "x": 1, "y": 0, "u": 1, "v": 0})

    def spelled_in(letters):
        return lambda word: set(word.names) <= letters

    words = enumerate_words(alphabet, 3)
    inputs = [
        w
        for w in words
        if w and spelled_in(LAYERED_SOURCE)(w) and {"w", "x"} & set(w.names)
    ]
    outputs = [w for w in words if len(w) <= 2 and spelled_in(LAYERED_TARGET)(w)]
    table = {}
    for word in rng.sample(inputs, entries):
        targets = [o for o in outputs if o.z2 != word.z2]
        output = Element()
        for target in rng.sample(targets, 2):
            output = output + Element.of_word(target, rng.choice([-2, -1, 1, 3]))
        table[word] = output
    p = OperatorFamily(alphabet, table)

    spellings = [("y",), ("v",), ("y", "v"), ("v", "v")]
    body = Element()
    for names in rng.sample(spellings, rng.randint(1, 3)):
        coefficient = Fraction(rng.choice([-1, 1, 2]), rng.choice([1, 2]))
        tag = Tag(rng.randint(1, 2))
        body = body + Element.of_word(alphabet.canonical_word(*names), coefficient, tag)
    ring = CoefficientRing(RingKind.Novikov)
    return p, MaurerCartanElement(body, ring, alphabet)


@pytest.fixture
def layered_model():
    return make_layered_model
