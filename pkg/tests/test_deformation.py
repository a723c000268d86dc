import random
from fractions import Fraction

import pytest

from blinfty import (
    Alphabet,
    Augmentation,
    AugmentationError,
    CoefficientRing,
    DegreeContractError,
    DivergentSeriesError,
    Element,
    MaurerCartanElement,
    MaurerCartanResidualError,
    OperatorFamily,
    RingKind,
    Sentence,
    Tag,
    TruncationPolicy,
    WeightError,
    deform,
    linearize,
    verify_blinfty,
)
from blinfty.deformation import (
    augmentation_search,
    check_pmc_identity,
    exp_chain_map_check,
    exp_inverse_check,
    exp_minus_one,
    verify_mc,
)
from blinfty.graded import enumerate_sentences


NOVIKOV = CoefficientRing(RingKind.Novikov)


def test_exponential_series(xyz):
    y = xyz.canonical_word("y")
    e = exp_minus_one(Element.of_word(y, tag=Tag(1)), TruncationPolicy())
    assert len(e) == 4
    for i, expected in enumerate([1, Fraction(1, 2), Fraction(1, 6)], start=1):
        assert e.coefficient(Sentence((y,) * i), Tag(i)) == expected

    short = exp_minus_one(Element.of_word(y, tag=Tag(1)), TruncationPolicy(order=2))
    assert len(short) == 2


def test_exponential_of_two_words(xyz):
    y, z = xyz.canonical_word("y"), xyz.canonical_word("z")
    a = Element.of_word(y, tag=Tag(1)) + Element.of_word(z, tag=Tag(1))
    e = exp_minus_one(a, TruncationPolicy(order=2))
    assert e.coefficient(Sentence((y, z)), Tag(2)) == 1
    assert e.coefficient(Sentence((y, y)), Tag(2)) == Fraction(1, 2)


def test_exponential_needs_positive_filtration(xyz):
    y = Element.of_word(xyz.canonical_word("y"))
    with pytest.raises(DivergentSeriesError):
        exp_minus_one(y, TruncationPolicy())


def test_exponential_needs_even_degree(xyz):
    x = Element.of_word(xyz.canonical_word("x"), tag=Tag(1))
    with pytest.raises(DegreeContractError):
        exp_minus_one(x, TruncationPolicy())


def test_maurer_cartan_element_contract(xyz):
    y = xyz.canonical_word("y")
    with pytest.raises(DegreeContractError):
        MaurerCartanElement(
            Element.of_word(xyz.canonical_word("x"), tag=Tag(1)), NOVIKOV
        )
    with pytest.raises(DivergentSeriesError):
        MaurerCartanElement(Element.of_word(y), NOVIKOV)
    with pytest.raises(DegreeContractError):
        body = Element.of_words([y, xyz.canonical_word("z")], tag=Tag(1))
        MaurerCartanElement(body, NOVIKOV)


@pytest.fixture
def sourced():
    """p(e) = o, under which no element T e solves the Maurer-Cartan equation"""
    alphabet = Alphabet.from_degrees({"e": 0, "o": 1})
    p = OperatorFamily(
        alphabet,
        {alphabet.canonical_word("e"): Element.of_word(alphabet.canonical_word("o"))},
    )
    mc = MaurerCartanElement(
        Element.of_word(alphabet.canonical_word("e"), tag=Tag(1)), NOVIKOV, alphabet
    )
    return p, mc


def test_maurer_cartan_residual(sourced):
    p, mc = sourced
    report = verify_mc(p, mc, TruncationPolicy())
    assert not report
    assert report.failures[0].label == "order 1"
    assert str(report.failures[0].residual) == "T^1 o"
    with pytest.raises(MaurerCartanResidualError):
        deform(p, mc, TruncationPolicy())


def test_order_two_maurer_cartan(model):
    spec = model("order2")
    assert verify_mc(spec.operators, spec.mc, TruncationPolicy())


def test_deformed_family(workbench):
    bench = workbench("order2")
    deformed = bench.deform()
    family = deformed.family
    alphabet = family.alphabet
    assert deformed.report
    assert deformed.order == 4
    assert len(family) == 4

    def entry(*names):
        return str(family.get(alphabet.canonical_word(*names)))

    assert entry("a") == "T^2 t1 t2"
    assert entry("a", "u") == "T^1 t2"
    assert entry("a", "w") == "T^1 t1"
    assert entry("a", "u", "w") == "1"


@pytest.mark.parametrize("seed", range(3))
def test_deformation_identity(random_family, xyz, seed):
    p = random_family(xyz, seed)
    y = xyz.canonical_word("y")
    a = MaurerCartanElement(Element.of_word(y, tag=Tag(1)), NOVIKOV, xyz)
    truncation = TruncationPolicy(max_letters=3, order=2)
    for sentence in enumerate_sentences(xyz, TruncationPolicy(3, 2)):
        report = check_pmc_identity(p, a, Element.of(sentence), truncation)
        assert report, str(sentence)


def test_deformation_identity_needs_pure_degree(random_family, xyz):
    p = random_family(xyz, 0)
    y = Element.of_word(xyz.canonical_word("y"), tag=Tag(1))
    a = MaurerCartanElement(y, NOVIKOV)
    s = Element.of_word(xyz.canonical_word("x")) + Element.of_word(
        xyz.canonical_word("y")
    )
    with pytest.raises(DegreeContractError):
        check_pmc_identity(p, a, s, TruncationPolicy())


def test_exponential_is_a_chain_map(model):
    spec = model("order2")
    truncation = TruncationPolicy()
    sentences = enumerate_sentences(spec.alphabet, TruncationPolicy(2, 2))
    for sentence in sentences:
        x = Element.of(sentence)
        assert exp_chain_map_check(spec.operators, spec.mc, x, truncation)
        assert exp_inverse_check(spec.mc, x, truncation)


def test_chain_map_needs_maurer_cartan(sourced):
    p, mc = sourced
    with pytest.raises(MaurerCartanResidualError):
        exp_chain_map_check(p, mc, Element.unit(), TruncationPolicy())


LAYERED = TruncationPolicy(max_letters=3, order=4)


@pytest.mark.parametrize("seed", range(100))
def test_random_deformations(layered_model, seed):
    p, mc = layered_model(seed)
    alphabet = p.alphabet
    assert verify_blinfty(p, LAYERED)
    assert verify_mc(p, mc, LAYERED)

    deformed = deform(p, mc, LAYERED)
    assert deformed.report
    assert verify_blinfty(deformed.family, LAYERED)

    constant = Element.of_word(alphabet.canonical_word(), seed % 3 + 1, Tag(1))
    shifted = MaurerCartanElement(mc.body + constant, NOVIKOV, alphabet)
    assert shifted.constant == constant
    assert deform(p, shifted, LAYERED).family == deformed.family

    sentences = enumerate_sentences(alphabet, TruncationPolicy(2, 2))
    for sentence in random.Random(seed).sample(sentences, 3):
        x = Element.of(sentence)
        assert check_pmc_identity(p, mc, x, LAYERED), str(sentence)
        assert exp_chain_map_check(p, mc, x, LAYERED), str(sentence)


def test_constant_term_alone_leaves_the_family(layered_model):
    p, mc = layered_model(0)
    alphabet = p.alphabet
    constant = Element.of_word(alphabet.canonical_word(), 1, Tag(1))
    only = MaurerCartanElement(constant, NOVIKOV, alphabet)
    family = deform(p, only, LAYERED).family
    assert family.entries == dict(p.items())


def test_linearize(workbench):
    linearized = workbench("augmented").linearize()
    assert linearized.report
    assert linearized.report.checked == 24
    [(generator, image)] = linearized.differential
    assert generator.name == "x"
    assert str(image) == "z"
    assert linearized.dimensions == {0: 1, 1: 0}


def test_linearize_rejects_non_augmentation(model):
    p = model("augmented").operators
    alphabet = p.alphabet
    epsilon = Augmentation(
        alphabet, {alphabet.canonical_word("y"): 1, alphabet.canonical_word("z"): 1}
    )
    with pytest.raises(AugmentationError):
        linearize(p, epsilon, TruncationPolicy())


def test_augmentation_search(model):
    p = model("augmented").operators
    search = augmentation_search(p, TruncationPolicy(max_letters=3))
    assert search.found
    assert search.tried == 2
    assert search.augmentation.value(p.alphabet.canonical_word("y")) == -1
    assert str(search) == "augmentation: ε(y) = -1"


def test_augmentation_search_below_action(model):
    p = model("augmented").operators
    search = augmentation_search(
        p, TruncationPolicy(max_letters=3), action_bound=Fraction(1, 2)
    )
    assert search.tried == 1
    assert str(search) == "augmentation: ε = 0"


def test_augmentation_search_fails_on_torsion(model):
    p = model("torsion1").operators
    search = augmentation_search(p, TruncationPolicy(max_letters=2))
    assert not search.found
    assert search.tried == 3
    assert str(search) == (
        "no augmentation with values in {-1, 0, 1} on generators (3 candidates)"
    )


def test_weighted_witness(workbench):
    bench = workbench("order2")
    witness = bench.weighted_witness(2)
    assert witness.length == 3
    assert witness.bound == 2
    assert str(witness) == "coefficient: T^2 a⊙u⊙w; length 3; T ≤ 2"
    with pytest.raises(WeightError):
        bench.weighted_witness(3)
