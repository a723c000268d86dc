from fractions import Fraction

import pytest

from blinfty import (
    Alphabet,
    Augmentation,
    DegreeContractError,
    Element,
    Generator,
    MixedModelError,
    MorphismFamily,
    OperatorFamily,
    Sentence,
    TruncationPolicy,
    assemble_hat,
    assemble_morphism,
    verify_blinfty,
    verify_morphism,
)
from blinfty.base import TruncationOverflowError
from blinfty.graded import enumerate_sentences
from blinfty.main import get_executor
from blinfty.tree import _hat_sentence, apply_augmentation, compose, hat_on_block
from blinfty.deformation import verify_augmentation

from .oracle import brute_force_hat


ALPHABETS = {
    "one-odd": {"x": 1, "y": 0, "z": 0},
    "two-odd": {"a": 1, "b": 1, "c": 0},
}


def word(alphabet, *names):
    return alphabet.canonical_word(*names)


def single(alphabet, *names, coefficient=1):
    return Element.of_word(word(alphabet, *names), coefficient)


@pytest.fixture
def cancelling():
    """d s = m1 + m2 and d m1 = -d m2 = t, so that d² s cancels"""
    alphabet = Alphabet.from_degrees({"s": 0, "m1": 1, "m2": 1, "t": 0})

    def family(sign=-1):
        return OperatorFamily(
            alphabet,
            {
                word(alphabet, "s"): single(alphabet, "m1") + single(alphabet, "m2"),
                word(alphabet, "m1"): single(alphabet, "t"),
                word(alphabet, "m2"): single(alphabet, "t", coefficient=sign),
            },
        )

    return family


@pytest.fixture
def torsion_one():
    alphabet = Alphabet.from_degrees({"a": 1, "b": 0})
    return OperatorFamily(
        alphabet, {word(alphabet, "a", "b"): Element.of_word(word(alphabet))}
    )


@pytest.mark.parametrize("name", sorted(ALPHABETS))
@pytest.mark.parametrize("max_input", [2, 3])
@pytest.mark.parametrize("seed", range(6))
def test_gluing_matches_letter_level_reference(random_family, name, max_input, seed):
    alphabet = Alphabet.from_degrees(ALPHABETS[name])
    p = random_family(alphabet, seed, entries=5, max_input=max_input)
    truncation = TruncationPolicy(max_letters=4, max_sentences=3)
    for sentence in enumerate_sentences(alphabet, truncation):
        x = Element.of(sentence)
        assert assemble_hat(p, x) == brute_force_hat(p, x), str(sentence)


def test_gluing_is_linear(random_family, xyz):
    p = random_family(xyz, 3)
    sentences = enumerate_sentences(xyz, TruncationPolicy(max_letters=3))
    x = Element.of(sentences[5], 2) + Element.of(sentences[9], Fraction(-1, 3))
    expected = assemble_hat(p, Element.of(sentences[5])) * 2
    expected = expected - assemble_hat(p, Element.of(sentences[9])) * Fraction(1, 3)
    assert assemble_hat(p, x) == expected


def test_cancelling_family_is_blinfty(cancelling):
    report = verify_blinfty(cancelling(), TruncationPolicy(max_letters=3))
    assert report
    assert report.checked > 0
    assert not report.failures


def test_flipped_sign_breaks_the_axiom(cancelling):
    report = verify_blinfty(cancelling(sign=1), TruncationPolicy(max_letters=3))
    assert not report
    assert report.failures[0].label == "s"
    assert str(report.failures[0].residual) == "2 t"


def test_unit_from_two_words(torsion_one):
    a, b = (Sentence((word(torsion_one.alphabet, n),)) for n in "ab")
    ab, _ = a * b
    assert assemble_hat(torsion_one, Element.of(ab)) == Element.unit()


def test_scalar_words_do_not_glue(torsion_one):
    alphabet = torsion_one.alphabet
    sentence = Sentence((word(alphabet), word(alphabet, "a"), word(alphabet, "b")))
    assert assemble_hat(torsion_one, Element.of(sentence)) == Element.of(
        Sentence.scalar(2)
    )


def test_gluing_inside_one_word_is_impossible(torsion_one):
    x = single(torsion_one.alphabet, "a", "b")
    assert not assemble_hat(torsion_one, x)


def test_block_of_wrong_arity(torsion_one):
    block = [word(torsion_one.alphabet, "a")]
    assert not hat_on_block(torsion_one, block)
    block = [word(torsion_one.alphabet, "a"), word(torsion_one.alphabet, "b")]
    assert hat_on_block(torsion_one, block) == Element.unit()


def test_torsion_one_is_blinfty(torsion_one):
    assert verify_blinfty(torsion_one, TruncationPolicy())


def test_z2_contract_is_enforced(xyz):
    with pytest.raises(DegreeContractError):
        OperatorFamily(xyz, {word(xyz, "x"): single(xyz, "x")})


def test_outputs_are_single_words(xyz):
    output = Element.of_words([word(xyz, "y"), word(xyz, "z")])
    with pytest.raises(DegreeContractError):
        OperatorFamily(xyz, {word(xyz, "x"): output})


def test_inputs_are_nonempty(xyz):
    with pytest.raises(DegreeContractError):
        OperatorFamily(xyz, {word(xyz): single(xyz, "x")})


def test_rational_degree_contract():
    alphabet = Alphabet(
        [
            Generator("u", 0, 0, q_degree=Fraction(2)),
            Generator("v", 1, 1, q_degree=Fraction(1)),
            Generator("w", 2, 1, q_degree=Fraction(3)),
        ],
        n=3,
    )
    OperatorFamily(alphabet, {word(alphabet, "u"): single(alphabet, "v")})
    with pytest.raises(DegreeContractError):
        OperatorFamily(alphabet, {word(alphabet, "u"): single(alphabet, "w")})


def test_action_decreasing_is_verified():
    alphabet = Alphabet.from_degrees({"a": 1, "b": 0}, actions={"a": 2})
    OperatorFamily(
        alphabet, {word(alphabet, "a"): single(alphabet, "b")}, action_decreasing=True
    )
    with pytest.raises(DegreeContractError):
        OperatorFamily(
            alphabet,
            {word(alphabet, "a"): single(alphabet, "b", "b")},
            action_decreasing=True,
        )


def test_foreign_letters_are_rejected(xyz):
    other = Alphabet.from_degrees({"p": 1})
    with pytest.raises(MixedModelError):
        OperatorFamily(xyz, {word(other, "p"): single(xyz, "y")})


def test_inputs_must_fit_truncation(torsion_one):
    alphabet = torsion_one.alphabet
    sentence = Sentence.scalar(2)
    truncation = TruncationPolicy(max_sentences=1)
    with pytest.raises(TruncationOverflowError):
        assemble_hat(torsion_one, Element.of(sentence), truncation)
    assert not assemble_hat(torsion_one, single(alphabet, "a"), truncation)


@pytest.mark.parametrize("seed", range(3))
def test_identity_morphism(random_family, xyz, seed):
    identity = MorphismFamily.identity(xyz)
    p = random_family(xyz, seed)
    truncation = TruncationPolicy(max_letters=3)
    for sentence in enumerate_sentences(xyz, truncation):
        x = Element.of(sentence)
        assert assemble_morphism(identity, x) == x
    assert verify_morphism(identity, p, p, truncation)


def test_morphism_rejects_mismatched_families(xyz, torsion_one):
    identity = MorphismFamily.identity(xyz)
    with pytest.raises(MixedModelError):
        verify_morphism(identity, torsion_one, torsion_one, TruncationPolicy())


@pytest.fixture
def augmented(model):
    return model("augmented")


def test_augmentation(augmented):
    p, epsilon = augmented.operators, augmented.augmentation
    alphabet = p.alphabet
    assert verify_augmentation(p, epsilon, TruncationPolicy(max_letters=3))
    y = Element.of_word(word(alphabet, "y"))
    z = Element.of_word(word(alphabet, "z"))
    assert apply_augmentation(epsilon, y.odot(y)) == 1
    assert apply_augmentation(epsilon, y.odot(z)) == 0
    assert apply_augmentation(epsilon, single(alphabet, "y", "y", coefficient=3)) == 3


def test_broken_augmentation(augmented):
    p = augmented.operators
    alphabet = p.alphabet
    epsilon = Augmentation(alphabet, {word(alphabet, "y"): 1, word(alphabet, "z"): 1})
    report = verify_augmentation(p, epsilon, TruncationPolicy(max_letters=3))
    assert not report
    assert report.failures[0].label == "x"


def test_composition(augmented):
    alphabet = augmented.alphabet
    identity = MorphismFamily.identity(alphabet)
    assert compose(identity, identity) == identity
    assert compose(augmented.augmentation, identity) == augmented.augmentation


def scaling(source, target, images):
    """A morphism sending each letter to a multiple of one target letter"""
    entries = {
        word(source, name): single(target, image, coefficient=Fraction(value))
        for name, (image, value) in images.items()
    }
    return MorphismFamily(source, target, entries)


def torsion_copy(value):
    alphabet = Alphabet.from_degrees({"c": 1, "d": 0})
    return OperatorFamily(
        alphabet,
        {word(alphabet, "c", "d"): Element.of_word(word(alphabet), Fraction(value))},
    )


@pytest.mark.parametrize("value", ["4", "-3/2"])
def test_composite_through_a_rescaled_copy(torsion_one, value):
    copy = torsion_copy(value)
    source, target = torsion_one.alphabet, copy.alphabet
    truncation = TruncationPolicy(max_letters=3)
    phi = scaling(source, target, {"a": ("c", 1), "b": ("d", 1 / Fraction(value))})
    psi = scaling(target, source, {"c": ("a", 2), "d": ("b", Fraction(value) / 2)})
    assert verify_morphism(phi, torsion_one, copy, truncation)
    assert verify_morphism(psi, copy, torsion_one, truncation)

    composite = compose(psi, phi)
    assert composite == scaling(source, source, {"a": ("a", 2), "b": ("b", "1/2")})
    assert verify_morphism(composite, torsion_one, torsion_one, truncation)


def test_composite_chain_maps(cancelling):
    p = cancelling()
    alphabet = p.alphabet
    truncation = TruncationPolicy(max_letters=3)
    swap = scaling(
        alphabet,
        alphabet,
        {"s": ("s", 1), "m1": ("m2", 1), "m2": ("m1", 1), "t": ("t", -1)},
    )
    doubled = {g.name: (g.name, 2) for g in alphabet.generators}
    double = scaling(alphabet, alphabet, doubled)
    assert verify_morphism(swap, p, p, truncation)
    assert verify_morphism(double, p, p, truncation)

    assert compose(swap, swap) == MorphismFamily.identity(alphabet)
    composite = compose(swap, double)
    assert composite == scaling(
        alphabet,
        alphabet,
        {"s": ("s", 2), "m1": ("m2", 2), "m2": ("m1", 2), "t": ("t", -2)},
    )
    assert verify_morphism(composite, p, p, truncation)


def test_broken_morphism_reports_first_witness(torsion_one):
    alphabet = torsion_one.alphabet
    phi = scaling(alphabet, alphabet, {"a": ("a", 2), "b": ("b", 1)})
    truncation = TruncationPolicy(max_letters=2)
    report = verify_morphism(phi, torsion_one, torsion_one, truncation)
    assert not report
    assert report.failures[0].label == "a⊙b"
    assert report.failures[0].residual.scalar_value() == -1


@pytest.mark.parametrize("seed", range(3))
def test_threads_share_sentence_images(random_family, xyz, seed):
    p = random_family(xyz, seed)
    sentences = enumerate_sentences(xyz, TruncationPolicy(max_letters=3))
    serial = [assemble_hat(p, Element.of(s)) for s in sentences]
    with get_executor(8) as executor:
        threaded = executor.map(lambda s: assemble_hat(p, Element.of(s)), sentences)
        hits = _hat_sentence.cache_info().hits
        again = executor.map(lambda s: assemble_hat(p, Element.of(s)), sentences)
    assert threaded == serial
    assert again == serial
    assert _hat_sentence.cache_info().hits >= hits + len(sentences)
