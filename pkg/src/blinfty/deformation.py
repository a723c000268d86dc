# -*- coding: utf-8 -*-
"""
Maurer-Cartan elements and the structures they induce

A Maurer-Cartan element deforms an operator family to p_mc, whose entries are the
single-word parts of p̂(v₁⊙…⊙v_k⊙e^mc). An augmentation induces a change of
coordinates that linearizes the family. All computations in completed coefficients
are exact up to the truncation order R of the :class:`~blinfty.base.TruncationPolicy`.
"""
from __future__ import annotations

# system imports
import logging
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable

# local imports
from .base import (
    AugmentationError,
    DegreeContractError,
    DivergentSeriesError,
    MaurerCartanResidualError,
    WeightError,
    Report,
    TruncationPolicy,
    Witness,
    ExecutorBase,
)
from .graded import Alphabet, Generator, Word, SCALAR_WORD, enumerate_words
from .coefficients import CoefficientRing, Element, RingKind
from .tree import (
    Augmentation,
    MorphismFamily,
    OperatorFamily,
    assemble_hat,
    assemble_morphism,
    verify_blinfty,
    verify_morphism,
)
from .homology import HomologyResult, build_complex, homology
from .serial import SerialExecutor

__all__ = [
    "MaurerCartanElement",
    "DeformedFamily",
    "LinearizedFamily",
    "AugmentationSearch",
    "WeightedWitness",
    "exp_minus_one",
    "verify_mc",
    "deform",
    "check_pmc_identity",
    "exp_chain_map_check",
    "exp_inverse_check",
    "linearize",
    "augmentation_search",
    "verify_augmentation",
    "weighted_witness",
]

logger = logging.getLogger(__name__)


def _infer_ring(x: Element) -> CoefficientRing:
    novikov = any(tag.novikov for _, tag, _ in x)
    if any(tag.group for _, tag, _ in x):
        raise DegreeContractError("group exponents need an explicit group-ring")
    rank = max((len(tag.weight) for _, tag, _ in x), default=0)
    kind = RingKind.Novikov if novikov else RingKind.Rational
    return CoefficientRing(kind, weight_rank=rank)


def _by_order(ring: CoefficientRing, residual: Element) -> list[Witness]:
    """Splits a residual into one witness per filtration value"""
    orders: dict[Fraction, dict] = {}
    for sentence, tag, value in residual:
        orders.setdefault(ring.filtration(tag), {})[(sentence, tag)] = value
    return [
        Witness(f"order {order}", Element(terms))
        for order, terms in sorted(orders.items())
    ]


@dataclass(frozen=True)
class MaurerCartanElement:
    """An even element of SV with coefficients of strictly positive filtration

    The same type describes the deforming elements of :func:`check_pmc_identity`,
    which need not solve the Maurer-Cartan equation.
    """

    body: Element
    """Linear combination of single words"""

    ring: CoefficientRing
    """Coefficient ring the body lives in"""

    alphabet: Alphabet | None = None
    """Model the body belongs to, enables the rational degree check"""

    def __post_init__(self) -> None:
        graded = self.alphabet is not None and self.alphabet.is_q_graded
        for sentence, tag, _ in self.body:
            if len(sentence) != 1:
                raise DegreeContractError(f"'{sentence}' is not a single word")
            word = sentence.words[0]
            if word.z2:
                raise DegreeContractError(f"'{word}' does not have even degree")
            self.ring.validate(tag)
            if not self.ring.is_positive(tag):
                raise DivergentSeriesError(
                    f"term '{word}' has zero filtration, its exponential diverges"
                )
            if graded and not word.is_scalar and self.alphabet.n is not None:
                if word.q != 2 * (self.alphabet.n - 3):
                    raise DegreeContractError(
                        f"'{word}' has rational degree {word.q}, "
                        f"expected {2 * (self.alphabet.n - 3)}"
                    )

    @classmethod
    def zero(cls, ring: CoefficientRing) -> MaurerCartanElement:
        return cls(Element(), ring)

    @property
    def constant(self) -> Element:
        """Multiples of the scalar word"""
        return self.body.filter(lambda s, _: s.is_scalar)

    @property
    def weights(self) -> list[tuple[int, ...]]:
        """Distinct intersection weights of the terms, in increasing order"""
        return sorted({tag.weight for _, tag, _ in self.body})

    def __bool__(self) -> bool:
        return bool(self.body)

    def __str__(self) -> str:
        return str(self.body)


def exp_minus_one(
    a: Element, truncation: TruncationPolicy, ring: CoefficientRing | None = None
) -> Element:
    """
    The series e^a − 1 = Σ_{i≥1} a^{⊙i}/i!, truncated at order ``truncation.order``.

    Repeated words merge in canonical form, so the isotropy factors of the series come
    out of the ⊙-product itself.

    :param a: An element of even degree with coefficients of positive filtration.
    :param truncation: Supplies the truncation order R.
    :param ring: Coefficient ring, inferred from the tags of ``a`` when omitted.
    :raises DivergentSeriesError: if a term has zero filtration.
    :raises DegreeContractError: if a term has odd degree.
    """
    ring = (ring or _infer_ring(a)).with_order(truncation.order)
    for sentence, tag, _ in a:
        if sentence.z2:
            raise DegreeContractError(f"'{sentence}' does not have even degree")
        if not ring.is_positive(tag):
            raise DivergentSeriesError(
                f"term '{sentence}' has zero filtration, its exponential diverges"
            )

    a = a.truncate(ring)
    result = Element()
    power = a
    i = 1
    while power:
        result = result + power * Fraction(1, factorial(i))
        power = power.odot(a, ring)
        i += 1
    logger.debug("e^a - 1 has %s terms after %s powers", len(result), i - 1)
    return result


def _exp(x: Element, e: Element, ring: CoefficientRing) -> Element:
    """x⊙e^a given e = e^a − 1"""
    return x + x.odot(e, ring)


def verify_mc(
    p: OperatorFamily, mc: MaurerCartanElement, truncation: TruncationPolicy
) -> Report:
    """
    Checks the Maurer-Cartan equation p̂(e^mc − 1) = 0 to order R.

    :returns: A report with one witness per offending filtration value.
    """
    ring = mc.ring.with_order(truncation.order)
    e = exp_minus_one(mc.body, truncation, mc.ring)
    residual = assemble_hat(p, e).truncate(ring)
    return Report.from_failures(
        "Maurer-Cartan equation",
        len(e),
        _by_order(ring, residual),
        order=truncation.order,
    )


def _letters(word: Word) -> Element:
    return Element.of_words([Word((g,)) for g in word.letters])


def _deformed_table(
    p: OperatorFamily,
    a: MaurerCartanElement,
    truncation: TruncationPolicy,
    executor: ExecutorBase,
) -> OperatorFamily:
    ring = a.ring.with_order(truncation.order)
    e = exp_minus_one(a.body, truncation, a.ring)
    words = [w for w in enumerate_words(p.alphabet, truncation.max_letters) if w]

    def entry(word: Word) -> Element:
        image = assemble_hat(p, _exp(_letters(word), e, ring)).truncate(ring)
        return image.filter(lambda s, _: len(s) == 1)

    entries = dict(zip(words, executor.map(entry, words)))
    return OperatorFamily(p.alphabet, entries, ring)


@dataclass(frozen=True)
class DeformedFamily:
    """The family p_mc together with its verification"""

    family: OperatorFamily
    """Deformed operators, entries computed up to the letter bound"""

    mc: MaurerCartanElement
    """The deforming element"""

    order: Fraction
    """Truncation order R of every coefficient"""

    report: Report
    """BL_∞ axiom of the deformed family"""


def deform(
    p: OperatorFamily,
    mc: MaurerCartanElement,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> DeformedFamily:
    """
    Computes the deformed family p_mc.

    :raises MaurerCartanResidualError: if mc fails the Maurer-Cartan equation.
    """
    executor = executor or SerialExecutor()
    check = verify_mc(p, mc, truncation)
    if not check:
        raise MaurerCartanResidualError(
            f"p̂(e^mc - 1) = {check.failures[0].residual} at {check.failures[0].label}"
        )
    family = _deformed_table(p, mc, truncation, executor)
    report = verify_blinfty(family, truncation, executor)
    if not report:
        logger.warning(
            "Deformed family fails the BL_∞ axiom to order %s", truncation.order
        )
    return DeformedFamily(family, mc, truncation.order, report)


def check_pmc_identity(
    p: OperatorFamily,
    a: MaurerCartanElement,
    s: Element,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> Report:
    """
    Checks p̂(s⊙e^a) = p̂_a(s)⊙e^a + (−1)^{|s|} s⊙p̂(e^a − 1) to order R.

    :param a: A deforming element, not necessarily Maurer-Cartan.
    :param s: An element of pure z2 degree.
    :raises DegreeContractError: if ``s`` mixes degrees.
    """
    degrees = s.z2_degrees
    if len(degrees) > 1:
        raise DegreeContractError(f"'{s}' is not of pure degree")
    sign = -1 if degrees == {1} else 1

    ring = a.ring.with_order(truncation.order)
    e = exp_minus_one(a.body, truncation, a.ring)
    pa = _deformed_table(p, a, truncation, executor or SerialExecutor())

    lhs = assemble_hat(p, _exp(s, e, ring))
    deformed = _exp(assemble_hat(pa, s), e, ring)
    curvature = s.odot(assemble_hat(p, e), ring) * sign
    residual = (lhs - deformed - curvature).truncate(ring)
    return Report.from_failures(
        "p̂_a identity", len(s), _by_order(ring, residual), order=truncation.order
    )


def exp_chain_map_check(
    p: OperatorFamily,
    mc: MaurerCartanElement,
    x: Element,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> Report:
    """
    Checks that x ↦ x⊙e^mc is a chain map, p̂(x⊙e^mc) = p̂_mc(x)⊙e^mc, to order R.

    :raises MaurerCartanResidualError: if mc fails the Maurer-Cartan equation.
    """
    if not verify_mc(p, mc, truncation):
        raise MaurerCartanResidualError(f"'{mc}' is not a Maurer-Cartan element")
    ring = mc.ring.with_order(truncation.order)
    e = exp_minus_one(mc.body, truncation, mc.ring)
    pmc = _deformed_table(p, mc, truncation, executor or SerialExecutor())
    residual = assemble_hat(p, _exp(x, e, ring)) - _exp(assemble_hat(pmc, x), e, ring)
    return Report.from_failures(
        "exp_mc chain map",
        len(x),
        _by_order(ring, residual.truncate(ring)),
        order=truncation.order,
    )


def exp_inverse_check(
    a: MaurerCartanElement, x: Element, truncation: TruncationPolicy
) -> Report:
    """Checks that exp_{−a} inverts exp_a on ``x`` to order R"""
    ring = a.ring.with_order(truncation.order)
    forward = exp_minus_one(a.body, truncation, a.ring)
    backward = exp_minus_one(-a.body, truncation, a.ring)
    residual = (_exp(_exp(x, forward, ring), backward, ring) - x).truncate(ring)
    return Report.from_failures(
        "exp inverse", len(x), _by_order(ring, residual), order=truncation.order
    )


def _trivial_family(ring: CoefficientRing) -> OperatorFamily:
    return OperatorFamily(Alphabet(), ring=ring)


def verify_augmentation(
    p: OperatorFamily,
    epsilon: Augmentation,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> Report:
    """Checks that ε is a BL_∞ morphism to the trivial algebra, ε̂∘p̂ = 0"""
    if epsilon.source != p.alphabet:
        raise AugmentationError("augmentation and operator family do not match")
    return verify_morphism(epsilon, p, _trivial_family(p.ring), truncation, executor)


def _coordinate_change(epsilon: Augmentation) -> MorphismFamily:
    """The morphism id + ε on the source of an augmentation"""
    alphabet = epsilon.source
    entries: dict[Word, Element] = {}
    for g in alphabet.generators:
        word = Word((g,))
        entries[word] = Element.of_word(word)
    for word, value in epsilon.values.items():
        entries[word] = entries.get(word, Element()) + Element.of_word(
            SCALAR_WORD, value
        )
    return MorphismFamily(alphabet, alphabet, entries, epsilon.ring)


def _inverse(phi: MorphismFamily, x: Element) -> Element:
    """
    Applies the inverse of φ̂ for φ = id + ε.

    φ̂ − id strictly lowers the number of letters, so its geometric series terminates.
    """
    result = x
    term = x
    while term:
        term = term - assemble_morphism(phi, term)
        result = result + term
    return result


@dataclass(frozen=True)
class LinearizedFamily:
    """A family linearized by an augmentation"""

    family: OperatorFamily
    """The conjugated family p_ε, entries computed up to the letter bound"""

    differential: tuple[tuple[Generator, Element], ...]
    """The entries of p^{1,1}_ε, in generator order"""

    report: Report
    """Vanishing of every p^{k,0}_ε"""

    homology: HomologyResult
    """Homology of the complex (V, p^{1,1}_ε), the unit excluded"""

    @property
    def dimensions(self) -> dict[int, int]:
        return {z2: self.homology.dimension(z2) - (1 - z2) for z2 in (0, 1)}


def linearize(
    p: OperatorFamily,
    epsilon: Augmentation,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> LinearizedFamily:
    """
    Linearizes a family at an augmentation.

    The change of coordinates Φ = id + ε conjugates p̂ to p̂_ε = Φ̂∘p̂∘Φ̂^{-1}, whose
    zero-output parts vanish because ε is an augmentation. Its linear part p^{1,1}_ε
    is a differential on V.

    :raises AugmentationError: if ε fails the morphism check.
    """
    executor = executor or SerialExecutor()
    check = verify_augmentation(p, epsilon, truncation, executor)
    if not check:
        raise AugmentationError(
            f"ε∘p̂ does not vanish on '{check.failures[0].label}'"
        )

    phi = _coordinate_change(epsilon)
    words = [w for w in enumerate_words(p.alphabet, truncation.max_letters) if w]

    def entry(word: Word) -> Element:
        x = _inverse(phi, _letters(word))
        image = assemble_morphism(phi, assemble_hat(p, x))
        return image.filter(lambda s, _: len(s) == 1)

    entries = dict(zip(words, executor.map(entry, words)))
    family = OperatorFamily(p.alphabet, entries, p.ring)

    failures = [
        Witness(str(word), out.filter(lambda s, _: s.is_scalar))
        for word, out in family.items()
        if any(s.is_scalar for s in out.sentences())
    ]
    report = Report.from_failures(
        "vanishing of p^{k,0}_ε", len(words), failures, order=p.ring.order
    )

    linear = {
        w: out.filter(lambda s, _: len(s.words[0]) == 1)
        for w, out in family.items()
        if len(w) == 1
    }
    differential = tuple(
        (w.letters[0], out) for w, out in sorted(linear.items()) if out
    )
    linear_family = OperatorFamily(p.alphabet, linear, p.ring)
    complex_ = build_complex(
        linear_family, 1, TruncationPolicy(max_letters=1, max_sentences=1), executor
    )
    return LinearizedFamily(family, differential, report, homology(complex_))


@dataclass(frozen=True)
class AugmentationSearch:
    """Outcome of a search for augmentations among finitely many candidates"""

    augmentation: Augmentation | None
    """The first verified candidate, if any"""

    action_bound: Fraction | None
    """Generators above this action were fixed to zero"""

    tried: int
    """Number of candidates that were checked"""

    candidates: tuple[Fraction, ...] = field(default=())
    """Values tried on each generator"""

    @property
    def found(self) -> bool:
        return self.augmentation is not None

    def __str__(self) -> str:
        if self.augmentation is None:
            values = ", ".join(str(c) for c in self.candidates)
            bound = "" if self.action_bound is None else f" below {self.action_bound}"
            return (
                f"no augmentation with values in {{{values}}} on generators{bound} "
                f"({self.tried} candidates)"
            )
        values = self.augmentation.values
        spelled = ", ".join(f"ε({w}) = {v}" for w, v in values.items()) or "ε = 0"
        return f"augmentation: {spelled}"


def augmentation_search(
    p: OperatorFamily,
    truncation: TruncationPolicy,
    action_bound: Fraction | None = None,
    candidates: Iterable[Fraction | int] = (-1, 0, 1),
    executor: ExecutorBase | None = None,
) -> AugmentationSearch:
    """
    Searches augmentations whose only nonzero values are on even generators.

    :param action_bound: Only generators of at most this action get a value.
    :param candidates: Values to try on each such generator.
    """
    values = tuple(Fraction(c) for c in candidates)
    free = [
        g
        for g in p.alphabet.generators
        if not g.is_odd and (action_bound is None or g.action <= action_bound)
    ]
    trivial = _trivial_family(p.ring)
    tried = 0
    for assignment in itertools.product(values, repeat=len(free)):
        tried += 1
        epsilon = Augmentation(
            p.alphabet,
            {Word((g,)): v for g, v in zip(free, assignment) if v},
            p.ring,
        )
        if verify_morphism(epsilon, p, trivial, truncation, executor):
            logger.info("Found augmentation after %s candidates", tried)
            return AugmentationSearch(epsilon, action_bound, tried, values)
    logger.info("No augmentation among %s candidates", tried)
    return AugmentationSearch(None, action_bound, tried, values)


@dataclass(frozen=True)
class WeightedWitness:
    """The multilinear part of seed⊙e^mc and the torsion bound it implies"""

    coefficient: Element
    """Coefficient of t₁…t_k, with Novikov tags"""

    length: int
    """Maximal sentence length of the coefficient"""

    boundary: Fraction | None
    """p̂ of the coefficient at T = 1 when it is a multiple of 1"""

    @property
    def bound(self) -> int | None:
        """The implied bound T ≤ length − 1, if p̂ of the extract is a nonzero scalar"""
        return self.length - 1 if self.boundary else None

    def __str__(self) -> str:
        bound = "no bound" if self.bound is None else f"T ≤ {self.bound}"
        return f"coefficient: {self.coefficient}; length {self.length}; {bound}"


def weighted_witness(
    p: OperatorFamily,
    mc: MaurerCartanElement,
    seed: Element | None,
    k: int,
    truncation: TruncationPolicy,
) -> WeightedWitness:
    """
    Extracts the coefficient of t₁…t_k in seed⊙e^mc.

    :param seed: The seed element, ``None`` for e^mc − 1.
    :param k: Number of weight variables to extract.
    :raises WeightError: if mc has terms of weight zero or fewer than k weights are
        declared.
    """
    if k < 1 or k > mc.ring.weight_rank:
        raise WeightError(f"{k} weights requested, {mc.ring.weight_rank} declared")
    if any(not weight for weight in mc.weights):
        raise WeightError("Maurer-Cartan element has terms of weight zero")

    ring = mc.ring.with_order(truncation.order)
    e = exp_minus_one(mc.body, truncation, mc.ring)
    full = e if seed is None else _exp(seed, e, ring)
    coefficient = full.weight_component((1,) * k)
    rational = coefficient.specialize()
    image = assemble_hat(p, rational).specialize()
    value = image.scalar_value()
    witness = WeightedWitness(coefficient, rational.max_length(), value)
    logger.debug("Weighted extract %s", witness)
    return witness

