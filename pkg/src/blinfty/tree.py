# -*- coding: utf-8 -*-
"""
Forest gluing

Structure constants are stored as sparse tables from canonical input words to
elements of single output words. :func:`assemble_hat` extends a table of odd
operations p^{k,l} to the differential p̂ on sentences, :func:`assemble_morphism`
extends a table of even operations φ^{k,l} to φ̂. Every sign is a Koszul sign of a
reordering of letters computed in :mod:`blinfty.graded`.
"""
from __future__ import annotations

# system imports
import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Dict, Mapping, Sequence

# local imports
from .base import (
    DegreeContractError,
    MixedModelError,
    TruncationOverflowError,
    TruncationPolicy,
    Report,
    Witness,
    ExecutorBase,
)
from .graded import (
    Alphabet,
    Generator,
    GradedSign,
    Sentence,
    Word,
    SCALAR_WORD,
    canonicalize_sentence,
    canonicalize_word,
    enumerate_sentences,
    enumerate_words,
    koszul_sign,
)
from .coefficients import (
    RATIONAL,
    TRIVIAL_TAG,
    CoefficientRing,
    Element,
    TermKey,
    accumulate,
)
from .serial import SerialExecutor

__all__ = [
    "StructureTable",
    "OperatorFamily",
    "MorphismFamily",
    "Augmentation",
    "hat_on_block",
    "assemble_hat",
    "verify_blinfty",
    "assemble_morphism",
    "verify_morphism",
    "apply_augmentation",
    "compose",
]

logger = logging.getLogger(__name__)

Terms = Dict[TermKey, Fraction]

CACHE_SIZE = 1 << 16
"""Images of single sentences kept per process, shared by all worker threads"""


class StructureTable:
    """Base class for sparse tables of multilinear operations

    Entries map a canonical nonscalar input word over the source alphabet to an
    element whose sentences are single words over the target alphabet. The degree
    contract is checked at construction.

    :param source: Alphabet of the inputs.
    :param target: Alphabet of the outputs.
    :param entries: Structure constants by input word. Zero entries are dropped.
    :param ring: Coefficient ring of the outputs.
    """

    z2_shift: int = 0
    """Change of the z2 degree from input to output"""

    def __init__(
        self,
        source: Alphabet,
        target: Alphabet,
        entries: Mapping[Word, Element],
        ring: CoefficientRing = RATIONAL,
    ) -> None:
        self.source = source
        self.target = target
        self.ring = ring
        self.entries: dict[Word, Element] = {}

        for word, output in sorted(entries.items(), key=lambda e: e[0].sort_key):
            self._validate(word, output)
            if output:
                self.entries[word] = output

        self.arities = frozenset(len(w) for w in self.entries)
        self.max_arity = max(self.arities, default=0)
        self.max_output_length = max(
            (len(s.words[0]) for out in self.entries.values() for s, _, _ in out),
            default=0,
        )

    def q_shift(self, k: int) -> Fraction | None:
        """Rational degree change of an arity ``k`` entry, ``None`` when ungraded"""
        return None

    def _validate(self, word: Word, output: Element) -> None:
        if word.is_scalar:
            raise DegreeContractError("structure constants need a nonempty input word")
        for g in word.letters:
            if g not in self.source:
                raise MixedModelError(f"input letter '{g.name}' is not in the source")
        shift = self.q_shift(len(word))
        for sentence, tag, _ in output:
            if len(sentence) != 1:
                raise DegreeContractError(
                    f"output '{sentence}' of '{word}' is not a single word"
                )
            out = sentence.words[0]
            for g in out.letters:
                if g not in self.target:
                    raise MixedModelError(
                        f"output letter '{g.name}' is not in the target"
                    )
            if out.z2 != (word.z2 + self.z2_shift) % 2:
                raise DegreeContractError(
                    f"entry '{word}' -> '{out}' violates the z2 degree contract"
                )
            if shift is not None and word.q is not None and out.q is not None:
                if out.q != word.q + shift:
                    raise DegreeContractError(
                        f"entry '{word}' -> '{out}' violates the rational degree "
                        f"contract, expected {word.q + shift}, found {out.q}"
                    )
            self.ring.validate(tag)

    def get(self, word: Word) -> Element | None:
        return self.entries.get(word)

    def items(self) -> list[tuple[Word, Element]]:
        """Entries in canonical order of their inputs"""
        return list(self.entries.items())

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StructureTable) or type(self) is not type(other):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.ring == other.ring
            and self.entries == other.entries
        )

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}({len(self.entries)} entries)>"


class OperatorFamily(StructureTable):
    """The operations p^{k,l} of a BL_∞ algebra, all of odd degree

    :param alphabet: Generators of the model.
    :param entries: Structure constants by input word.
    :param ring: Coefficient ring of the model.
    :param action_decreasing: Declares that every output word has strictly smaller
        action than its input word. The declaration is verified.
    """

    z2_shift = 1

    def __init__(
        self,
        alphabet: Alphabet,
        entries: Mapping[Word, Element] | None = None,
        ring: CoefficientRing = RATIONAL,
        action_decreasing: bool = False,
    ) -> None:
        super().__init__(alphabet, alphabet, entries or {}, ring)
        self.action_decreasing = action_decreasing
        if action_decreasing:
            for word, output in self.entries.items():
                for sentence, _, _ in output:
                    if sentence.action >= word.action:
                        raise DegreeContractError(
                            f"entry '{word}' -> '{sentence}' does not decrease action"
                        )

    @property
    def alphabet(self) -> Alphabet:
        return self.source

    def q_shift(self, k: int) -> Fraction | None:
        n = self.source.n
        if not self.source.is_q_graded or n is None:
            return None
        return Fraction(-2 * (n - 3) * (k - 1) - 1)

    def with_entries(self, entries: Mapping[Word, Element]) -> OperatorFamily:
        """A family over the same alphabet and ring with other entries"""
        return OperatorFamily(self.source, entries, self.ring)


class MorphismFamily(StructureTable):
    """The even operations φ^{k,l} of a BL_∞ morphism

    The identity on scalar sentences is implicit.
    """

    def q_shift(self, k: int) -> Fraction | None:
        n = self.source.n
        if not self.source.is_q_graded or n is None:
            return None
        return Fraction(-2 * (n - 3) * (k - 1))

    @classmethod
    def identity(
        cls, alphabet: Alphabet, ring: CoefficientRing = RATIONAL
    ) -> MorphismFamily:
        """The identity morphism, φ^{1,1} = id and all other entries zero"""
        entries = {
            Word((g,)): Element.of_word(Word((g,))) for g in alphabet.generators
        }
        return cls(alphabet, alphabet, entries, ring)


class Augmentation(MorphismFamily):
    """A morphism into the trivial algebra, given by rational values on words

    :param source: Generators of the augmented model.
    :param values: Value of ε on each canonical input word.
    """

    def __init__(
        self,
        source: Alphabet,
        values: Mapping[Word, Fraction | int] | None = None,
        ring: CoefficientRing = RATIONAL,
    ) -> None:
        entries = {
            word: Element.of_word(SCALAR_WORD, value)
            for word, value in (values or {}).items()
        }
        super().__init__(source, Alphabet(), entries, ring)

    def q_shift(self, k: int) -> Fraction | None:
        return None

    @property
    def values(self) -> dict[Word, Fraction]:
        return {
            word: out.coefficient(Sentence.scalar())
            for word, out in self.entries.items()
        }

    def value(self, word: Word) -> Fraction:
        out = self.entries.get(word)
        return Fraction(0) if out is None else out.coefficient(Sentence.scalar())


def _check_truncation(x: Element, truncation: TruncationPolicy | None) -> None:
    if truncation is None:
        return
    for sentence in x.sentences():
        if (
            len(sentence) > truncation.max_sentences
            or sentence.letter_count > truncation.max_letters
        ):
            raise TruncationOverflowError(
                f"'{sentence}' lies outside the truncation {truncation}"
            )


def _ring_for(
    ring: CoefficientRing, truncation: TruncationPolicy | None
) -> CoefficientRing:
    if truncation is None:
        return ring
    return ring.with_order(truncation.order)


def hat_on_block(p: StructureTable, block: Sentence | Sequence[Word]) -> Element:
    """
    Glues one operation onto k chosen words.

    Sums over all choices of one letter per word. The chosen letters are moved to the
    front, which costs a Koszul sign, and are fed to p as one canonical input word.
    The output letters are placed in front of the leftover letters and the merged word
    is canonicalized.

    :param p: Structure constants.
    :param block: The k chosen words in canonical order.
    :returns: An element whose sentences are single merged words.
    """
    words = tuple(block.words if isinstance(block, Sentence) else block)
    if len(words) not in p.arities or any(w.is_scalar for w in words):
        return Element()

    terms: Terms = {}
    for choice in product(*(range(len(w)) for w in words)):
        chosen = []
        leftovers = []
        exponent = 0
        odd_leftovers = 0
        for w, pick in zip(words, choice):
            for j, g in enumerate(w.letters):
                if j == pick:
                    chosen.append(g)
                    if g.is_odd:
                        exponent += odd_leftovers
                elif g.is_odd:
                    leftovers.append(g)
                    odd_leftovers += 1
                else:
                    leftovers.append(g)

        input_word, input_sign = canonicalize_word(chosen)
        if input_word is None:
            continue
        output = p.entries.get(input_word)
        if output is None:
            continue
        sign = (-1 if exponent % 2 else 1) * int(input_sign)
        for sentence, tag, value in output:
            merged, merge_sign = canonicalize_word(
                sentence.words[0].letters + tuple(leftovers)
            )
            if merged is None:
                continue
            accumulate(
                terms, (Sentence((merged,)), tag), sign * int(merge_sign) * value
            )
    return Element.from_terms(terms)


@lru_cache(maxsize=CACHE_SIZE)
def _hat_sentence(p: StructureTable, sentence: Sentence) -> Terms:
    words = sentence.words
    terms: Terms = {}
    for k in sorted(p.arities):
        if k > len(words):
            break
        for chosen in combinations(range(len(words)), k):
            if any(words[i].is_scalar for i in chosen):
                continue
            picked = set(chosen)
            exponent = 0
            odd_rest = 0
            rest = []
            for i, w in enumerate(words):
                if i in picked:
                    if w.z2:
                        exponent += odd_rest
                else:
                    rest.append(w)
                    if w.z2:
                        odd_rest += 1
            block = hat_on_block(p, [words[i] for i in chosen])
            sign = -1 if exponent % 2 else 1
            for merged, tag, value in block:
                out, out_sign = canonicalize_sentence([merged.words[0]] + rest)
                if out is None:
                    continue
                accumulate(terms, (out, tag), sign * int(out_sign) * value)

    return terms


def _apply(
    table: StructureTable,
    x: Element,
    truncation: TruncationPolicy | None,
    per_sentence: Callable[[StructureTable, Sentence], Terms],
) -> Element:
    _check_truncation(x, truncation)
    ring = _ring_for(table.ring, truncation)
    terms: Terms = {}
    truncated = x.truncated
    for sentence, tag, value in x:
        for (out, out_tag), out_value in per_sentence(table, sentence).items():
            full_tag = tag * out_tag
            if not ring.admits(full_tag):
                truncated = True
                continue
            accumulate(terms, (out, full_tag), value * out_value)
    return Element.from_terms(terms, truncated)


def assemble_hat(
    p: OperatorFamily, x: Element, truncation: TruncationPolicy | None = None
) -> Element:
    """
    Applies the differential p̂.

    Each sentence is expanded over all k-subsets of its words. Moving the chosen words
    in front costs the Koszul sign over word degrees, the chosen words are replaced by
    their glued word from :func:`hat_on_block` and the result is canonicalized.
    Scalar words never take part in a gluing.

    Every application glues exactly one operation block onto the chosen words, so the
    resulting forests have no cycles and need no graph check.

    :param p: Operator family.
    :param x: Input element, canonical.
    :param truncation: When given, inputs must lie inside it and coefficients are
        truncated at its order. Dropped coefficient terms mark the result truncated.
    :raises TruncationOverflowError: if the input does not fit the truncation.
    """
    return _apply(p, x, truncation, _hat_sentence)


def _spanning_report(
    title: str,
    sentences: list[Sentence],
    residual: object,
    executor: ExecutorBase | None,
    order: Fraction | None = None,
) -> Report:
    executor = executor or SerialExecutor()
    residuals = executor.map(residual, sentences)  # type: ignore[arg-type]
    failures = [
        Witness(str(s), r) for s, r in zip(sentences, residuals) if r  # type: ignore
    ]
    return Report.from_failures(title, len(sentences), failures, order=order)


def verify_blinfty(
    p: OperatorFamily,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> Report:
    """
    Checks p̂∘p̂ = 0 on every canonical sentence within the truncation.

    :returns: A report listing every sentence with nonzero p̂² in canonical order.
    """

    def residual(s: Sentence) -> Element:
        return assemble_hat(p, assemble_hat(p, Element.of(s))).truncate(p.ring)

    sentences = enumerate_sentences(p.alphabet, truncation)
    return _spanning_report(
        "BL_∞ axiom", sentences, residual, executor, order=p.ring.order
    )


@lru_cache(maxsize=CACHE_SIZE)
def _morphism_sentence(phi: StructureTable, sentence: Sentence) -> Terms:
    words = sentence.words
    letters = [(wi, g) for wi, w in enumerate(words) for g in w.letters]
    parities = [g.z2_degree for _, g in letters]
    positions_of = [
        [pos for pos, (wi, _) in enumerate(letters) if wi == w]
        for w in range(len(words))
    ]
    assigned = [False] * len(letters)
    blocks: list[tuple[tuple[int, ...], Word, int]] = []
    terms: Terms = {}

    def emit(labels: list[int]) -> None:
        order = [pos for positions, _, _ in blocks for pos in positions]
        sign = int(koszul_sign(parities, order))
        for _, _, block_sign in blocks:
            sign *= block_sign

        # components in order of first appearance among blocks
        component_order: list[int] = []
        for positions, _, _ in blocks:
            label = labels[letters[positions[0]][0]]
            if label not in component_order:
                component_order.append(label)
        block_component = [
            component_order.index(labels[letters[positions[0]][0]])
            for positions, _, _ in blocks
        ]
        regroup = sorted(range(len(blocks)), key=lambda b: (block_component[b], b))
        scalar_words = [SCALAR_WORD for w in words if w.is_scalar]

        outputs = [list(phi.entries[word]) for _, word, _ in blocks]
        for combination in product(*outputs):
            out_words = [s.words[0] for s, _, _ in combination]
            value = Fraction(sign)
            tag = TRIVIAL_TAG
            for _, out_tag, out_value in combination:
                value *= out_value
                tag = tag * out_tag
            value *= int(koszul_sign([w.z2 for w in out_words], regroup))

            grouped: list[list[Generator]] = [[] for _ in component_order]
            for b in regroup:
                grouped[block_component[b]].extend(out_words[b].letters)
            component_words = []
            for group in grouped:
                word, word_sign = canonicalize_word(group)
                if word is None:
                    break
                value *= int(word_sign)
                component_words.append(word)
            else:
                out, out_sign = canonicalize_sentence(component_words + scalar_words)
                if out is not None:
                    accumulate(terms, (out, tag), value * int(out_sign))

    def place(labels: list[int]) -> None:
        first = next((pos for pos, done in enumerate(assigned) if not done), None)
        if first is None:
            emit(labels)
            return
        w0 = letters[first][0]
        others = [
            w
            for w in range(len(words))
            if w != w0 and any(not assigned[pos] for pos in positions_of[w])
        ]
        for size in range(len(others) + 1):
            if size + 1 > phi.max_arity:
                break
            if size + 1 not in phi.arities:
                continue
            for chosen in combinations(others, size):
                touched = {labels[w0]} | {labels[w] for w in chosen}
                if len(touched) != size + 1:
                    # two words already connected, the block would close a cycle
                    continue
                free = [[p for p in positions_of[w] if not assigned[p]] for w in chosen]
                for picks in product(*free):
                    positions = tuple(sorted((first,) + picks))
                    word, word_sign = canonicalize_word(
                        [letters[pos][1] for pos in positions]
                    )
                    if word is None or word not in phi.entries:
                        continue
                    merged = min(touched)
                    new_labels = [merged if lab in touched else lab for lab in labels]
                    for pos in positions:
                        assigned[pos] = True
                    blocks.append((positions, word, int(word_sign)))
                    place(new_labels)
                    blocks.pop()
                    for pos in positions:
                        assigned[pos] = False

    place(list(range(len(words))))
    return terms


def assemble_morphism(
    phi: MorphismFamily, x: Element, truncation: TruncationPolicy | None = None
) -> Element:
    """
    Applies φ̂.

    Sums over all ways to partition the letters of a sentence into blocks that take at
    most one letter from each word and whose input word has an entry in φ. Blocks
    connect words; configurations in which the blocks close a cycle are discarded.
    Every connected component becomes one output word, the product of the outputs of
    its blocks, and scalar words map to scalar words.

    :param phi: Morphism family.
    :param x: Input element over the source alphabet.
    :param truncation: As for :func:`assemble_hat`.
    """
    return _apply(phi, x, truncation, _morphism_sentence)


def verify_morphism(
    phi: MorphismFamily,
    p: OperatorFamily,
    p_target: OperatorFamily,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> Report:
    """
    Checks φ̂∘p̂ = p̂′∘φ̂ on every canonical sentence within the truncation.

    The truncation bounds the inputs only; images are computed exactly.
    """
    if phi.source != p.alphabet or phi.target != p_target.alphabet:
        raise MixedModelError("morphism and operator families do not match")

    def residual(s: Sentence) -> Element:
        x = Element.of(s)
        return assemble_morphism(phi, assemble_hat(p, x)) - assemble_hat(
            p_target, assemble_morphism(phi, x)
        )

    sentences = enumerate_sentences(phi.source, truncation)
    return _spanning_report("morphism identity", sentences, residual, executor)


def apply_augmentation(epsilon: Augmentation, x: Element) -> Fraction:
    """
    Evaluates an augmentation.

    φ̂ maps into E𝟎, spanned by the sentences 1⊙…⊙1. Each of them is read as the
    scalar 1, so the value is the sum of all coefficients.
    """
    image = assemble_morphism(epsilon, x)
    if not image.is_rational:
        logger.warning("Reading augmentation values at T = 1")
    return sum((value for _, _, value in image.specialize()), Fraction(0))


def _letter_sentence(word: Word) -> Sentence:
    sentence, sign = canonicalize_sentence([Word((g,)) for g in word.letters])
    assert sentence is not None and sign == GradedSign.Positive
    return sentence


def compose(
    phi: MorphismFamily, psi: MorphismFamily, max_arity: int | None = None
) -> MorphismFamily:
    """
    The composition φ∘ψ.

    Its entry on an input word v₁…v_k is the single-word part of
    φ̂(ψ̂(v₁⊙…⊙v_k)).

    :param phi: Second morphism.
    :param psi: First morphism.
    :param max_arity: Largest input arity to compute, by default the product of the
        largest arities of both factors.
    """
    if psi.target != phi.source:
        raise MixedModelError("morphisms are not composable")
    if max_arity is None:
        max_arity = max(1, psi.max_arity) * max(1, phi.max_arity)

    entries: dict[Word, Element] = {}
    for word in enumerate_words(psi.source, max_arity):
        if word.is_scalar:
            continue
        image = assemble_morphism(
            phi, assemble_morphism(psi, Element.of(_letter_sentence(word)))
        )
        single = image.filter(lambda s, _: len(s) == 1)
        if single:
            entries[word] = single

    if isinstance(phi, Augmentation):
        values = {
            w: out.specialize().coefficient(Sentence.scalar())
            for w, out in entries.items()
        }
        return Augmentation(psi.source, values, phi.ring)
    return MorphismFamily(psi.source, phi.target, entries, phi.ring)

