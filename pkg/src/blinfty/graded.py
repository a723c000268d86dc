# -*- coding: utf-8 -*-
"""
Canonical generators, words and sentences

A word is a monomial in the graded symmetric algebra SV and a sentence is a monomial
in the outer symmetric product EV. Both are kept in canonical order and every
reordering reports the Koszul sign it costs. All sign bookkeeping of the package goes
through :func:`graded_sort`.
"""
from __future__ import annotations

# system imports
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence, Union

# local imports
from .base import (
    MixedModelError,
    UnknownGeneratorError,
    DegreeContractError,
    TruncationPolicy,
)

__all__ = [
    "GradedSign",
    "Generator",
    "Alphabet",
    "Word",
    "Sentence",
    "SCALAR_WORD",
    "graded_sort",
    "koszul_sign",
    "canonicalize_word",
    "canonicalize_sentence",
    "degree",
    "filtration_level",
    "sentence_grading",
    "enumerate_words",
    "enumerate_sentences",
]

logger = logging.getLogger(__name__)


class GradedSign(IntEnum):
    """Sign of a graded reordering"""

    Negative = -1
    """An odd number of odd transpositions."""

    Zero = 0
    """An odd element was repeated, the product vanishes."""

    Positive = 1
    """An even number of odd transpositions."""

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, GradedSign):
            return GradedSign(int(self) * int(other))
        return int(self) * other

    __rmul__ = __mul__


@dataclass(frozen=True)
class Generator:
    """A formal Reeb orbit variable q_γ"""

    name: str
    """Identifier, unique within a model"""

    index: int
    """Position in the declaration order of the model, defines the total order"""

    z2_degree: int
    """Degree mod 2, the only grading that enters signs"""

    action: Fraction = Fraction(1)
    """Period of the orbit"""

    q_degree: Fraction | None = None
    """Optional rational degree"""

    cz: Fraction | None = None
    """Optional Conley-Zehnder index the degree was derived from"""

    homology_label: tuple[int, ...] | None = None
    """Optional winding or second homology class"""

    flags: frozenset[str] = frozenset()
    """Free-form markers such as ``spine``, ``paper`` or ``handle``"""

    multiplicity: int = 1
    """Covering multiplicity, enters the normalization of curve counts"""

    def __post_init__(self) -> None:
        if self.z2_degree not in (0, 1):
            raise DegreeContractError(
                f"generator '{self.name}' has z2 degree {self.z2_degree}"
            )
        if self.action <= 0:
            raise ValueError(f"generator '{self.name}' must have positive action")
        if self.multiplicity < 1:
            raise ValueError(f"generator '{self.name}' must have multiplicity >= 1")

    def __hash__(self) -> int:
        return hash((self.name, self.index))

    @property
    def is_odd(self) -> bool:
        return self.z2_degree == 1

    def __str__(self) -> str:
        return self.name


def graded_sort(
    keys: Sequence[object], parities: Sequence[int]
) -> tuple[list[int], GradedSign]:
    """
    Stable sort of graded items.

    :param keys: Sort keys of the items.
    :param parities: Degrees mod 2 of the items.
    :returns: The permutation as a list of original positions in sorted order and the
        Koszul sign of the reordering. The sign is :attr:`GradedSign.Zero` when two
        odd items have the same key.
    """
    order = list(range(len(keys)))
    sign = 1
    for i in range(1, len(order)):
        j = i
        while j > 0 and keys[order[j - 1]] > keys[order[j]]:  # type: ignore[operator]
            if parities[order[j - 1]] and parities[order[j]]:
                sign = -sign
            order[j - 1], order[j] = order[j], order[j - 1]
            j -= 1
    for prev, cur in zip(order, order[1:]):
        if parities[cur] and keys[prev] == keys[cur]:
            return order, GradedSign.Zero
    return order, GradedSign(sign)


def koszul_sign(parities: Sequence[int], permutation: Sequence[int]) -> GradedSign:
    """
    Koszul sign of listing items in the order given by ``permutation``.

    :param parities: Degrees mod 2 of the items in their original order.
    :param permutation: Original positions in their new order.
    """
    odd = [p for p in permutation if parities[p]]
    inversions = sum(1 for i, a in enumerate(odd) for b in odd[i + 1 :] if a > b)
    return GradedSign.Negative if inversions % 2 else GradedSign.Positive


@dataclass(frozen=True, eq=False)
class Word:
    """A canonical monomial in SV

    The empty word is the scalar word 1. Words with a repeated odd letter vanish and
    are never constructed.
    """

    letters: tuple[Generator, ...] = ()
    """Letters in canonical order"""

    key: tuple[int, ...] = field(init=False, repr=False)
    z2: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        key = tuple(g.index for g in self.letters)
        for prev, cur, g in zip(key, key[1:], self.letters[1:]):
            if prev > cur or (prev == cur and g.is_odd):
                raise ValueError(f"letters {self.names} are not in canonical order")
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "z2", sum(g.z2_degree for g in self.letters) % 2)

    @property
    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return len(self.key), self.key

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.letters)

    @property
    def is_scalar(self) -> bool:
        return not self.letters

    @property
    def q(self) -> Fraction | None:
        if any(g.q_degree is None for g in self.letters):
            return None
        return sum((g.q_degree for g in self.letters), Fraction(0))  # type: ignore

    @property
    def action(self) -> Fraction:
        return sum((g.action for g in self.letters), Fraction(0))

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.key == other.key and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: Word) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return " ".join(self.names) if self.letters else "1"

    def __mul__(self, other: Word) -> tuple[Word | None, GradedSign]:
        return canonicalize_word(self.letters + other.letters)


SCALAR_WORD = Word()
"""The scalar word 1"""


@dataclass(frozen=True, eq=False)
class Sentence:
    """A canonical monomial in EV, a nonempty ⊙-product of words"""

    words: tuple[Word, ...]
    """Words in canonical order"""

    key: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    z2: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("a sentence has at least one word")
        for prev, cur in zip(self.words, self.words[1:]):
            if cur.sort_key < prev.sort_key or (prev == cur and cur.z2):
                raise ValueError(f"words of '{self}' are not in canonical order")
        object.__setattr__(self, "key", tuple(w.key for w in self.words))
        object.__setattr__(self, "z2", sum(w.z2 for w in self.words) % 2)

    @classmethod
    def scalar(cls, length: int = 1) -> Sentence:
        """Returns 1⊙…⊙1 with ``length`` scalar words"""
        return cls((SCALAR_WORD,) * length)

    @property
    def sort_key(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        return len(self.words), self.key

    @property
    def is_scalar(self) -> bool:
        return all(w.is_scalar for w in self.words)

    @property
    def letter_count(self) -> int:
        return sum(len(w) for w in self.words)

    @property
    def q(self) -> Fraction | None:
        qs = [w.q for w in self.words]
        if any(q is None for q in qs):
            return None
        return sum(qs, Fraction(0))  # type: ignore[arg-type]

    @property
    def action(self) -> Fraction:
        return sum((w.action for w in self.words), Fraction(0))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Sentence):
            return NotImplemented
        return self.words == other.words

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: Sentence) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return "⊙".join(str(w) for w in self.words)

    def __mul__(self, other: Sentence) -> tuple[Sentence | None, GradedSign]:
        return canonicalize_sentence(self.words + other.words)


class Alphabet:
    """The ordered generating set of one model

    :param generators: Generators with consecutive indices starting at zero.
    :param n: Half dimension of the symplectization, enables the rational degree
        contract of operators.
    :param independent_gradings: Whether rational degrees may disagree with the z2
        degree mod 2.
    """

    def __init__(
        self,
        generators: Iterable[Generator] = (),
        n: int | None = None,
        independent_gradings: bool = False,
    ) -> None:
        self.generators = tuple(generators)
        self.n = n
        self.independent_gradings = independent_gradings
        self._by_name: dict[str, Generator] = {}

        for i, g in enumerate(self.generators):
            if g.index != i:
                raise ValueError(f"generator '{g.name}' has index {g.index}, not {i}")
            if g.name in self._by_name:
                raise ValueError(f"duplicate generator '{g.name}'")
            self._by_name[g.name] = g
            if g.q_degree is not None and not independent_gradings:
                if g.q_degree.denominator != 1 or g.q_degree % 2 != g.z2_degree:
                    raise DegreeContractError(
                        f"rational degree {g.q_degree} of '{g.name}' does not reduce "
                        f"to its z2 degree {g.z2_degree}"
                    )

    @classmethod
    def from_degrees(
        cls,
        degrees: Mapping[str, int] | Iterable[tuple[str, int]],
        actions: Mapping[str, Fraction | int] | None = None,
    ) -> Alphabet:
        """
        Builds an alphabet from names and z2 degrees in declaration order.

        :param degrees: Mapping or pairs of generator name and z2 degree.
        :param actions: Optional actions by name, defaulting to 1.
        """
        items = degrees.items() if isinstance(degrees, Mapping) else degrees
        actions = actions or {}
        return cls(
            Generator(
                name=name,
                index=i,
                z2_degree=z2,
                action=Fraction(actions.get(name, 1)),
            )
            for i, (name, z2) in enumerate(items)
        )

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __getitem__(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownGeneratorError(f"unknown generator '{name}'") from None

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Generator):
            return self._by_name.get(item.name) == item
        return item in self._by_name

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Alphabet):
            return NotImplemented
        return (
            self.generators == other.generators
            and self.n == other.n
            and self.independent_gradings == other.independent_gradings
        )

    def __hash__(self) -> int:
        return hash(self.generators)

    def __repr__(self) -> str:
        return f"<Alphabet({', '.join(g.name for g in self.generators)})>"

    @property
    def is_q_graded(self) -> bool:
        """Whether the rational degree contract applies"""
        return (
            self.n is not None
            and bool(self.generators)
            and all(g.q_degree is not None for g in self.generators)
        )

    @property
    def min_action(self) -> Fraction | None:
        return min((g.action for g in self.generators), default=None)

    @property
    def max_action(self) -> Fraction | None:
        return max((g.action for g in self.generators), default=None)

    def word(self, *names: str) -> tuple[Word | None, GradedSign]:
        """Canonicalizes a word given by generator names"""
        return canonicalize_word([self[name] for name in names])

    def canonical_word(self, *names: str) -> Word:
        """
        Returns the canonical word for names already in canonical order.

        :raises ValueError: if the names are not canonical.
        """
        word, _ = self.word(*names)
        if word is None or word.names != names:
            raise ValueError(f"'{' '.join(names)}' is not a canonical word")
        return word


Letter = Union[Generator, str]


def canonicalize_word(
    letters: Iterable[Letter], alphabet: Alphabet | None = None
) -> tuple[Word | None, GradedSign]:
    """
    Sorts letters into canonical order.

    :param letters: Generators, or generator names when ``alphabet`` is given.
    :param alphabet: Optional alphabet that resolves names and checks membership.
    :returns: The canonical word and the Koszul sign of the sorting permutation, or
        ``None`` with :attr:`GradedSign.Zero` when an odd letter repeats.
    :raises UnknownGeneratorError: for names or generators outside the alphabet.
    """
    resolved: list[Generator] = []
    for letter in letters:
        if isinstance(letter, str):
            if alphabet is None:
                raise UnknownGeneratorError(f"unknown generator '{letter}'")
            resolved.append(alphabet[letter])
        else:
            if alphabet is not None and letter not in alphabet:
                raise UnknownGeneratorError(f"unknown generator '{letter.name}'")
            resolved.append(letter)

    order, sign = graded_sort(
        [g.index for g in resolved], [g.z2_degree for g in resolved]
    )
    if sign == GradedSign.Zero:
        return None, sign
    return Word(tuple(resolved[i] for i in order)), sign


def canonicalize_sentence(
    words: Sequence[Word],
) -> tuple[Sentence | None, GradedSign]:
    """
    Sorts words into canonical order.

    :returns: The canonical sentence and the Koszul sign over word degrees, or ``None``
        with :attr:`GradedSign.Zero` when an odd word repeats.
    """
    order, sign = graded_sort([w.sort_key for w in words], [w.z2 for w in words])
    if sign == GradedSign.Zero:
        return None, sign
    return Sentence(tuple(words[i] for i in order)), sign


def _check_single_model(letters: Iterable[Generator]) -> None:
    by_index: dict[int, Generator] = {}
    for g in letters:
        known = by_index.setdefault(g.index, g)
        if known != g:
            raise MixedModelError(
                f"generators '{known.name}' and '{g.name}' share index {g.index}"
            )


def degree(x: Word | Sentence) -> tuple[int, Fraction | None]:
    """
    Degree of a word or sentence.

    :returns: The z2 degree and the rational degree, the latter ``None`` unless every
        letter carries one.
    :raises MixedModelError: if letters of different models are mixed.
    """
    words = x.words if isinstance(x, Sentence) else (x,)
    _check_single_model(g for w in words for g in w.letters)
    return x.z2, x.q


def filtration_level(s: Sentence) -> int:
    """The number of words of a sentence, scalar words included"""
    return len(s.words)


def sentence_grading(s: Sentence, n: int) -> Fraction | None:
    """
    Rational grading of a sentence in which the assembled differential has degree -1.

    Each word is shifted by ``-2(n-3)`` so that an operator of arity k with rational
    degree ``-2(n-3)(k-1)-1`` lowers the grading by exactly one.
    """
    q = s.q
    if q is None:
        return None
    return q - 2 * (n - 3) * len(s.words)


def enumerate_words(
    alphabet: Alphabet, max_letters: int, action_bound: Fraction | None = None
) -> list[Word]:
    """
    All canonical words with at most ``max_letters`` letters and action within the
    bound, the scalar word included, in canonical order.
    """
    generators = alphabet.generators
    found: list[Word] = []

    def extend(start: int, letters: list[Generator], action: Fraction) -> None:
        found.append(Word(tuple(letters)))
        if len(letters) == max_letters:
            return
        for i in range(start, len(generators)):
            g = generators[i]
            if action_bound is not None and action + g.action > action_bound:
                continue
            letters.append(g)
            extend(i + 1 if g.is_odd else i, letters, action + g.action)
            letters.pop()

    extend(0, [], Fraction(0))
    found.sort(key=lambda w: w.sort_key)
    return found


def enumerate_sentences(
    alphabet: Alphabet,
    truncation: TruncationPolicy,
    min_length: int = 1,
) -> list[Sentence]:
    """
    A spanning set of the truncated E^K V.

    :param alphabet: Generators of the model.
    :param truncation: Letter, length and action bounds.
    :param min_length: Smallest number of words to include.
    :returns: All canonical sentences within the bounds in canonical order.
    """
    words = enumerate_words(alphabet, truncation.max_letters, truncation.action_bound)
    bound = truncation.action_bound
    found: list[Sentence] = []

    def extend(start: int, chosen: list[Word], letters: int, action: Fraction) -> None:
        if len(chosen) >= min_length:
            found.append(Sentence(tuple(chosen)))
        if len(chosen) == truncation.max_sentences:
            return
        for i in range(start, len(words)):
            w = words[i]
            if letters + len(w) > truncation.max_letters:
                continue
            if bound is not None and action + w.action > bound:
                continue
            chosen.append(w)
            extend(i + 1 if w.z2 else i, chosen, letters + len(w), action + w.action)
            chosen.pop()

    extend(0, [], 0, Fraction(0))
    found.sort(key=lambda s: s.sort_key)
    logger.debug("Enumerated %s sentences within %s", len(found), truncation)
    return found
