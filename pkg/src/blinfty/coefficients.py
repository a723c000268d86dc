# -*- coding: utf-8 -*-
"""
Coefficients and elements

An :class:`Element` is a finite linear combination of canonical sentences with
rational coefficients. Each term additionally carries a :class:`Tag`: a Novikov
exponent, a group ring exponent for twisted coefficients and a multi-index of
intersection weights. A :class:`CoefficientRing` decides which tags survive
truncation.
"""
from __future__ import annotations

# system imports
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterator, Mapping, Tuple

# local imports
from .base import DegreeContractError
from .graded import Sentence, Word, GradedSign, canonicalize_sentence

__all__ = [
    "Tag",
    "RingKind",
    "CoefficientRing",
    "Element",
    "RATIONAL",
    "TRIVIAL_TAG",
    "accumulate",
]

logger = logging.getLogger(__name__)

TermKey = Tuple[Sentence, "Tag"]


def _strip(exponents: tuple[int, ...]) -> tuple[int, ...]:
    end = len(exponents)
    while end and exponents[end - 1] == 0:
        end -= 1
    return tuple(exponents[:end])


def _add_exponents(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    return tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a))


@dataclass(frozen=True)
class Tag:
    """Monomial part of a coefficient, T^λ G^g t^v"""

    novikov: Fraction = Fraction(0)
    """Novikov exponent λ"""

    group: tuple[int, ...] = ()
    """Exponent vector in the declared basis of the twisting group"""

    weight: tuple[int, ...] = ()
    """Intersection weight multi-index v"""

    def __post_init__(self) -> None:
        object.__setattr__(self, "novikov", Fraction(self.novikov))
        object.__setattr__(self, "group", _strip(tuple(self.group)))
        object.__setattr__(self, "weight", _strip(tuple(self.weight)))
        if any(v < 0 for v in self.weight):
            raise ValueError("intersection weights are nonnegative")

    def __mul__(self, other: Tag) -> Tag:
        return Tag(
            self.novikov + other.novikov,
            _add_exponents(self.group, other.group),
            _add_exponents(self.weight, other.weight),
        )

    @property
    def is_trivial(self) -> bool:
        return not self.novikov and not self.group and not self.weight

    @property
    def sort_key(self) -> tuple[Fraction, tuple[int, ...], tuple[int, ...]]:
        return self.novikov, self.group, self.weight

    def without_weight(self) -> Tag:
        return Tag(self.novikov, self.group)

    def __str__(self) -> str:
        parts = []
        if self.novikov:
            parts.append(f"T^{self.novikov}")
        for i, v in enumerate(self.weight):
            if v == 1:
                parts.append(f"t{i + 1}")
            elif v:
                parts.append(f"t{i + 1}^{v}")
        if self.group:
            parts.append("G^(" + ",".join(str(g) for g in self.group) + ")")
        return " ".join(parts)


TRIVIAL_TAG = Tag()


class RingKind(Enum):
    """Coefficient rings a model can declare"""

    Rational = "rational"
    """Plain rational numbers."""

    Novikov = "novikov"
    """The Novikov field truncated at a finite order."""

    GroupRing = "group-ring"
    """A completed group ring with a pairing to the reals, truncated."""


@dataclass(frozen=True)
class CoefficientRing:
    """
    A filtered coefficient ring with a truncation order

    The filtration value of a tag is its Novikov exponent plus the pairing of its group
    exponent. Terms of filtration value larger than :attr:`order` are dropped. When
    :attr:`weight_rank` is positive, weights are truncated multilinearly: a term with
    any weight entry above one is dropped.
    """

    kind: RingKind = RingKind.Rational
    """Which ring is declared"""

    order: Fraction | None = None
    """Truncation order R, ``None`` for no truncation"""

    pairing: tuple[Fraction, ...] = ()
    """Values of the basis of the twisting group under ω"""

    weight_rank: int = 0
    """Number of intersection weight variables t_i"""

    def __post_init__(self) -> None:
        if self.kind is RingKind.GroupRing and not self.pairing:
            raise ValueError("a group ring needs a pairing")
        if self.kind is not RingKind.GroupRing and self.pairing:
            raise ValueError("only group rings carry a pairing")

    def with_order(self, order: Fraction | None) -> CoefficientRing:
        return CoefficientRing(self.kind, order, self.pairing, self.weight_rank)

    def filtration(self, tag: Tag) -> Fraction:
        """Filtration value λ + ω(g) of a tag"""
        if len(tag.group) > len(self.pairing):
            raise DegreeContractError(
                f"group exponent {tag.group} exceeds the declared basis"
            )
        return tag.novikov + sum(
            (p * g for p, g in zip(self.pairing, tag.group)), Fraction(0)
        )

    def is_positive(self, tag: Tag) -> bool:
        """Whether a tag lies in the positive part of the filtration"""
        return self.filtration(tag) > 0 or any(tag.weight)

    def admits(self, tag: Tag) -> bool:
        """Whether a term with this tag survives truncation"""
        if self.weight_rank and any(v > 1 for v in tag.weight):
            return False
        if self.order is not None and self.filtration(tag) > self.order:
            return False
        return True

    def validate(self, tag: Tag) -> None:
        """
        Checks that a tag is expressible in this ring.

        :raises DegreeContractError: for exponents the ring does not have.
        """
        if tag.novikov and self.kind is RingKind.Rational:
            raise DegreeContractError("Novikov exponents need a novikov ring")
        if tag.novikov < 0:
            raise DegreeContractError("Novikov exponents must be nonnegative")
        if tag.group and self.kind is not RingKind.GroupRing:
            raise DegreeContractError("group exponents need a group-ring")
        if len(tag.weight) > self.weight_rank:
            raise DegreeContractError(
                f"weight {tag.weight} exceeds the {self.weight_rank} declared weights"
            )
        self.filtration(tag)


RATIONAL = CoefficientRing()
"""Rational coefficients without truncation"""


def accumulate(terms: Dict[TermKey, Fraction], key: TermKey, value: Fraction) -> None:
    """Adds ``value`` to ``terms[key]``, removing the entry when it cancels"""
    new = terms.get(key, 0) + value
    if new:
        terms[key] = new
    else:
        terms.pop(key, None)


class Element:
    """A finite linear combination of canonical sentences

    Elements are immutable. Zero coefficients are never stored.

    :param terms: Mapping from (sentence, tag) to coefficient.
    :param truncated: Whether terms were dropped by truncation while computing it.
    """

    __slots__ = ("_terms", "truncated")

    def __init__(
        self,
        terms: Mapping[TermKey, Fraction | int] | None = None,
        truncated: bool = False,
    ) -> None:
        self._terms: Dict[TermKey, Fraction] = {
            key: Fraction(value) for key, value in (terms or {}).items() if value
        }
        self.truncated = truncated

    @classmethod
    def from_terms(
        cls, terms: Dict[TermKey, Fraction], truncated: bool = False
    ) -> Element:
        """Wraps an accumulated dictionary without copying it"""
        element = cls.__new__(cls)
        element._terms = terms
        element.truncated = truncated
        return element

    @classmethod
    def zero(cls) -> Element:
        return cls()

    @classmethod
    def unit(cls) -> Element:
        """The sentence consisting of the scalar word 1"""
        return cls.of(Sentence.scalar())

    @classmethod
    def of(
        cls, sentence: Sentence, coefficient: Fraction | int = 1, tag: Tag = TRIVIAL_TAG
    ) -> Element:
        return cls({(sentence, tag): Fraction(coefficient)})

    @classmethod
    def of_word(
        cls,
        word: Word | None,
        coefficient: Fraction | int = 1,
        tag: Tag = TRIVIAL_TAG,
    ) -> Element:
        """A single word viewed as a sentence of length one, zero for ``None``"""
        if word is None:
            return cls()
        return cls.of(Sentence((word,)), coefficient, tag)

    @classmethod
    def of_words(
        cls,
        words: list[Word],
        coefficient: Fraction | int = 1,
        tag: Tag = TRIVIAL_TAG,
    ) -> Element:
        """The ⊙-product of words, reordered canonically with its sign"""
        sentence, sign = canonicalize_sentence(words)
        if sentence is None:
            return cls()
        return cls.of(sentence, sign * Fraction(coefficient), tag)

    def __iter__(self) -> Iterator[tuple[Sentence, Tag, Fraction]]:
        for sentence, tag in sorted(
            self._terms, key=lambda k: (k[0].sort_key, k[1].sort_key)
        ):
            yield sentence, tag, self._terms[(sentence, tag)]

    def terms(self) -> Dict[TermKey, Fraction]:
        """A copy of the underlying term dictionary"""
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def coefficient(self, sentence: Sentence, tag: Tag = TRIVIAL_TAG) -> Fraction:
        return self._terms.get((sentence, tag), Fraction(0))

    def sentences(self) -> list[Sentence]:
        """Distinct sentences in canonical order"""
        return sorted({s for s, _ in self._terms}, key=lambda s: s.sort_key)

    def max_length(self) -> int:
        return max((len(s) for s, _ in self._terms), default=0)

    def scalar_value(self) -> Fraction | None:
        """
        The coefficient when the element is a rational multiple of the unit 1, else
        ``None``. The zero element is not a multiple of the unit in this sense.
        """
        unit = Sentence.scalar()
        if len(self._terms) != 1:
            return None
        ((sentence, tag), value) = next(iter(self._terms.items()))
        if sentence != unit or not tag.is_trivial:
            return None
        return value

    def __add__(self, other: Element) -> Element:
        terms = dict(self._terms)
        for key, value in other._terms.items():
            accumulate(terms, key, value)
        return Element.from_terms(terms, self.truncated or other.truncated)

    def __neg__(self) -> Element:
        return self.scale(-1)

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def scale(self, factor: Fraction | int, tag: Tag = TRIVIAL_TAG) -> Element:
        """Multiplies every term by ``factor`` times the monomial ``tag``"""
        if not factor:
            return Element()
        terms: Dict[TermKey, Fraction] = {}
        for (sentence, t), value in self._terms.items():
            accumulate(terms, (sentence, t * tag), value * factor)
        return Element.from_terms(terms, self.truncated)

    def __mul__(self, factor: Fraction | int) -> Element:
        return self.scale(factor)

    __rmul__ = __mul__

    def odot(self, other: Element, ring: CoefficientRing = RATIONAL) -> Element:
        """The graded commutative ⊙-product, truncated by ``ring``"""
        terms: Dict[TermKey, Fraction] = {}
        truncated = self.truncated or other.truncated
        for (s1, t1), v1 in self._terms.items():
            for (s2, t2), v2 in other._terms.items():
                tag = t1 * t2
                if not ring.admits(tag):
                    truncated = True
                    continue
                sentence, sign = s1 * s2
                if sign == GradedSign.Zero:
                    continue
                accumulate(terms, (sentence, tag), sign * v1 * v2)  # type: ignore
        return Element.from_terms(terms, truncated)

    def filter(self, keep: Callable[[Sentence, Tag], bool]) -> Element:
        return Element.from_terms(
            {k: v for k, v in self._terms.items() if keep(*k)}, self.truncated
        )

    def truncate(self, ring: CoefficientRing) -> Element:
        """Drops every term that the ring does not admit"""
        kept = self.filter(lambda _, tag: ring.admits(tag))
        if len(kept) != len(self):
            kept.truncated = True
        return kept

    def specialize(self) -> Element:
        """
        Sets T and every group element to 1 and forgets weights, leaving a rational
        element.
        """
        terms: Dict[TermKey, Fraction] = {}
        collapsed = False
        for (sentence, tag), value in self._terms.items():
            collapsed = collapsed or not tag.is_trivial
            accumulate(terms, (sentence, TRIVIAL_TAG), value)
        if collapsed:
            logger.debug("Specialized coefficient tags at T = 1")
        return Element.from_terms(terms, self.truncated)

    def weight_component(self, weight: tuple[int, ...]) -> Element:
        """Terms of intersection weight exactly ``weight``, with the weight removed"""
        weight = _strip(tuple(weight))
        terms: Dict[TermKey, Fraction] = {}
        for (sentence, tag), value in self._terms.items():
            if tag.weight == weight:
                accumulate(terms, (sentence, tag.without_weight()), value)
        return Element.from_terms(terms, self.truncated)

    @property
    def z2_degrees(self) -> set[int]:
        return {s.z2 for s, _ in self._terms}

    @property
    def is_rational(self) -> bool:
        return all(tag.is_trivial for _, tag in self._terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        unit = Sentence.scalar()
        parts = []
        for i, (sentence, tag, value) in enumerate(self):
            prefix = []
            if abs(value) != 1:
                prefix.append(str(abs(value)))
            if not tag.is_trivial:
                prefix.append(str(tag))
            if sentence == unit and prefix:
                text = " ".join(prefix)
            else:
                text = " ".join(prefix + [str(sentence)])
            if i == 0:
                parts.append(f"- {text}" if value < 0 else text)
            else:
                parts.append(f" {'-' if value < 0 else '+'} {text}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"<Element({self})>"
