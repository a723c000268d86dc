# -*- coding: utf-8 -*-
"""
Homology of the sentence length filtration and the torsion invariant

The complex at level k is spanned by the canonical sentences of at most k words
within a truncation, with p̂ as boundary. Linear algebra is exact over the rationals
and uses fraction-free row reduction from :mod:`sympy.polys.matrices`, whose pivots
are the first nonzero columns in canonical order.
"""
from __future__ import annotations

# system imports
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, NamedTuple, Sequence

# external imports
from sympy import QQ
from sympy.polys.matrices.sdm import SDM

# local imports
from .base import (
    BoundaryNotNilpotentError,
    NonClosedTruncationError,
    Soundness,
    TruncationPolicy,
    Report,
    Witness,
    ExecutorBase,
)
from .graded import Sentence, enumerate_sentences, sentence_grading
from .coefficients import Element, RingKind, TRIVIAL_TAG
from .tree import OperatorFamily, MorphismFamily, assemble_hat, assemble_morphism
from .serial import SerialExecutor

__all__ = [
    "Grade",
    "TruncatedComplex",
    "UnitClass",
    "HomologyResult",
    "TorsionResult",
    "closure_soundness",
    "build_complex",
    "homology",
    "unit_vanishes",
    "torsion",
    "functoriality_check",
    "rank",
]

logger = logging.getLogger(__name__)

Vector = Dict[int, Fraction]


class Grade(NamedTuple):
    """Degree of a homogeneous block of a complex"""

    z2: int
    q: Fraction | None = None

    def target(self) -> Grade:
        """Grade of the image under the boundary"""
        return Grade(1 - self.z2, None if self.q is None else self.q - 1)

    def __str__(self) -> str:
        return str(self.z2) if self.q is None else f"{self.z2} (Q={self.q})"


def _to_fraction(x: object) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))  # type: ignore[attr-defined]


def _rref(
    columns: Sequence[Vector],
) -> tuple[dict[int, dict[int, Fraction]], list[int]]:
    """
    Row reduces the matrix with the given sparse columns.

    :returns: The reduced rows as ``{row: {column: value}}`` normalized so that every
        pivot is one, and the pivot columns in row order.
    """
    rows = sorted({r for col in columns for r in col})
    if not rows or not columns:
        return {}, []
    position = {r: i for i, r in enumerate(rows)}
    data: dict[int, dict[int, object]] = {}
    for j, col in enumerate(columns):
        for r, value in col.items():
            data.setdefault(position[r], {})[j] = QQ(value.numerator, value.denominator)

    reduced, _, pivots = SDM(data, (len(rows), len(columns)), QQ).rref_den()
    result: dict[int, dict[int, Fraction]] = {}
    for i, pivot in enumerate(pivots):
        row = reduced.get(i, {})
        lead = _to_fraction(row[pivot])
        result[i] = {j: _to_fraction(v) / lead for j, v in row.items()}
    return result, list(pivots)


def rank(columns: Sequence[Vector]) -> int:
    """Rank of the matrix with the given sparse columns"""
    return len(_rref(columns)[1])


def _solve(columns: Sequence[Vector], rhs: Vector) -> Vector | None:
    """A solution of Σ x_j columns[j] = rhs, supported on pivot columns"""
    reduced, pivots = _rref(list(columns) + [rhs])
    last = len(columns)
    if last in pivots:
        return None
    return {
        pivot: reduced[i].get(last, Fraction(0))
        for i, pivot in enumerate(pivots)
        if reduced[i].get(last)
    }


def _nullspace(columns: Sequence[Vector]) -> list[Vector]:
    reduced, pivots = _rref(columns)
    pivot_set = set(pivots)
    basis = []
    for free in range(len(columns)):
        if free in pivot_set:
            continue
        vector: Vector = {free: Fraction(1)}
        for i, pivot in enumerate(pivots):
            value = reduced[i].get(free)
            if value:
                vector[pivot] = -value
        basis.append(vector)
    return basis


def closure_soundness(p: OperatorFamily, truncation: TruncationPolicy) -> Soundness:
    """
    Whether negative claims on this truncation are certified.

    They are when p̂ strictly decreases action and the letter cap and the action window
    select the same sentences: nothing below the window has more than
    ``max_letters`` letters, and nothing within the letter cap lies above the window.
    Then every complex below the window is fully enumerated and closed under p̂, and
    no candidate witness is left out. The trivial algebra is always fully enumerated.
    """
    if not len(p.alphabet):
        return Soundness.Exact
    bound = truncation.action_bound
    min_action = p.alphabet.min_action
    max_action = p.alphabet.max_action
    if not p.action_decreasing or bound is None:
        return Soundness.Truncated
    assert min_action is not None and max_action is not None
    if bound // min_action > truncation.max_letters:
        return Soundness.Truncated
    if truncation.max_letters * max_action > bound:
        logger.debug(
            "Sentences of up to %s letters reach action %s, above the window %s",
            truncation.max_letters,
            truncation.max_letters * max_action,
            bound,
        )
        return Soundness.Truncated
    return Soundness.Exact


def _grade(sentence: Sentence, n: int | None, graded: bool) -> Grade:
    if graded and n is not None:
        return Grade(sentence.z2, sentence_grading(sentence, n))
    return Grade(sentence.z2)


def _images(
    p: OperatorFamily, sentences: Sequence[Sentence], executor: ExecutorBase
) -> list[Element]:
    def image(s: Sentence) -> Element:
        return assemble_hat(p, Element.of(s))

    images = executor.map(image, sentences)
    if p.ring.kind is not RingKind.Rational or any(not x.is_rational for x in images):
        logger.debug("Computing homology with coefficients specialized at T = 1")
    return [x.specialize() for x in images]


@dataclass(frozen=True)
class TruncatedComplex:
    """The truncated E^k V with the matrix of p̂

    Rows index :attr:`rows`; the first ``len(basis)`` rows are the basis itself,
    further rows are images that left the truncation.
    """

    operators: OperatorFamily
    """The operator family whose p̂ is the boundary"""

    level: int
    """Filtration level k"""

    truncation: TruncationPolicy
    """Bounds used to enumerate the basis"""

    basis: tuple[Sentence, ...]
    """Canonical sentences spanning the complex, in canonical order"""

    rows: tuple[Sentence, ...]
    """Basis followed by out-of-truncation images"""

    boundary: tuple[Vector, ...]
    """Sparse columns of p̂, one per basis sentence"""

    grades: tuple[Grade, ...]
    """Grade of each basis sentence"""

    @property
    def closed(self) -> bool:
        """Whether every image lies in the span of the basis"""
        return len(self.rows) == len(self.basis)

    @property
    def soundness(self) -> Soundness:
        return closure_soundness(self.operators, self.truncation)

    def column(self, sentence: Sentence) -> Vector:
        return self.boundary[self.basis.index(sentence)]

    def to_element(self, vector: Vector) -> Element:
        """The element with the given coordinates in :attr:`rows`"""
        return Element({(self.rows[i], TRIVIAL_TAG): v for i, v in vector.items()})

    def subcomplex(self) -> list[int]:
        """
        Indices of the largest set of basis sentences whose span is closed under p̂.
        """
        keep = set(range(len(self.basis)))
        changed = True
        while changed:
            changed = False
            for j in sorted(keep):
                if any(r not in keep for r in self.boundary[j]):
                    keep.discard(j)
                    changed = True
        return sorted(keep)


def build_complex(
    p: OperatorFamily,
    level: int,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
    require_closed: bool = False,
) -> TruncatedComplex:
    """
    Assembles the truncated complex E^k V.

    :param p: Operator family.
    :param level: Filtration level k, the maximal number of words.
    :param truncation: Letter and action bounds. Its length bound is replaced by
        ``level``.
    :param executor: Backend used to compute columns.
    :param require_closed: Refuse truncations that are not closed under p̂.
    :raises NonClosedTruncationError: if closure was required but an image leaves the
        truncation.
    """
    executor = executor or SerialExecutor()
    truncation = truncation.at_level(level)
    basis = enumerate_sentences(p.alphabet, truncation)
    images = _images(p, basis, executor)

    index = {s: i for i, s in enumerate(basis)}
    outside = sorted(
        {s for x in images for s in x.sentences() if s not in index},
        key=lambda s: s.sort_key,
    )
    for s in outside:
        index[s] = len(index)
    if outside:
        message = f"'{outside[0]}' leaves the truncation at level {level}"
        if require_closed:
            raise NonClosedTruncationError(message)
        logger.debug("%s and %s more images", message, len(outside) - 1)

    boundary = tuple({index[s]: v for s, _, v in x} for x in images)
    graded = p.alphabet.is_q_graded
    grades = tuple(_grade(s, p.alphabet.n, graded) for s in basis)
    logger.debug("Complex at level %s has %s basis sentences", level, len(basis))
    return TruncatedComplex(
        operators=p,
        level=level,
        truncation=truncation,
        basis=tuple(basis),
        rows=tuple(basis) + tuple(outside),
        boundary=boundary,
        grades=grades,
    )


@dataclass(frozen=True)
class UnitClass:
    """The class of the scalar sentence 1 at one filtration level"""

    level: int
    """Filtration level k"""

    vanishes: bool
    """Whether 1 is a boundary"""

    witness: Element | None = None
    """An element x with p̂(x) = 1 when the class vanishes"""

    @property
    def representative(self) -> Element:
        return Element.unit()


@dataclass(frozen=True)
class HomologyResult:
    """Dimensions and representatives of the homology of a truncated complex"""

    level: int
    """Filtration level k"""

    dimensions: tuple[tuple[Grade, int], ...]
    """Homology dimension per grade, in grade order"""

    representatives: tuple[tuple[Grade, tuple[Element, ...]], ...]
    """Representative cycles per grade, in canonical order"""

    unit: UnitClass
    """Status of the unit class"""

    soundness: Soundness
    """Whether the complex was closed and fully enumerated"""

    size: int
    """Number of basis sentences used"""

    def dimension(self, grade: Grade | int) -> int:
        if isinstance(grade, int):
            return sum(d for g, d in self.dimensions if g.z2 == grade)
        return dict(self.dimensions).get(grade, 0)

    @property
    def total(self) -> int:
        return sum(d for _, d in self.dimensions)


def homology(c: TruncatedComplex) -> HomologyResult:
    """
    Exact homology of a truncated complex.

    Truncations that are not closed under p̂ are restricted to their largest closed
    subcomplex and reported as truncated.

    :raises BoundaryNotNilpotentError: if p̂² does not vanish on the basis, with the
        first offending basis sentence as witness.
    """
    keep = c.subcomplex()
    soundness = c.soundness
    if len(keep) != len(c.basis):
        logger.warning(
            "Level %s complex is not closed under p̂, using %s of %s basis sentences",
            c.level,
            len(keep),
            len(c.basis),
        )
        soundness = Soundness.Truncated

    for j in keep:
        square: Vector = {}
        for i, value in c.boundary[j].items():
            for r, inner in c.boundary[i].items():
                square[r] = square.get(r, Fraction(0)) + value * inner
        if any(square.values()):
            raise BoundaryNotNilpotentError(
                f"p̂² does not vanish on '{c.basis[j]}'", witness=str(c.basis[j])
            )

    by_grade: dict[Grade, list[int]] = {}
    for j in keep:
        by_grade.setdefault(c.grades[j], []).append(j)

    dimensions = []
    representatives = []
    for grade in sorted(by_grade, key=lambda g: (g.z2, g.q or 0)):
        columns = by_grade[grade]
        cycles = _nullspace([c.boundary[j] for j in columns])
        incoming = [c.boundary[j] for j in keep if c.grades[j].target() == grade]
        # coordinates of cycles are positions in ``columns``; move them to rows
        cycle_vectors = [{columns[i]: v for i, v in z.items()} for z in cycles]
        reduced, pivots = _rref(incoming + cycle_vectors)
        chosen = [
            cycle_vectors[pivot - len(incoming)]
            for pivot in pivots
            if pivot >= len(incoming)
        ]
        dimensions.append((grade, len(chosen)))
        representatives.append((grade, tuple(c.to_element(z) for z in chosen)))

    unit_row = c.basis.index(Sentence.scalar()) if Sentence.scalar() in c.basis else -1
    sources = [j for j in keep if c.grades[j].z2 == 1]
    solution = _solve([c.boundary[j] for j in sources], {unit_row: Fraction(1)})
    witness = None
    if solution is not None:
        witness = c.to_element({sources[i]: v for i, v in solution.items()})
    unit = UnitClass(c.level, solution is not None, witness)

    return HomologyResult(
        level=c.level,
        dimensions=tuple(dimensions),
        representatives=tuple(representatives),
        unit=unit,
        soundness=soundness,
        size=len(keep),
    )


def _unit_witness(
    p: OperatorFamily,
    level: int,
    truncation: TruncationPolicy,
    executor: ExecutorBase,
) -> Element | None:
    truncation = truncation.at_level(level)
    sources = [s for s in enumerate_sentences(p.alphabet, truncation) if s.z2 == 1]
    images = _images(p, sources, executor)
    unit = Sentence.scalar()
    if not any(x.coefficient(unit) for x in images):
        return None

    index: dict[Sentence, int] = {unit: 0}
    for x in images:
        for s in x.sentences():
            index.setdefault(s, len(index))
    columns = [{index[s]: v for s, _, v in x} for x in images]
    solution = _solve(columns, {0: Fraction(1)})
    if solution is None:
        return None

    witness = Element({(sources[j], TRIVIAL_TAG): v for j, v in solution.items()})
    if assemble_hat(p, witness).specialize() != Element.unit():
        raise RuntimeError(f"solver returned an invalid witness '{witness}'")
    return witness


def unit_vanishes(
    p: OperatorFamily,
    level: int,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> tuple[bool, Element | None]:
    """
    Decides whether the unit class dies in the homology of E^k V.

    Solves p̂(x) = 1 over the odd sentences of the level ``level`` truncation. Every
    witness is checked again by applying p̂ to it.

    :returns: Whether a solution exists, and the solution.
    """
    witness = _unit_witness(p, level, truncation, executor or SerialExecutor())
    return witness is not None, witness


@dataclass(frozen=True)
class TorsionResult:
    """The torsion T(V), the smallest k - 1 for which the unit dies in E^k V"""

    value: int | None
    """The torsion, or ``None`` when no witness exists up to :attr:`bound` words"""

    bound: int
    """The largest level K_max that was searched"""

    witness: Element | None
    """An element of E^{T+1} V with p̂ equal to 1"""

    soundness: Soundness
    """Whether the absence of shorter witnesses is certified"""

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def at_least(self, other: TorsionResult) -> bool | None:
        """
        Whether this torsion is at least ``other``, ``None`` if undecidable within the
        searched bounds.
        """
        if self.value is None:
            if other.value is not None and other.value < self.bound:
                return True
            return True if other.value is None else None
        if other.value is None:
            return False if self.value < other.bound else None
        return self.value >= other.value

    def __str__(self) -> str:
        if self.value is None:
            return f"T ≥ {self.bound} ({self.soundness.value})"
        return f"T = {self.value} ({self.soundness.value}); witness: {self.witness}"


def torsion(
    p: OperatorFamily,
    kmax: int,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> TorsionResult:
    """
    Computes the torsion of a model up to ``kmax``.

    Levels 1 to ``kmax`` are searched in order for a witness of p̂(x) = 1. A witness
    at level m + 1 proves T ≤ m. That no witness exists at lower levels is certified
    only on action-closed truncations, see :func:`closure_soundness`.
    """
    executor = executor or SerialExecutor()
    soundness = closure_soundness(p, truncation)
    for level in range(1, kmax + 1):
        witness = _unit_witness(p, level, truncation, executor)
        logger.debug("Level %s: unit %s", level, "dies" if witness else "survives")
        if witness is not None:
            return TorsionResult(level - 1, kmax, witness, soundness)
    if soundness is Soundness.Truncated:
        logger.warning("No witness up to level %s, result holds up to truncation", kmax)
    return TorsionResult(None, kmax, None, soundness)


def functoriality_check(
    phi: MorphismFamily,
    p: OperatorFamily,
    p_target: OperatorFamily,
    kmax: int,
    truncation: TruncationPolicy,
    executor: ExecutorBase | None = None,
) -> Report:
    """
    Checks T(V) ≥ T(V′) for a morphism V → V′.

    Also maps the unit witness of V through φ̂ and checks that the image is a unit
    witness of V′.
    """
    source = torsion(p, kmax, truncation, executor)
    target = torsion(p_target, kmax, truncation, executor)
    failures: list[Witness] = []

    if source.at_least(target) is False:
        failures.append(Witness(f"{source} < {target}", Element.unit()))
    if source.witness is not None:
        image = assemble_morphism(phi, source.witness)
        residual = assemble_hat(p_target, image).specialize() - Element.unit()
        if residual:
            failures.append(Witness(f"φ̂({source.witness})", residual))

    def spell(result: TorsionResult) -> str:
        return str(result.value) if result.value is not None else f"≥ {result.bound}"

    title = f"T(V) = {spell(source)} ≥ T(V′) = {spell(target)}"
    return Report.from_failures(
        title, 2, failures, soundness=min_soundness((source, target))
    )


def min_soundness(results: Iterable[TorsionResult]) -> Soundness:
    if all(r.soundness is Soundness.Exact for r in results):
        return Soundness.Exact
    return Soundness.Truncated
