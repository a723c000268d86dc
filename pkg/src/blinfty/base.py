# -*- coding: utf-8 -*-
"""
This module defines the shared vocabulary of the package: the exception hierarchy,
truncation policies, verification reports and the worker backend interface. All
worker backends must inherit from :class:`ExecutorBase`.
"""
from __future__ import annotations

# system imports
import logging
import dataclasses
from dataclasses import dataclass
from abc import ABC, abstractmethod
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, TypeVar, TYPE_CHECKING

if TYPE_CHECKING:
    from .coefficients import Element

__all__ = [
    "BLInftyError",
    "UnknownGeneratorError",
    "MixedModelError",
    "DegreeContractError",
    "TruncationOverflowError",
    "NonClosedTruncationError",
    "BoundaryNotNilpotentError",
    "DivergentSeriesError",
    "MaurerCartanResidualError",
    "AugmentationError",
    "WeightError",
    "SpectrumError",
    "MorseDataError",
    "ConfigurationError",
    "Soundness",
    "TruncationPolicy",
    "Witness",
    "Report",
    "ExecutorBase",
    "DEFAULT_TRUNCATION",
]

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class BLInftyError(Exception):
    """Base class for all errors raised by this package"""


class UnknownGeneratorError(BLInftyError):
    """Raised when a generator name is not declared in the model"""


class MixedModelError(BLInftyError):
    """Raised when values from different models are combined"""


class DegreeContractError(BLInftyError):
    """Raised when a structure constant violates the degree contract"""


class TruncationOverflowError(BLInftyError):
    """Raised when an input does not fit into the requested truncation"""


class NonClosedTruncationError(BLInftyError):
    """Raised when a truncated complex is not closed under the differential"""


class BoundaryNotNilpotentError(BLInftyError):
    """Raised when a boundary operator does not square to zero"""

    def __init__(self, message: str, witness: str | None = None) -> None:
        super().__init__(message)
        self.witness = witness


class DivergentSeriesError(BLInftyError):
    """Raised when an exponential is taken of an element without positive filtration"""


class MaurerCartanResidualError(BLInftyError):
    """Raised when deforming by an element that is not Maurer-Cartan"""


class AugmentationError(BLInftyError):
    """Raised when an augmentation fails the morphism check"""


class WeightError(BLInftyError):
    """Raised when intersection weights are missing or degenerate"""


class SpectrumError(BLInftyError):
    """Raised when an orbit spectrum cannot be generated or is incomplete"""


class MorseDataError(BLInftyError):
    """Raised when Morse data is inconsistent"""


class ConfigurationError(BLInftyError):
    """Raised when a curve configuration query is malformed"""


class Soundness(Enum):
    """How much a negative claim computed on a truncation can be trusted"""

    Exact = "exact, action-closed"
    """The relevant complexes are finite and fully enumerated."""

    Truncated = "up to truncation"
    """Only the truncated part of the complex was examined."""


@dataclass(frozen=True)
class TruncationPolicy:
    """
    Bounds that make the infinite dimensional sentence spaces finite

    All engines enumerate only canonical sentences within these bounds.
    """

    max_letters: int = 4
    """Maximal total number of letters in a sentence"""

    max_sentences: int = 3
    """Maximal number of words in a sentence, the filtration level"""

    action_bound: Fraction | None = None
    """Optional upper bound on the total action of a sentence"""

    order: Fraction = Fraction(4)
    """Truncation order of completed coefficients and of Maurer-Cartan insertions"""

    def __post_init__(self) -> None:
        if self.max_letters < 0:
            raise ValueError("max_letters must be nonnegative")
        if self.max_sentences < 1:
            raise ValueError("max_sentences must be positive")
        if self.action_bound is not None and self.action_bound <= 0:
            raise ValueError("action_bound must be positive")
        if self.order < 0:
            raise ValueError("order must be nonnegative")

    def replace(self, **changes: object) -> TruncationPolicy:
        """
        Returns a copy with the given fields replaced. ``None`` values are ignored so
        that unset command line flags fall through to the model defaults.
        """
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]

    def at_level(self, level: int) -> TruncationPolicy:
        """Returns a copy that enumerates sentences up to the given filtration level"""
        return dataclasses.replace(self, max_sentences=level)


DEFAULT_TRUNCATION = TruncationPolicy()
"""Truncation used when neither the model nor the caller configures one"""


@dataclass(frozen=True)
class Witness:
    """A location where an identity failed, together with the offending residual"""

    label: str
    """Canonical spelling of the input that produced the residual"""

    residual: Element
    """The nonzero residual"""


@dataclass(frozen=True)
class Report:
    """Outcome of a verification over a spanning set"""

    title: str
    """Short description of the identity that was checked"""

    passed: bool
    """Whether no residual was found"""

    checked: int = 0
    """Number of inputs that were examined"""

    failures: tuple[Witness, ...] = ()
    """Witnesses in canonical order of their inputs"""

    soundness: Soundness = Soundness.Truncated
    """Whether the check covers the whole relevant space"""

    order: Fraction | None = None
    """Truncation order for identities in completed coefficients"""

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def from_failures(
        cls,
        title: str,
        checked: int,
        failures: Iterable[Witness],
        soundness: Soundness = Soundness.Truncated,
        order: Fraction | None = None,
    ) -> Report:
        failures = tuple(failures)
        if failures:
            logger.debug("%s: %s of %s inputs failed", title, len(failures), checked)
        return cls(
            title=title,
            passed=not failures,
            checked=checked,
            failures=failures,
            soundness=soundness,
            order=order,
        )


class ExecutorBase(ABC):
    """Base class for worker backends

    Backends evaluate a function over a sequence of independent inputs. Results are
    always returned in input order so that merges stay deterministic.

    :param threads: Number of workers the backend may use.
    """

    def __init__(self, threads: int = 1) -> None:
        if threads < 1:
            raise ValueError("threads must be positive")
        self.threads = threads

    @abstractmethod
    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """
        Evaluates ``fn`` on every item.

        :param fn: Pure function to evaluate.
        :param items: Inputs, consumed eagerly.
        :returns: The results in input order.
        """
        ...

    def close(self) -> None:
        """Releases any worker resources held by the backend"""

    def __enter__(self) -> ExecutorBase:
        return self

    def __exit__(self, *args: object) -> None:
        self.close()
