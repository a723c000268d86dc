# -*- coding: utf-8 -*-
"""
Session API that binds a model to a truncation and a worker backend
"""
from __future__ import annotations

# system imports
import dataclasses
import logging
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence, Type

# local imports
from .base import (
    AugmentationError,
    ConfigurationError,
    ExecutorBase,
    Report,
    TruncationPolicy,
)
from .coefficients import RingKind
from .tree import OperatorFamily, verify_blinfty
from .homology import HomologyResult, TorsionResult, build_complex, homology, torsion
from .deformation import (
    DeformedFamily,
    LinearizedFamily,
    WeightedWitness,
    augmentation_search,
    deform,
    linearize,
    verify_augmentation,
    verify_mc,
    weighted_witness,
)
from .orbits import (
    Certificate,
    ConfigurationQuery,
    Counterexample,
    OrbitSpectrum,
    certify_lower_bound,
    geometry_spectrum,
    period_bound,
    vdim,
)
from .dsl import ModelSpec, load_model

__all__ = ["Workbench", "get_executor_class", "get_executor", "DEFAULT_KMAX"]

logger = logging.getLogger(__name__)

DEFAULT_KMAX = 4
"""Default number of filtration levels searched for torsion"""


def get_executor_class(threads: int) -> Type[ExecutorBase]:
    """
    Return the backend class for the requested number of workers.

    :param threads: Number of worker threads.
    :returns: The in-process backend for one worker, the thread pool otherwise.
    """
    if threads < 1:
        raise ValueError("threads must be positive")
    if threads == 1:
        from .serial import SerialExecutor

        return SerialExecutor

    from .threaded import ThreadedExecutor

    return ThreadedExecutor


def get_executor(threads: int = 1) -> ExecutorBase:
    return get_executor_class(threads)(threads)


class Workbench:
    """Computations on one model

    Settings resolve in the order: explicit arguments, the ``[truncation]`` section of
    the model, built-in defaults. For models declared action decreasing without an
    action window, the window is set to N times the largest generator action, so that
    it excludes no sentence within the letter cap.

    :param model: A parsed model, or a path or shipped model name to load.
    :param truncation: Overrides of the model truncation by field name, ``None``
        values are ignored.
    :param kmax: Number of filtration levels searched for torsion.
    :param threads: Number of worker threads.
    """

    def __init__(
        self,
        model: ModelSpec | str | Path,
        truncation: Mapping[str, object] | None = None,
        kmax: int | None = None,
        threads: int = 1,
    ) -> None:
        self.spec = model if isinstance(model, ModelSpec) else load_model(model)
        self.truncation = self._resolve(truncation)
        self.kmax = kmax or self.spec.kmax or DEFAULT_KMAX
        self.executor = get_executor(threads)
        self._operators: OperatorFamily | None = None

    def _resolve(self, overrides: Mapping[str, object] | None) -> TruncationPolicy:
        policy = self.spec.truncation.replace(**(overrides or {}))
        max_action = self.spec.alphabet.max_action
        if (
            self.spec.action_decreasing
            and policy.action_bound is None
            and max_action is not None
        ):
            policy = policy.replace(action_bound=policy.max_letters * max_action)
        logger.debug("Resolved truncation %s", policy)
        return policy

    def close(self) -> None:
        self.executor.close()

    def __enter__(self) -> Workbench:
        return self

    def __exit__(self, *args: object) -> None:
        self.close()

    @property
    def operators(self) -> OperatorFamily:
        """The operator family with coefficients truncated at the resolved order"""
        if self._operators is None:
            p = self.spec.operators
            ring = p.ring
            if ring.kind is not RingKind.Rational:
                ring = ring.with_order(self.truncation.order)
            self._operators = OperatorFamily(
                p.alphabet, p.entries, ring, p.action_decreasing
            )
        return self._operators

    def check(self) -> list[Report]:
        """
        Verifies the BL_∞ axiom, and the Maurer-Cartan equation and augmentation
        property when the model declares them.
        """
        p = self.operators
        reports = [verify_blinfty(p, self.truncation, self.executor)]
        if self.spec.mc is not None:
            reports.append(verify_mc(p, self.spec.mc, self.truncation))
        if self.spec.augmentation is not None:
            reports.append(
                verify_augmentation(
                    p, self.spec.augmentation, self.truncation, self.executor
                )
            )
        return reports

    def homology(self, level: int) -> HomologyResult:
        """Homology of the level ``level`` truncated complex"""
        c = build_complex(self.operators, level, self.truncation, self.executor)
        return homology(c)

    def torsion(self, kmax: int | None = None) -> TorsionResult:
        return torsion(
            self.operators, kmax or self.kmax, self.truncation, self.executor
        )

    def deform(self) -> DeformedFamily:
        """
        Deforms the model by its Maurer-Cartan element.

        :raises ValueError: if the model has no Maurer-Cartan element.
        """
        if self.spec.mc is None:
            raise ValueError("the model has no [maurer-cartan] section")
        return deform(self.operators, self.spec.mc, self.truncation, self.executor)

    def deformed_model(self, deformed: DeformedFamily) -> ModelSpec:
        """The model of a deformed family, ready to print"""
        return dataclasses.replace(
            self.spec,
            operators=deformed.family,
            ring=deformed.family.ring,
            mc=None,
            seed=None,
            augmentation=None,
            truncation=self.truncation,
        )

    def weighted_witness(self, k: int) -> WeightedWitness:
        """
        The weighted witness of order ``k`` of the model.

        :raises ValueError: if the model has no Maurer-Cartan element.
        """
        if self.spec.mc is None:
            raise ValueError("the model has no [maurer-cartan] section")
        return weighted_witness(
            self.operators, self.spec.mc, self.spec.seed, k, self.truncation
        )

    def linearize(self) -> LinearizedFamily:
        """
        Linearizes at the declared augmentation, or at the first one found.

        :raises AugmentationError: if no augmentation is declared or found.
        """
        epsilon = self.spec.augmentation
        if epsilon is None:
            search = augmentation_search(
                self.operators, self.truncation, executor=self.executor
            )
            if search.augmentation is None:
                raise AugmentationError(str(search))
            logger.info("Using augmentation found by search: %s", search)
            epsilon = search.augmentation
        return linearize(self.operators, epsilon, self.truncation, self.executor)

    def spectrum(self, bound: Fraction | None = None) -> OrbitSpectrum:
        """
        The orbit spectrum of the model geometry.

        :raises ConfigurationError: if the model has no geometry.
        """
        if self.spec.geometry is None:
            raise ConfigurationError("the model has no [geometry] section")
        bound = period_bound(self.spec.geometry, bound)
        return geometry_spectrum(self.spec.geometry, self.spec.alphabet, bound)

    def query(
        self,
        positive: Sequence[str],
        negative: Sequence[str] = (),
        genus: int = 0,
        point_constraint: bool = False,
        bound: Fraction | None = None,
    ) -> ConfigurationQuery:
        """
        A curve configuration through named orbits of the spectrum, or of the model
        generators when there is no geometry.
        """
        if self.spec.geometry is not None:
            orbits = self.spectrum(bound)
            n = orbits.n
            lookup = orbits.__getitem__
        else:
            if self.spec.alphabet.n is None:
                raise ConfigurationError("the model does not declare n")
            n = self.spec.alphabet.n
            lookup = self.spec.alphabet.__getitem__
        return ConfigurationQuery(
            n,
            tuple(lookup(name) for name in positive),
            tuple(lookup(name) for name in negative),
            genus,
            point_constraint,
        )

    def vdim(self, query: ConfigurationQuery) -> Fraction:
        return vdim(query)

    def certify(
        self, m: int, bound: Fraction | None = None
    ) -> Certificate | Counterexample:
        """Certifies the torsion lower bound ``m`` on the model spectrum"""
        spectrum = self.spectrum(bound)
        spine = None
        if self.spec.geometry is not None and self.spec.geometry.get("spine_bound"):
            spine = Fraction(self.spec.geometry.get("spine_bound") or 0)
        return certify_lower_bound(spectrum, m, spectrum.threshold, spine)
