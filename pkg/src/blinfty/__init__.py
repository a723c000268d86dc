# -*- coding: utf-8 -*-
"""
BL_∞ algebras of finite models, their torsion, and Reeb orbit spectra.
"""
from .base import (
    BLInftyError,
    UnknownGeneratorError,
    MixedModelError,
    DegreeContractError,
    TruncationOverflowError,
    NonClosedTruncationError,
    BoundaryNotNilpotentError,
    DivergentSeriesError,
    MaurerCartanResidualError,
    AugmentationError,
    WeightError,
    SpectrumError,
    MorseDataError,
    ConfigurationError,
    Soundness,
    TruncationPolicy,
    Report,
    DEFAULT_TRUNCATION,
)
from .graded import Alphabet, Generator, GradedSign, Sentence, Word
from .coefficients import CoefficientRing, Element, RingKind, Tag, RATIONAL
from .tree import (
    Augmentation,
    MorphismFamily,
    OperatorFamily,
    assemble_hat,
    assemble_morphism,
    verify_blinfty,
    verify_morphism,
)
from .homology import build_complex, homology, torsion
from .deformation import MaurerCartanElement, deform, linearize, weighted_witness
from .dsl import ModelParseError, ModelSpec, format_model, load_model, parse_model
from .main import Workbench

__version__ = "1.0.0"
__author__ = "blinfty developers"

__all__ = [
    "__version__",
    "__author__",
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
    "ModelParseError",
    "Soundness",
    "TruncationPolicy",
    "Report",
    "DEFAULT_TRUNCATION",
    "Alphabet",
    "Generator",
    "GradedSign",
    "Sentence",
    "Word",
    "CoefficientRing",
    "Element",
    "RingKind",
    "Tag",
    "RATIONAL",
    "Augmentation",
    "MorphismFamily",
    "OperatorFamily",
    "assemble_hat",
    "assemble_morphism",
    "verify_blinfty",
    "verify_morphism",
    "build_complex",
    "homology",
    "torsion",
    "MaurerCartanElement",
    "deform",
    "linearize",
    "weighted_witness",
    "ModelSpec",
    "parse_model",
    "format_model",
    "load_model",
    "Workbench",
]
