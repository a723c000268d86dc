# -*- coding: utf-8 -*-
"""
The model file format

A model file is UTF-8 text made of ``[section]`` headers followed by statements, one
per line, with ``#`` comments. :func:`parse_model` validates a whole file and either
returns a :class:`ModelSpec` or raises :class:`ModelParseError` with every positioned
:class:`Diagnostic` it found. :func:`format_model` prints a spec back in canonical
form, so that parsing the output gives an equal spec.
"""
from __future__ import annotations

# system imports
import logging
import re
import dataclasses
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple, Sequence

# external imports
from packaging.version import InvalidVersion, Version

# local imports
from .base import (
    BLInftyError,
    DegreeContractError,
    DivergentSeriesError,
    MixedModelError,
    SpectrumError,
    TruncationPolicy,
    DEFAULT_TRUNCATION,
)
from .graded import Alphabet, Generator, Word, canonicalize_word
from .coefficients import RATIONAL, CoefficientRing, Element, RingKind, Tag
from .tree import Augmentation, OperatorFamily
from .deformation import MaurerCartanElement
from .orbits import Geometry, GeometryKind, normalize_count
from . import resources

__all__ = [
    "DiagnosticCode",
    "Severity",
    "Diagnostic",
    "ModelParseError",
    "ModelSpec",
    "parse_model",
    "parse_element",
    "format_model",
    "format_generators",
    "load_model",
    "SUPPORTED_FORMAT",
]

logger = logging.getLogger(__name__)

SUPPORTED_FORMAT = Version("1.0")
"""Newest model format version this parser reads"""

SECTIONS = (
    "model",
    "coefficients",
    "generators",
    "operators",
    "curves",
    "maurer-cartan",
    "seed",
    "augmentation",
    "truncation",
    "geometry",
)

_SECTION = re.compile(r"\[([^\]]*)\]\Z")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_RESERVED = re.compile(r"(T|G|t\d+)\Z")
_NUMBER = re.compile(r"(\d+(/\d+)?|\d*\.\d+)\Z")
_WEIGHT = re.compile(r"t(\d+)(?:\^(\d+))?\Z")
_GROUP = re.compile(r"G\^\((-?\d+(?:,-?\d+)*)\)\Z")
_SEPARATOR = re.compile(r"[⊙&]")


class DiagnosticCode(Enum):
    """Kinds of problems a model file can have"""

    Syntax = "syntax"
    """A statement does not have the expected shape."""

    BadNumber = "bad-number"
    """A number cannot be read as a rational."""

    UnknownSection = "unknown-section"
    """A section header names no known section."""

    MissingSection = "missing-section"
    """A required section is absent."""

    DuplicateName = "duplicate-name"
    """A generator, section or key is declared twice."""

    UnknownGenerator = "unknown-generator"
    """A word uses a generator that was not declared."""

    DegreeContract = "degree-contract"
    """A structure constant or element violates a degree contract."""

    BadValue = "bad-value"
    """A value is well formed but not allowed."""

    UnsupportedFormat = "unsupported-format"
    """The declared format version cannot be read."""


class Severity(Enum):
    """Severity of a diagnostic"""

    Error = "error"
    Warning = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A positioned problem in a model file"""

    code: DiagnosticCode
    """What kind of problem"""

    message: str
    """Human readable description"""

    line: int
    """Line number, starting at 1"""

    column: int
    """Column number, starting at 1"""

    excerpt: str = ""
    """The offending source line"""

    severity: Severity = Severity.Error

    def __str__(self) -> str:
        text = (
            f"{self.line}:{self.column}: {self.severity.value}[{self.code.value}]: "
            f"{self.message}"
        )
        if self.excerpt:
            text += f"\n  {self.excerpt}\n  {' ' * (self.column - 1)}^"
        return text


class ModelParseError(BLInftyError):
    """Raised when a model file fails to parse, carries all diagnostics"""

    def __init__(self, diagnostics: Sequence[Diagnostic], source: str = "<model>"):
        self.diagnostics = tuple(diagnostics)
        self.source = source
        super().__init__(
            "\n".join(f"{source}:{d}" for d in self.diagnostics) or source
        )

    @property
    def codes(self) -> list[DiagnosticCode]:
        return [d.code for d in self.diagnostics]


@dataclass(frozen=True)
class ModelSpec:
    """A fully validated model"""

    alphabet: Alphabet
    """Generators with their gradings"""

    operators: OperatorFamily
    """Structure constants, curve counts already normalized into them"""

    name: str = ""
    """Optional model name"""

    ring: CoefficientRing = RATIONAL
    """Declared coefficient ring"""

    mc: MaurerCartanElement | None = None
    """Optional Maurer-Cartan element"""

    seed: Element | None = None
    """Optional seed of a weighted witness"""

    augmentation: Augmentation | None = None
    """Optional augmentation"""

    truncation: TruncationPolicy = DEFAULT_TRUNCATION
    """Truncation defaults of the model"""

    kmax: int | None = None
    """Default K_max of torsion computations"""

    geometry: Geometry | None = None
    """Optional model contact form"""

    format_version: str | None = None
    """Declared format version"""

    source: str = dataclasses.field(default="<model>", compare=False)
    """Where the model was read from"""

    @property
    def action_decreasing(self) -> bool:
        return self.operators.action_decreasing


class _Line(NamedTuple):
    number: int
    column: int
    text: str
    raw: str


class ModelParser:
    """Parser for one model file

    :param text: The file contents.
    :param source: Name used in diagnostics.
    """

    def __init__(self, text: str, source: str = "<model>") -> None:
        self.text = text
        self.source = source
        self.diagnostics: list[Diagnostic] = []
        self.sections: dict[str, list[_Line]] = {}
        self.headers: dict[str, _Line] = {}
        self.format_version: str | None = None
        self.alphabet = Alphabet()
        self.ring = RATIONAL

    # ---- diagnostics -------------------------------------------------------------

    def error(
        self,
        code: DiagnosticCode,
        message: str,
        line: _Line | None,
        token: str | None = None,
    ) -> None:
        if line is None:
            self.diagnostics.append(Diagnostic(code, message, 1, 1))
            return
        column = line.column
        if token:
            found = line.raw.find(token)
            if found >= 0:
                column = found + 1
        self.diagnostics.append(
            Diagnostic(code, message, line.number, column, line.raw.rstrip())
        )

    def fail(self) -> ModelParseError:
        return ModelParseError(self.diagnostics, self.source)

    # ---- lexical helpers ---------------------------------------------------------

    def split(self) -> None:
        current: str | None = None
        skipping = False
        for number, raw in enumerate(self.text.splitlines(), start=1):
            content = raw.split("#", 1)[0]
            text = content.strip()
            if not text:
                continue
            line = _Line(number, len(content) - len(content.lstrip()) + 1, text, raw)

            header = _SECTION.match(text)
            if header:
                name = header.group(1).strip()
                skipping = False
                if name not in SECTIONS:
                    self.error(
                        DiagnosticCode.UnknownSection,
                        f"unknown section [{name}]",
                        line,
                    )
                    skipping = True
                elif name in self.sections:
                    self.error(
                        DiagnosticCode.DuplicateName,
                        f"duplicate section [{name}]",
                        line,
                    )
                    skipping = True
                else:
                    self.sections[name] = []
                    self.headers[name] = line
                    current = name
                continue

            if skipping:
                continue
            if current is None:
                key, _, value = text.partition("=")
                if key.strip() == "format" and self.format_version is None:
                    self.read_format(value.strip(), line)
                else:
                    self.error(
                        DiagnosticCode.Syntax, "statement outside of a section", line
                    )
                continue
            self.sections[current].append(line)

    def read_format(self, value: str, line: _Line) -> None:
        try:
            version = Version(value)
        except InvalidVersion:
            self.error(DiagnosticCode.BadValue, f"invalid format '{value}'", line)
            return
        if version.major != SUPPORTED_FORMAT.major:
            self.error(
                DiagnosticCode.UnsupportedFormat,
                f"format {version} is not supported, "
                f"expected {SUPPORTED_FORMAT.major}.x",
                line,
                value,
            )
            return
        self.format_version = str(version)

    def fraction(self, text: str, line: _Line) -> Fraction | None:
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError):
            self.error(
                DiagnosticCode.BadNumber, f"invalid number '{text}'", line, text
            )
            return None

    def integer(self, text: str, line: _Line) -> int | None:
        value = self.fraction(text, line)
        if value is None:
            return None
        if value.denominator != 1:
            self.error(
                DiagnosticCode.BadNumber,
                f"expected an integer, found '{text}'",
                line,
                text,
            )
            return None
        return int(value)

    def boolean(self, text: str, line: _Line) -> bool | None:
        if text in ("true", "false"):
            return text == "true"
        self.error(
            DiagnosticCode.BadValue,
            f"expected true or false, found '{text}'",
            line,
            text,
        )
        return None

    def pairs(
        self, section: str, keys: Sequence[str], repeatable: Sequence[str] = ()
    ) -> dict[str, list[tuple[str, _Line]]]:
        found: dict[str, list[tuple[str, _Line]]] = {}
        for line in self.sections.get(section, []):
            key, sep, value = line.text.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key or not value:
                self.error(DiagnosticCode.Syntax, "expected 'key = value'", line)
                continue
            if key not in keys and "*" not in keys:
                self.error(
                    DiagnosticCode.BadValue,
                    f"unknown key '{key}' in [{section}]",
                    line,
                    key,
                )
                continue
            if key in found and key not in repeatable and "*" not in repeatable:
                self.error(
                    DiagnosticCode.DuplicateName, f"duplicate key '{key}'", line, key
                )
                continue
            found.setdefault(key, []).append((value, line))
        return found

    # ---- elements ----------------------------------------------------------------

    def word(self, tokens: Sequence[str], line: _Line) -> tuple[Word, int] | None:
        """A canonical word from names, with the sign of the reordering"""
        if not tokens or list(tokens) == ["1"]:
            return Word(), 1
        letters: list[Generator] = []
        ok = True
        for token in tokens:
            if token not in self.alphabet:
                code = (
                    DiagnosticCode.UnknownGenerator
                    if _NAME.match(token)
                    else DiagnosticCode.Syntax
                )
                self.error(code, f"unknown generator '{token}'", line, token)
                ok = False
                continue
            letters.append(self.alphabet[token])
        if not ok:
            return None
        word, sign = canonicalize_word(letters)
        if word is None:
            self.error(
                DiagnosticCode.DegreeContract,
                f"word '{' '.join(tokens)}' repeats an odd generator",
                line,
                tokens[0],
            )
            return None
        return word, int(sign)

    def term(self, tokens: Sequence[str], line: _Line) -> Element | None:
        chunks = _SEPARATOR.split(" ".join(tokens))
        head = chunks[0].split()
        coefficient = Fraction(1)
        i = 0
        if head and _NUMBER.match(head[0]):
            coefficient = Fraction(head[0])
            i = 1

        novikov = Fraction(0)
        weight: dict[int, int] = {}
        group: tuple[int, ...] = ()
        while i < len(head):
            token = head[i]
            if token == "T" or token.startswith("T^"):
                exponent = self.fraction(token[2:], line) if token != "T" else 1
                if exponent is None:
                    return None
                novikov += exponent
            elif _WEIGHT.match(token):
                match = _WEIGHT.match(token)
                assert match is not None
                index = int(match.group(1))
                if index < 1:
                    self.error(
                        DiagnosticCode.BadValue, "weights start at t1", line, token
                    )
                    return None
                weight[index] = weight.get(index, 0) + int(match.group(2) or 1)
            elif _GROUP.match(token):
                match = _GROUP.match(token)
                assert match is not None
                group = tuple(int(g) for g in match.group(1).split(","))
            else:
                break
            i += 1

        word_tokens = [head[i:]] + [chunk.split() for chunk in chunks[1:]]
        words: list[Word] = []
        sign = 1
        for position, chunk in enumerate(word_tokens):
            if not chunk and position > 0:
                self.error(DiagnosticCode.Syntax, "empty word", line, "⊙")
                return None
            if "1" in chunk and len(chunk) > 1:
                self.error(
                    DiagnosticCode.Syntax, "the scalar word 1 stands alone", line
                )
                return None
            parsed = self.word(chunk, line)
            if parsed is None:
                return None
            words.append(parsed[0])
            sign *= parsed[1]

        rank = max(weight, default=0)
        exponents = tuple(weight.get(k, 0) for k in range(1, rank + 1))
        tag = Tag(novikov, group, exponents)
        try:
            self.ring.validate(tag)
        except DegreeContractError as exc:
            self.error(DiagnosticCode.DegreeContract, str(exc), line)
            return None
        return Element.of_words(words, sign * coefficient, tag)

    def element(self, text: str, line: _Line) -> Element | None:
        tokens = text.split()
        terms: list[tuple[int, list[str]]] = []
        sign = 1
        current: list[str] = []
        for i, token in enumerate(tokens):
            if token in ("+", "-"):
                if i == 0 and token == "-":
                    sign = -1
                    continue
                if not current:
                    self.error(
                        DiagnosticCode.Syntax, f"unexpected '{token}'", line, token
                    )
                    return None
                terms.append((sign, current))
                current = []
                sign = 1 if token == "+" else -1
            else:
                current.append(token)
        if not current:
            self.error(DiagnosticCode.Syntax, "expected a term", line)
            return None
        terms.append((sign, current))

        result = Element()
        for sign, term_tokens in terms:
            value = self.term(term_tokens, line)
            if value is None:
                return None
            result = result + value * sign
        return result

    def elements(self, section: str) -> Element | None:
        result = Element()
        for line in self.sections.get(section, []):
            value = self.element(line.text, line)
            if value is None:
                return None
            result = result + value
        return result

    # ---- sections ----------------------------------------------------------------

    def parse(self) -> ModelSpec:
        self.split()
        if "generators" not in self.sections:
            self.error(
                DiagnosticCode.MissingSection, "missing [generators] section", None
            )
            raise self.fail()

        model = self.read_model()
        n = model["n"] if isinstance(model["n"], int) else None
        independent = bool(model["independent_gradings"])
        self.ring = self.read_coefficients()
        generators = self.read_generators(n, independent)
        if self.diagnostics:
            raise self.fail()
        try:
            self.alphabet = Alphabet(generators, n, independent)
        except (ValueError, DegreeContractError) as exc:
            header = self.headers["generators"]
            self.error(DiagnosticCode.DegreeContract, str(exc), header)
            raise self.fail() from None

        truncation, kmax = self.read_truncation()
        operators = self.read_operators(bool(model["action_decreasing"]))
        mc = self.read_mc()
        seed = self.elements("seed") if "seed" in self.sections else None
        augmentation = self.read_augmentation()
        geometry = self.read_geometry()

        if self.diagnostics or operators is None:
            raise self.fail()
        spec = ModelSpec(
            alphabet=self.alphabet,
            operators=operators,
            name=str(model["name"] or ""),
            ring=self.ring,
            mc=mc,
            seed=seed,
            augmentation=augmentation,
            truncation=truncation,
            kmax=kmax,
            geometry=geometry,
            format_version=self.format_version,
            source=self.source,
        )
        logger.debug(
            "Parsed %s: %s generators, %s operator entries",
            self.source,
            len(self.alphabet),
            len(operators),
        )
        return spec

    def read_model(self) -> dict[str, object]:
        found = self.pairs(
            "model", ("name", "n", "independent_gradings", "action_decreasing")
        )
        model: dict[str, object] = {
            "name": None,
            "n": None,
            "independent_gradings": False,
            "action_decreasing": False,
        }
        for key, [(value, line)] in found.items():
            if key == "name":
                model[key] = value
            elif key == "n":
                n = self.integer(value, line)
                if n is not None and n < 1:
                    self.error(
                        DiagnosticCode.BadValue, "n must be positive", line, value
                    )
                model[key] = n
            else:
                model[key] = self.boolean(value, line)
        return model

    def read_coefficients(self) -> CoefficientRing:
        found = self.pairs("coefficients", ("ring", "order", "pairing", "weights"))
        kind = RingKind.Rational
        order: Fraction | None = None
        pairing: tuple[Fraction, ...] = ()
        weights = 0
        for key, [(value, line)] in found.items():
            if key == "ring":
                try:
                    kind = RingKind(value)
                except ValueError:
                    self.error(
                        DiagnosticCode.BadValue, f"unknown ring '{value}'", line, value
                    )
            elif key == "order":
                order = self.fraction(value, line)
            elif key == "pairing":
                parsed = [self.fraction(v, line) for v in value.split(",")]
                pairing = tuple(p for p in parsed if p is not None)
            else:
                weights = self.integer(value, line) or 0
        try:
            return CoefficientRing(kind, order, pairing, weights)
        except ValueError as exc:
            header = self.headers.get("coefficients")
            self.error(DiagnosticCode.BadValue, str(exc), header)
            return RATIONAL

    def read_generators(self, n: int | None, independent: bool) -> list[Generator]:
        generators: list[Generator] = []
        seen: set[str] = set()
        keys = ("z2", "q", "cz", "action", "label", "flags", "mult")
        for line in self.sections["generators"]:
            name, *attributes = line.text.split()
            if not _NAME.match(name) or _RESERVED.match(name):
                self.error(
                    DiagnosticCode.BadValue,
                    f"invalid generator name '{name}'",
                    line,
                    name,
                )
                continue
            if name in seen:
                self.error(
                    DiagnosticCode.DuplicateName,
                    f"duplicate generator '{name}'",
                    line,
                    name,
                )
                continue
            seen.add(name)

            values: dict[str, str] = {}
            for attribute in attributes:
                key, sep, value = attribute.partition("=")
                if not sep or not value:
                    code = DiagnosticCode.Syntax
                    message = "expected 'key=value'"
                elif key not in keys:
                    code = DiagnosticCode.BadValue
                    message = f"unknown attribute '{key}'"
                elif key in values:
                    code = DiagnosticCode.DuplicateName
                    message = f"duplicate attribute '{key}'"
                else:
                    values[key] = value
                    continue
                self.error(code, message, line, attribute)

            q = self.fraction(values["q"], line) if "q" in values else None
            cz = self.fraction(values["cz"], line) if "cz" in values else None
            if q is None and cz is not None and n is not None:
                q = cz + n - 3
            z2: int | None = None
            if "z2" in values:
                z2 = self.integer(values["z2"], line)
            elif q is not None and q.denominator == 1:
                z2 = int(q % 2)
            if z2 is None:
                if "z2" not in values:
                    message = f"generator '{name}' needs z2"
                    self.error(DiagnosticCode.Syntax, message, line, name)
                continue
            if (
                not independent
                and q is not None
                and q.denominator == 1
                and q % 2 != z2
            ):
                self.error(
                    DiagnosticCode.DegreeContract,
                    f"rational degree {q} of '{name}' "
                    f"does not reduce to z2 degree {z2}",
                    line,
                    name,
                )
                continue

            label = None
            if "label" in values:
                parts = [self.integer(v, line) for v in values["label"].split(",")]
                if any(p is None for p in parts):
                    continue
                label = tuple(p for p in parts if p is not None)
            action = self.fraction(values.get("action", "1"), line) or Fraction(0)
            flags = frozenset(f for f in values.get("flags", "").split(",") if f)
            try:
                generators.append(
                    Generator(
                        name=name,
                        index=len(generators),
                        z2_degree=z2,
                        action=action,
                        q_degree=q,
                        cz=cz,
                        homology_label=label,
                        flags=flags,
                        multiplicity=self.integer(values.get("mult", "1"), line) or 0,
                    )
                )
            except (ValueError, DegreeContractError) as exc:
                self.error(DiagnosticCode.BadValue, str(exc), line, name)
        return generators

    def read_truncation(self) -> tuple[TruncationPolicy, int | None]:
        found = self.pairs(
            "truncation", ("letters", "sentences", "action", "order", "kmax")
        )
        changes: dict[str, object] = {}
        kmax = None
        if self.ring.order is not None:
            changes["order"] = self.ring.order
        for key, [(value, line)] in found.items():
            if key == "letters":
                changes["max_letters"] = self.integer(value, line)
            elif key == "sentences":
                changes["max_sentences"] = self.integer(value, line)
            elif key == "action":
                changes["action_bound"] = self.fraction(value, line)
            elif key == "order":
                changes["order"] = self.fraction(value, line)
            else:
                kmax = self.integer(value, line)
                if kmax is not None and kmax < 1:
                    self.error(
                        DiagnosticCode.BadValue, "kmax must be positive", line, value
                    )
        try:
            return DEFAULT_TRUNCATION.replace(**changes), kmax
        except ValueError as exc:
            header = self.headers.get("truncation")
            self.error(DiagnosticCode.BadValue, str(exc), header)
            return DEFAULT_TRUNCATION, kmax

    def read_operators(self, action_decreasing: bool) -> OperatorFamily | None:
        entries: dict[Word, Element] = {}
        origin: dict[Word, _Line] = {}

        def add(word: Word, output: Element, line: _Line) -> None:
            entries[word] = entries.get(word, Element()) + output
            origin.setdefault(word, line)

        for line in self.sections.get("operators", []):
            left, sep, right = line.text.partition("->")
            if not sep or not left.strip() or not right.strip():
                self.error(
                    DiagnosticCode.Syntax, "expected '<word> -> <element>'", line
                )
                continue
            parsed = self.word(left.split(), line)
            output = self.element(right, line)
            if parsed is None or output is None:
                continue
            word, sign = parsed
            if word.is_scalar:
                self.error(
                    DiagnosticCode.DegreeContract,
                    "operators need a nonempty input",
                    line,
                )
                continue
            add(word, output * sign, line)

        for line in self.sections.get("curves", []):
            left, sep, count_text = line.text.rpartition(":")
            positive, arrow, negative = left.partition("->")
            if not sep or not arrow or not positive.strip():
                self.error(
                    DiagnosticCode.Syntax,
                    "expected '<positive orbits> -> <negative orbits> : <count>'",
                    line,
                )
                continue
            count = self.fraction(count_text, line)
            parsed = self.word(positive.split(), line)
            names = [t for t in negative.split() if t != "1"]
            out = self.word(names, line)
            if count is None or parsed is None or out is None:
                continue
            word, sign = parsed
            if word.is_scalar:
                self.error(
                    DiagnosticCode.DegreeContract,
                    "curves need a positive puncture",
                    line,
                )
                continue
            negatives = [self.alphabet[name] for name in names]
            value = normalize_count(count, negatives) * sign * out[1]
            add(word, Element.of_word(out[0], value), line)

        for word, output in entries.items():
            try:
                OperatorFamily(
                    self.alphabet, {word: output}, self.ring, action_decreasing
                )
            except (DegreeContractError, MixedModelError) as exc:
                self.error(DiagnosticCode.DegreeContract, str(exc), origin[word])
        if self.diagnostics:
            return None
        return OperatorFamily(self.alphabet, entries, self.ring, action_decreasing)

    def read_mc(self) -> MaurerCartanElement | None:
        if "maurer-cartan" not in self.sections:
            return None
        body = self.elements("maurer-cartan")
        if body is None:
            return None
        lines = self.sections["maurer-cartan"]
        first = lines[0] if lines else None
        try:
            return MaurerCartanElement(body, self.ring, self.alphabet)
        except DegreeContractError as exc:
            self.error(DiagnosticCode.DegreeContract, str(exc), first)
        except DivergentSeriesError as exc:
            self.error(DiagnosticCode.BadValue, str(exc), first)
        return None

    def read_augmentation(self) -> Augmentation | None:
        if "augmentation" not in self.sections:
            return None
        values: dict[Word, Fraction] = {}
        for line in self.sections["augmentation"]:
            left, sep, right = line.text.partition("=")
            if not sep or not left.strip() or not right.strip():
                self.error(DiagnosticCode.Syntax, "expected '<word> = <value>'", line)
                continue
            parsed = self.word(left.split(), line)
            value = self.fraction(right, line)
            if parsed is None or value is None:
                continue
            word, sign = parsed
            if word.is_scalar:
                self.error(
                    DiagnosticCode.DegreeContract,
                    "augmentations need a nonempty input",
                    line,
                )
                continue
            values[word] = values.get(word, Fraction(0)) + sign * value
        try:
            return Augmentation(self.alphabet, values, self.ring)
        except (DegreeContractError, MixedModelError) as exc:
            header = self.headers["augmentation"]
            self.error(DiagnosticCode.DegreeContract, str(exc), header)
            return None

    def read_geometry(self) -> Geometry | None:
        if "geometry" not in self.sections:
            return None
        found = self.pairs("geometry", ("*",), repeatable=("*",))
        header = self.headers["geometry"]
        kind_values = found.pop("kind", [])
        if len(kind_values) != 1:
            self.error(
                DiagnosticCode.Syntax, "[geometry] needs exactly one 'kind'", header
            )
            return None
        kind_text, kind_line = kind_values[0]
        try:
            kind = GeometryKind(kind_text)
        except ValueError:
            self.error(
                DiagnosticCode.BadValue,
                f"unknown geometry '{kind_text}'",
                kind_line,
                kind_text,
            )
            return None

        schedule: tuple[Fraction, ...] = ()
        for value, line in found.pop("schedule", []):
            parsed = [self.fraction(v, line) for v in value.split(",")]
            schedule = tuple(p for p in parsed if p is not None)
        parameters = tuple(
            (key, value)
            for _, key, value in sorted(
                (line.number, key, value)
                for key, entries in found.items()
                for value, line in entries
            )
        )
        try:
            return Geometry(kind, schedule, parameters)
        except SpectrumError as exc:
            self.error(DiagnosticCode.BadValue, str(exc), header)
            return None


def parse_model(text: str, source: str = "<model>") -> ModelSpec:
    """
    Parses and validates a model file.

    :param text: File contents.
    :param source: Name of the file, used in diagnostics.
    :raises ModelParseError: with every diagnostic found.
    """
    return ModelParser(text, source).parse()


def parse_element(
    text: str, alphabet: Alphabet, ring: CoefficientRing = RATIONAL
) -> Element:
    """
    Parses one element spelling over an alphabet.

    :raises ModelParseError: if the spelling is invalid.
    """
    parser = ModelParser(text, "<element>")
    parser.alphabet = alphabet
    parser.ring = ring
    line = _Line(1, 1, text.strip(), text)
    element = parser.element(text, line)
    if element is None:
        raise parser.fail()
    return element


def _format_generator(g: Generator) -> str:
    parts = [g.name, f"z2={g.z2_degree}"]
    if g.q_degree is not None:
        parts.append(f"q={g.q_degree}")
    if g.cz is not None:
        parts.append(f"cz={g.cz}")
    parts.append(f"action={g.action}")
    if g.homology_label is not None:
        parts.append("label=" + ",".join(str(v) for v in g.homology_label))
    if g.flags:
        parts.append("flags=" + ",".join(sorted(g.flags)))
    if g.multiplicity != 1:
        parts.append(f"mult={g.multiplicity}")
    return " ".join(parts)


def format_generators(generators: Sequence[Generator]) -> str:
    """A ``[generators]`` section declaring the given generators"""
    return "\n".join(["[generators]"] + [_format_generator(g) for g in generators])


def format_model(spec: ModelSpec) -> str:
    """
    Prints a model in canonical form.

    Curve counts appear as their normalized structure constants in ``[operators]``.
    """
    lines: list[str] = []
    if spec.format_version is not None:
        lines += [f"format = {spec.format_version}", ""]

    model = []
    if spec.name:
        model.append(f"name = {spec.name}")
    if spec.alphabet.n is not None:
        model.append(f"n = {spec.alphabet.n}")
    if spec.alphabet.independent_gradings:
        model.append("independent_gradings = true")
    if spec.action_decreasing:
        model.append("action_decreasing = true")
    if model:
        lines += ["[model]"] + model + [""]

    ring = spec.ring
    if ring != RATIONAL:
        lines += ["[coefficients]", f"ring = {ring.kind.value}"]
        if ring.order is not None:
            lines.append(f"order = {ring.order}")
        if ring.pairing:
            lines.append("pairing = " + ", ".join(str(p) for p in ring.pairing))
        if ring.weight_rank:
            lines.append(f"weights = {ring.weight_rank}")
        lines.append("")

    lines += [format_generators(spec.alphabet.generators), ""]

    if len(spec.operators):
        lines.append("[operators]")
        lines += [f"{word} -> {output}" for word, output in spec.operators.items()]
        lines.append("")
    if spec.mc is not None:
        lines += ["[maurer-cartan]", str(spec.mc.body), ""]
    if spec.seed is not None:
        lines += ["[seed]", str(spec.seed), ""]
    if spec.augmentation is not None:
        lines.append("[augmentation]")
        lines += [f"{w} = {v}" for w, v in spec.augmentation.values.items()]
        lines.append("")

    t = spec.truncation
    lines += [
        "[truncation]",
        f"letters = {t.max_letters}",
        f"sentences = {t.max_sentences}",
    ]
    if t.action_bound is not None:
        lines.append(f"action = {t.action_bound}")
    lines.append(f"order = {t.order}")
    if spec.kmax is not None:
        lines.append(f"kmax = {spec.kmax}")
    lines.append("")

    if spec.geometry is not None:
        lines += ["[geometry]", f"kind = {spec.geometry.kind.value}"]
        if spec.geometry.schedule:
            schedule = ", ".join(str(d) for d in spec.geometry.schedule)
            lines.append(f"schedule = {schedule}")
        lines += [f"{k} = {v}" for k, v in spec.geometry.parameters]
        lines.append("")
    return "\n".join(lines)


def load_model(source: str | Path) -> ModelSpec:
    """
    Loads a model from a file, or from the shipped corpus by name.

    :param source: A path, or the name of a shipped model with or without the
        ``.model`` suffix.
    :raises FileNotFoundError: if neither exists.
    :raises ModelParseError: if the model is invalid.
    """
    path = Path(source)
    if path.is_file():
        return parse_model(path.read_text(encoding="utf-8"), str(source))
    text = resources.model_text(str(source))
    return parse_model(text, path.name)

