# -*- coding: utf-8 -*-
"""
Reeb orbit spectra of model contact forms

Spectra are lists of :class:`~blinfty.graded.Generator` records carrying a
Conley-Zehnder index, a period, an SFT degree μ_CZ + n − 3 and an optional winding
label. They export to the ``[generators]`` section of a model file. Virtual dimensions
of punctured curves are evaluated exactly, and torsion lower bounds are certified by
enumerating every configuration of positive punctures below a period threshold.
"""
from __future__ import annotations

# system imports
import logging
import math
import dataclasses
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

# local imports
from .base import ConfigurationError, MorseDataError, SpectrumError
from .graded import Alphabet, Generator
from .homology import rank

__all__ = [
    "GeometryKind",
    "Geometry",
    "CriticalPoint",
    "MorseData",
    "OrbitSpectrum",
    "ConfigurationQuery",
    "Configuration",
    "Certificate",
    "Counterexample",
    "SPINE",
    "PAPER",
    "HANDLE",
    "BINDING",
    "product_boundary_spectrum",
    "handle_spectrum",
    "spinal_spectrum",
    "vdim",
    "is_trivial_cylinder",
    "certify_lower_bound",
    "morse_homology",
    "normalize_count",
    "morse_data",
    "period_bound",
    "geometry_spectrum",
]

logger = logging.getLogger(__name__)

SPINE = "spine"
PAPER = "paper"
HANDLE = "handle"
BINDING = "binding"


class GeometryKind(Enum):
    """Model contact forms with a known spectrum"""

    Morse = "morse"
    """Boundary of a product Σ × D² with Morse data on Σ."""

    Handle = "handle"
    """A contact connected sum through a one-handle."""

    Spinal = "spinal"
    """A spinal open book with paper regions."""


@dataclass(frozen=True)
class Geometry:
    """Geometric metadata of a model"""

    kind: GeometryKind
    """Which model contact form"""

    schedule: tuple[Fraction, ...] = ()
    """Increasing period thresholds D₁ < D₂ < … of a sequence of contact forms"""

    parameters: tuple[tuple[str, str], ...] = ()
    """Kind specific settings as written in the model, keys may repeat"""

    def __post_init__(self) -> None:
        for prev, cur in zip(self.schedule, self.schedule[1:]):
            if cur <= prev:
                raise SpectrumError(
                    f"period schedule must increase, found {prev} before {cur}"
                )

    def get(self, key: str, default: str | None = None) -> str | None:
        """The last value given for ``key``"""
        values = self.values(key)
        return values[-1] if values else default

    def values(self, key: str) -> list[str]:
        return [v for k, v in self.parameters if k == key]


@dataclass(frozen=True)
class CriticalPoint:
    """A critical point of a Morse function on Σ"""

    name: str
    index: int
    value: Fraction


@dataclass(frozen=True)
class MorseData:
    """
    A self-indexing Morse function with a unique minimum and its cochain complex

    The differential raises the Morse index by one.
    """

    complex_dimension: int
    """Complex dimension of Σ"""

    critical_points: tuple[CriticalPoint, ...]
    """Critical points with index and value in (0, 1)"""

    differential: Mapping[tuple[str, str], int] = field(default_factory=dict)
    """Coefficient of q in d(p), keyed by (p, q)"""

    def __post_init__(self) -> None:
        names = [c.name for c in self.critical_points]
        if len(set(names)) != len(names):
            raise MorseDataError("critical point names must be unique")
        top = 2 * self.complex_dimension
        for c in self.critical_points:
            if not 0 <= c.index <= top:
                raise MorseDataError(f"'{c.name}' has index {c.index} outside 0..{top}")
            if not 0 < c.value < 1:
                raise MorseDataError(f"'{c.name}' has value {c.value} outside (0, 1)")
        for p in self.critical_points:
            for q in self.critical_points:
                if p.index > q.index and not p.value > q.value:
                    raise MorseDataError(
                        f"not self-indexing: f({p.name}) <= f({q.name}) but "
                        f"ind({p.name}) > ind({q.name})"
                    )
        minima = [c for c in self.critical_points if c.index == 0]
        if self.critical_points and len(minima) != 1:
            raise MorseDataError(f"expected a unique minimum, found {len(minima)}")

        by_name = {c.name: c for c in self.critical_points}
        for (p, q), value in self.differential.items():
            if p not in by_name or q not in by_name:
                raise MorseDataError(f"differential entry ({p}, {q}) is undeclared")
            if by_name[q].index != by_name[p].index + 1 and value:
                raise MorseDataError(
                    f"differential entry ({p}, {q}) does not raise the index by one"
                )

    def point(self, name: str) -> CriticalPoint:
        for c in self.critical_points:
            if c.name == name:
                return c
        raise MorseDataError(f"unknown critical point '{name}'")


@dataclass(frozen=True)
class OrbitSpectrum:
    """The Reeb orbits of a model contact form below a period threshold"""

    orbits: tuple[Generator, ...]
    """Orbits in declaration order"""

    n: int
    """Half dimension of the symplectization"""

    threshold: Fraction
    """Period bound D"""

    regions: int = 0
    """Number of paper regions of a spinal spectrum"""

    def __post_init__(self) -> None:
        for g in self.orbits:
            if g.cz is None:
                continue
            degree = g.cz + self.n - 3
            if degree.denominator == 1 and g.z2_degree != degree % 2:
                raise SpectrumError(
                    f"orbit '{g.name}' has z2 degree {g.z2_degree}, "
                    f"expected {degree % 2}"
                )

    def __len__(self) -> int:
        return len(self.orbits)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.orbits)

    def __getitem__(self, name: str) -> Generator:
        for g in self.orbits:
            if g.name == name:
                return g
        raise SpectrumError(f"unknown orbit '{name}'")

    def alphabet(self) -> Alphabet:
        """The orbits as the generators of a model"""
        integral = all(
            g.q_degree is None or g.q_degree.denominator == 1 for g in self.orbits
        )
        return Alphabet(self.orbits, self.n, independent_gradings=not integral)

    def cz_multiset(self) -> Counter[Fraction]:
        return Counter(g.cz for g in self.orbits if g.cz is not None)


def _orbit(
    name: str,
    index: int,
    cz: Fraction,
    n: int,
    period: Fraction,
    label: tuple[int, ...] | None = None,
    flags: Iterable[str] = (),
    multiplicity: int = 1,
) -> Generator:
    q = Fraction(cz) + n - 3
    z2 = int(q % 2) if q.denominator == 1 else int(math.floor(q)) % 2
    return Generator(
        name=name,
        index=index,
        z2_degree=z2,
        action=Fraction(period),
        q_degree=q,
        cz=Fraction(cz),
        homology_label=label,
        flags=frozenset(flags),
        multiplicity=multiplicity,
    )


def _reindex(orbits: Sequence[Generator]) -> tuple[Generator, ...]:
    return tuple(dataclasses.replace(g, index=i) for i, g in enumerate(orbits))


def product_boundary_spectrum(m: MorseData, bound: Fraction) -> OrbitSpectrum:
    """
    Orbits of the boundary of Σ × D² below period ``bound``.

    Each critical point p gives one orbit winding once around the binding, with period
    1/f(p) and Conley-Zehnder index dim_ℂ Σ − ind(p) + 2. Orbits are listed by
    increasing period.

    :raises SpectrumError: if ``bound`` exceeds 2, where further orbits appear.
    """
    bound = Fraction(bound)
    if bound > 2:
        raise SpectrumError(f"period bound {bound} > 2 needs a handle block")
    n = m.complex_dimension + 1
    points = sorted(m.critical_points, key=lambda c: (-c.value, c.name))
    orbits = [
        _orbit(
            f"gamma_{c.name}",
            0,
            Fraction(m.complex_dimension - c.index + 2),
            n,
            1 / Fraction(c.value),
            label=(1,),
            flags=(BINDING,),
        )
        for c in points
        if 1 / Fraction(c.value) < bound
    ]
    logger.debug("Product boundary spectrum has %s orbits below %s", len(orbits), bound)
    return OrbitSpectrum(_reindex(orbits), n, bound)


def handle_spectrum(n: int, bound: Fraction, period: Fraction) -> OrbitSpectrum:
    """
    Orbits of a one-handle of a contact connected sum.

    The simple orbits γ_{h,i}, 1 ≤ i ≤ n, share the period τ. Their k-fold covers up
    to k₀ = ⌊D/τ⌋ have Conley-Zehnder index n − 1 + 2(k−1)n + 2i, so the indices run
    over n+1, n+3, …, 2k₀n + n − 1, each once. Orbits are named ``h<i>_<k>``.
    """
    if n < 2:
        raise SpectrumError("handle spectra need n >= 2")
    period = Fraction(period)
    if period <= 0:
        raise SpectrumError("handle orbit period must be positive")
    kmax = math.floor(Fraction(bound) / period)
    if kmax == 0:
        logger.warning("Period bound %s is below the handle period %s", bound, period)
    orbits = [
        _orbit(
            f"h{i}_{k}",
            0,
            Fraction(n - 1 + 2 * (k - 1) * n + 2 * i),
            n,
            k * period,
            flags=(HANDLE,),
            multiplicity=k,
        )
        for k in range(1, kmax + 1)
        for i in range(1, n + 1)
    ]
    return OrbitSpectrum(_reindex(orbits), n, Fraction(bound))


def spinal_spectrum(
    base: OrbitSpectrum,
    regions: int,
    bound: Fraction,
    paper_period: Fraction | None = None,
    c1_trivial: bool = True,
) -> OrbitSpectrum:
    """
    Orbits of a spinal open book with ``regions`` paper regions.

    Every base orbit γ below ``bound`` lifts to one orbit ``<γ>_hat`` with index
    μ_CZ(γ) + 1 and ``regions − 1`` orbits ``<γ>_check<i>`` with index μ_CZ(γ), all in
    the spine. When ``paper_period`` is given, paper orbit classes ``paper<j>_<m>``
    of period m·``paper_period`` wind m times around the j-th boundary of the spine
    base. They carry no Conley-Zehnder index.

    :raises SpectrumError: if ``regions`` < 1, the bound exceeds the base threshold or
        the framing hypothesis does not hold.
    """
    if regions < 1:
        raise SpectrumError("a spinal open book has at least one paper region")
    bound = Fraction(bound)
    if bound > base.threshold:
        raise SpectrumError(
            f"period bound {bound} exceeds the base threshold {base.threshold}"
        )
    if not c1_trivial:
        raise SpectrumError(
            "index shifts are undefined without a trivial first Chern class"
        )

    orbits: list[Generator] = []
    for g in base.orbits:
        if g.cz is None:
            raise SpectrumError(f"base orbit '{g.name}' has no Conley-Zehnder index")
        if g.action >= bound:
            continue
        orbits.append(
            _orbit(f"{g.name}_hat", 0, g.cz + 1, base.n, g.action, flags=(SPINE,))
        )
        for i in range(1, regions):
            orbits.append(
                _orbit(f"{g.name}_check{i}", 0, g.cz, base.n, g.action, flags=(SPINE,))
            )

    if paper_period is not None:
        paper_period = Fraction(paper_period)
        covers = math.ceil(bound / paper_period) - 1
        for m in range(1, covers + 1):
            for j in range(regions):
                label = tuple(m if r == j else 0 for r in range(regions))
                orbits.append(
                    Generator(
                        name=f"paper{j + 1}_{m}",
                        index=0,
                        z2_degree=0,
                        action=m * paper_period,
                        homology_label=label,
                        flags=frozenset((PAPER,)),
                        multiplicity=m,
                    )
                )
    return OrbitSpectrum(_reindex(orbits), base.n, bound, regions)


@dataclass(frozen=True)
class ConfigurationQuery:
    """A punctured curve type in the symplectization"""

    n: int
    """Half dimension of the symplectization"""

    positive: tuple[Generator, ...]
    """Positive asymptotic orbits, as a multiset"""

    negative: tuple[Generator, ...] = ()
    """Negative asymptotic orbits, as a multiset"""

    genus: int = 0
    """Genus of the curve"""

    point_constraint: bool = False
    """Whether the curve passes through a fixed point"""

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise ConfigurationError("genus must be nonnegative")


def vdim(q: ConfigurationQuery) -> Fraction:
    """
    Virtual dimension (n−3)(2−2g−s⁺−s⁻) + Σμ_CZ(γ⁺) − Σμ_CZ(γ⁻) − 1.

    A point constraint costs 2n − 2 further dimensions.

    :raises ConfigurationError: if there are no positive punctures or an orbit has no
        Conley-Zehnder index.
    """
    if not q.positive:
        raise ConfigurationError("a nonconstant curve needs a positive puncture")
    for g in q.positive + q.negative:
        if g.cz is None:
            raise ConfigurationError(f"orbit '{g.name}' has no Conley-Zehnder index")
    euler = 2 - 2 * q.genus - len(q.positive) - len(q.negative)
    value = (
        (q.n - 3) * euler
        + sum((g.cz for g in q.positive), Fraction(0))  # type: ignore[misc]
        - sum((g.cz for g in q.negative), Fraction(0))  # type: ignore[misc]
        - 1
    )
    if q.point_constraint:
        value -= 2 * q.n - 2
    return Fraction(value)


def is_trivial_cylinder(q: ConfigurationQuery) -> bool:
    """Whether the query describes the ℝ-invariant cylinder over one orbit"""
    return (
        len(q.positive) == 1
        and len(q.negative) == 1
        and q.positive[0] == q.negative[0]
        and q.genus == 0
        and not q.point_constraint
    )


@dataclass(frozen=True)
class Configuration:
    """Positive punctures of a curve without negative ends"""

    genus: int
    orbits: tuple[Generator, ...]
    vdim: Fraction | None = None
    """Virtual dimension, ``None`` for configurations excluded by winding"""

    @property
    def period(self) -> Fraction:
        return sum((g.action for g in self.orbits), Fraction(0))

    def __str__(self) -> str:
        names = " ".join(g.name for g in self.orbits)
        text = f"g={self.genus}: {names}"
        return text if self.vdim is None else f"{text} (vdim {self.vdim})"


@dataclass(frozen=True)
class Certificate:
    """Every configuration that could kill the unit has negative dimension"""

    m: int
    """The candidate torsion"""

    bound: Fraction
    """Period threshold D"""

    configurations: tuple[Configuration, ...]
    """Dimension checked configurations"""

    excluded: tuple[Configuration, ...] = ()
    """Configurations through paper classes whose windings cannot cancel"""

    def __bool__(self) -> bool:
        return True

    def __str__(self) -> str:
        lines = [
            f"certificate: all {len(self.configurations)} configurations have vdim < 0"
        ]
        lines.extend(f"  {c}" for c in self.configurations)
        if self.excluded:
            lines.append(f"excluded by winding: {len(self.excluded)} configurations")
        return "\n".join(lines)


@dataclass(frozen=True)
class Counterexample:
    """A configuration the dimension count cannot rule out"""

    configuration: Configuration
    reason: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"counterexample: {self.configuration} ({self.reason})"


def _windings_cancel(orbits: Sequence[Generator], regions: int) -> bool:
    """
    Whether the paper windings of a configuration vanish in the first homology of the
    spine base, where the sum of all boundary classes is zero.
    """
    total = [0] * regions
    for g in orbits:
        for j, w in enumerate(g.homology_label or ()):
            total[j] += w
    return len(set(total)) == 1


def certify_lower_bound(
    spectrum: OrbitSpectrum,
    m: int,
    bound: Fraction,
    spine_bound: Fraction | None = None,
) -> Certificate | Counterexample:
    """
    Certifies that no curve can witness torsion at most ``m``.

    Enumerates every genus g and multiset of at most m + 1 − g positive orbits of
    total period below ``bound``. Multisets through paper classes need windings that
    cancel, which takes at least one puncture per paper region; those that cannot are
    excluded, the others are counterexamples. Every remaining multiset of spine orbits
    must have negative virtual dimension.

    :param spine_bound: Declared upper bound on spine indices, violations are logged.
    :raises SpectrumError: if ``bound`` exceeds the spectrum threshold.
    """
    bound = Fraction(bound)
    if bound > spectrum.threshold:
        raise SpectrumError(
            f"period bound {bound} exceeds the spectrum threshold {spectrum.threshold}"
        )
    if spine_bound is not None:
        for g in spectrum.orbits:
            if SPINE in g.flags and g.cz is not None and g.cz > spine_bound:
                logger.warning(
                    "Spine orbit '%s' has index %s, above %s",
                    g.name,
                    g.cz,
                    spine_bound,
                )

    regions = max(spectrum.regions, 1)
    orbits = [g for g in spectrum.orbits if g.action < bound]
    checked: list[Configuration] = []
    excluded: list[Configuration] = []
    for genus in range(m + 1):
        for size in range(1, m + 2 - genus):
            for chosen in combinations_with_replacement(orbits, size):
                period = sum((g.action for g in chosen), Fraction(0))
                if period >= bound:
                    continue
                if any(PAPER in g.flags for g in chosen):
                    config = Configuration(genus, chosen)
                    if not _windings_cancel(chosen, regions):
                        excluded.append(config)
                        continue
                    return Counterexample(config, "paper windings cancel")
                query = ConfigurationQuery(spectrum.n, chosen, genus=genus)
                config = Configuration(genus, chosen, vdim(query))
                if config.vdim >= 0:  # type: ignore[operator]
                    return Counterexample(config, f"vdim = {config.vdim} >= 0")
                checked.append(config)
    logger.info("Checked %s configurations below period %s", len(checked), bound)
    return Certificate(m, bound, tuple(checked), tuple(excluded))


def morse_homology(m: MorseData) -> dict[int, int]:
    """
    Cohomology of a Morse cochain complex.

    :returns: Dimension per degree, for every degree 0..2·dim_ℂ Σ.
    :raises MorseDataError: if the differential does not square to zero.
    """
    points = sorted(m.critical_points, key=lambda c: (c.index, c.name))
    position = {c.name: i for i, c in enumerate(points)}
    columns: dict[str, dict[int, Fraction]] = {c.name: {} for c in points}
    for (p, q), value in sorted(m.differential.items()):
        if value:
            columns[p][position[q]] = Fraction(value)

    for c in points:
        square: dict[int, Fraction] = {}
        for r, value in columns[c.name].items():
            for s, inner in columns[points[r].name].items():
                square[s] = square.get(s, Fraction(0)) + value * inner
        if any(square.values()):
            raise MorseDataError(f"d² does not vanish on '{c.name}'")

    ranks = {
        i: rank([columns[c.name] for c in points if c.index == i])
        for i in range(2 * m.complex_dimension + 1)
    }
    dims = {}
    for i in range(2 * m.complex_dimension + 1):
        count = sum(1 for c in points if c.index == i)
        dims[i] = count - ranks[i] - ranks.get(i - 1, 0)
    return dims


def normalize_count(count: Fraction | int, negative: Sequence[Generator]) -> Fraction:
    """
    Turns a curve count into a structure constant.

    Divides by the product of the factorials of repeated negative orbits and by the
    product of their covering multiplicities.
    """
    repeats = Counter(g.name for g in negative)
    mu = math.prod(math.factorial(k) for k in repeats.values())
    kappa = math.prod(g.multiplicity for g in negative)
    return Fraction(count) / (mu * kappa)


def _fraction(geometry: Geometry, key: str, default: str | None = None) -> Fraction:
    value = geometry.get(key, default)
    if value is None:
        raise SpectrumError(f"{geometry.kind.value} geometry needs '{key}'")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise SpectrumError(f"invalid value '{value}' for '{key}'") from None


def morse_data(geometry: Geometry) -> MorseData:
    """
    Reads Morse data from a ``morse`` geometry block.

    The block gives ``dimension = <dim_ℂ Σ>``, one ``point = <name> <index> <value>``
    per critical point and ``differential = <p> <q> <coefficient>`` entries.
    """
    if geometry.kind is not GeometryKind.Morse:
        raise MorseDataError(f"a {geometry.kind.value} geometry has no Morse data")
    try:
        points = []
        for entry in geometry.values("point"):
            name, index, value = entry.split()
            points.append(CriticalPoint(name, int(index), Fraction(value)))
        differential = {}
        for entry in geometry.values("differential"):
            p, q, value = entry.split()
            differential[(p, q)] = int(value)
        dimension = int(geometry.get("dimension", "0") or 0)
    except ValueError as exc:
        raise MorseDataError(f"invalid Morse data: {exc}") from None
    return MorseData(dimension, tuple(points), differential)


def period_bound(geometry: Geometry | None, bound: Fraction | None) -> Fraction:
    """The requested period bound, else the last threshold of the schedule"""
    if bound is not None:
        return Fraction(bound)
    if geometry is not None and geometry.schedule:
        return geometry.schedule[-1]
    raise SpectrumError("no period bound given and no schedule declared")


def geometry_spectrum(
    geometry: Geometry, alphabet: Alphabet, bound: Fraction
) -> OrbitSpectrum:
    """
    The spectrum of a model contact form below ``bound``.

    Spinal geometries lift the generators of the model, read as the orbits of the
    spine base, with keys ``regions``, ``paper_period``, ``threshold`` and
    ``c1_trivial``. Handle geometries read ``n`` and ``period``.
    """
    if geometry.kind is GeometryKind.Morse:
        return product_boundary_spectrum(morse_data(geometry), bound)

    if geometry.kind is GeometryKind.Handle:
        n = geometry.get("n") or (str(alphabet.n) if alphabet.n else None)
        if n is None:
            raise SpectrumError("handle geometry needs 'n'")
        return handle_spectrum(int(n), bound, _fraction(geometry, "period"))

    if alphabet.n is None:
        raise SpectrumError("spinal geometry needs n in the [model] section")
    threshold = _fraction(geometry, "threshold", str(bound))
    base = OrbitSpectrum(alphabet.generators, alphabet.n, threshold)
    paper = geometry.get("paper_period")
    return spinal_spectrum(
        base,
        int(_fraction(geometry, "regions")),
        bound,
        paper_period=Fraction(paper) if paper is not None else None,
        c1_trivial=geometry.get("c1_trivial", "true") == "true",
    )
