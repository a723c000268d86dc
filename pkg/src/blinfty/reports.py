# -*- coding: utf-8 -*-
"""
Plain text rendering of results

Every renderer returns a string without trailing newline. Sentences and elements are
printed in canonical form, so reports are stable across runs and worker counts.
"""
from __future__ import annotations

# system imports
from fractions import Fraction
from typing import Sequence

# local imports
from .base import Report
from .homology import HomologyResult, TorsionResult
from .deformation import LinearizedFamily, WeightedWitness
from .orbits import (
    Certificate,
    ConfigurationQuery,
    Counterexample,
    OrbitSpectrum,
)
from .dsl import format_generators

__all__ = [
    "render_report",
    "render_reports",
    "render_homology",
    "render_torsion",
    "render_linearized",
    "render_weighted",
    "render_spectrum",
    "render_vdim",
    "render_certificate",
]

BLINFTY_WITNESS = "  p̂²({label}) = {residual}"


def render_report(
    report: Report, witness: str = "  {label}: {residual}", unit: str = "sentences"
) -> str:
    """
    Renders a verification report.

    :param report: The report.
    :param witness: Format of one failure line, with ``label`` and ``residual``.
    :param unit: What the checked inputs are called.
    """
    if report.passed:
        head = f"{report.title} verified {report.soundness.value}"
        if report.order is not None:
            head += f" to order {report.order}"
        return f"{head}\nchecked {report.checked} {unit}"
    lines = [f"{report.title} fails on {len(report.failures)} {unit}"]
    lines += [
        witness.format(label=w.label, residual=w.residual) for w in report.failures
    ]
    return "\n".join(lines)


def render_reports(reports: Sequence[Report]) -> str:
    """Renders the reports of the ``check`` command"""
    blocks = []
    for report in reports:
        if report.title.startswith("BL_∞"):
            blocks.append(render_report(report, BLINFTY_WITNESS))
        else:
            blocks.append(render_report(report, unit="inputs"))
    return "\n".join(blocks)


def render_homology(result: HomologyResult) -> str:
    lines = [
        f"homology of E^{result.level} V on {result.size} sentences "
        f"({result.soundness.value})"
    ]
    lines += [f"H_{grade} = {dim}" for grade, dim in result.dimensions]
    if result.unit.vanishes:
        lines.append(f"unit class vanishes; witness: {result.unit.witness}")
    else:
        lines.append("unit class survives")
    return "\n".join(lines)


def render_torsion(result: TorsionResult) -> str:
    return str(result)


def render_linearized(result: LinearizedFamily) -> str:
    lines = [f"p^(1,1)_ε({g.name}) = {out}" for g, out in result.differential]
    if not result.differential:
        lines.append("p^(1,1)_ε = 0")
    lines.append(render_report(result.report, unit="words"))
    dims = result.dimensions
    lines.append(f"linearized homology: even {dims[0]}, odd {dims[1]}")
    return "\n".join(lines)


def render_weighted(result: WeightedWitness) -> str:
    return f"weighted witness {result}"


def render_spectrum(spectrum: OrbitSpectrum) -> str:
    head = (
        f"# {len(spectrum)} orbits below period {spectrum.threshold}, "
        f"n = {spectrum.n}"
    )
    return "\n".join([head, format_generators(spectrum.orbits)])


def render_vdim(query: ConfigurationQuery, value: Fraction, trivial: bool) -> str:
    lines = [f"vdim = {value}"]
    if trivial:
        lines.append(
            f"note: trivial cylinder over {query.positive[0].name}, "
            "exempt from the dimension argument"
        )
    return "\n".join(lines)


def render_certificate(result: Certificate | Counterexample) -> str:
    return str(result)
