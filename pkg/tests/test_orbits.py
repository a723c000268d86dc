import logging
from fractions import Fraction
from itertools import product

import pytest

from blinfty import ConfigurationError, Generator, MorseDataError, SpectrumError
from blinfty.orbits import (
    PAPER,
    SPINE,
    ConfigurationQuery,
    CriticalPoint,
    MorseData,
    OrbitSpectrum,
    certify_lower_bound,
    handle_spectrum,
    is_trivial_cylinder,
    morse_data,
    morse_homology,
    normalize_count,
    product_boundary_spectrum,
    spinal_spectrum,
    vdim,
)


def orbit(name, index, cz, n=3, action=1, multiplicity=1):
    q = Fraction(cz + n - 3)
    return Generator(
        name,
        index,
        int(q % 2),
        Fraction(action),
        q_degree=q,
        cz=Fraction(cz),
        multiplicity=multiplicity,
    )


def base_spectrum(g_cz=-6, h_cz=-7):
    orbits = (orbit("g", 0, g_cz, action=Fraction(1, 2)), orbit("h", 1, h_cz))
    return OrbitSpectrum(orbits, 3, Fraction(2))


def brute_force_configurations(spectrum, m, bound):
    """All (genus, orbit names) below ``bound`` without paper orbits"""
    orbits = [g for g in spectrum.orbits if g.action < bound]
    found = set()
    for genus in range(m + 1):
        for size in range(1, m + 2 - genus):
            for picks in product(range(len(orbits)), repeat=size):
                chosen = [orbits[i] for i in sorted(picks)]
                if any(PAPER in g.flags for g in chosen):
                    continue
                if sum(g.action for g in chosen) < bound:
                    found.add((genus, tuple(g.name for g in chosen)))
    return found


@pytest.fixture
def sphere():
    return MorseData(
        2,
        (
            CriticalPoint("min", 0, Fraction(3, 5)),
            CriticalPoint("max", 2, Fraction(4, 5)),
        ),
    )


def test_morse_homology_of_sphere(sphere):
    assert morse_homology(sphere) == {0: 1, 1: 0, 2: 1, 3: 0, 4: 0}


def test_morse_homology_with_differential():
    data = MorseData(
        1,
        (
            CriticalPoint("m", 0, Fraction(1, 4)),
            CriticalPoint("s", 1, Fraction(1, 2)),
            CriticalPoint("t", 1, Fraction(1, 2)),
            CriticalPoint("M", 2, Fraction(3, 4)),
        ),
        {("s", "M"): 1, ("t", "M"): -1},
    )
    assert morse_homology(data) == {0: 1, 1: 1, 2: 0}


def test_morse_differential_must_square_to_zero():
    data = MorseData(
        1,
        (
            CriticalPoint("a", 0, Fraction(1, 4)),
            CriticalPoint("b", 1, Fraction(1, 2)),
            CriticalPoint("c", 2, Fraction(3, 4)),
        ),
        {("a", "b"): 1, ("b", "c"): 1},
    )
    with pytest.raises(MorseDataError):
        morse_homology(data)


@pytest.mark.parametrize(
    "points, differential",
    [
        ((("a", 0, "1/2"), ("b", 0, "1/3")), {}),
        ((("a", 0, "1/2"), ("b", 3, "3/4")), {}),
        ((("a", 0, "1/2"), ("b", 1, "1/4")), {}),
        ((("a", 0, "1/2"), ("b", 2, "3/2")), {}),
        ((("a", 0, "1/4"), ("b", 2, "3/4")), {("a", "b"): 1}),
        ((("a", 0, "1/4"),), {("a", "z"): 1}),
    ],
)
def test_invalid_morse_data(points, differential):
    with pytest.raises(MorseDataError):
        MorseData(
            1,
            tuple(CriticalPoint(n, i, Fraction(v)) for n, i, v in points),
            differential,
        )


def test_product_boundary_spectrum(sphere):
    spectrum = product_boundary_spectrum(sphere, Fraction(2))
    assert spectrum.n == 3
    assert [g.name for g in spectrum] == ["gamma_max", "gamma_min"]
    assert [g.cz for g in spectrum] == [2, 4]
    assert [g.action for g in spectrum] == [Fraction(5, 4), Fraction(5, 3)]
    assert all(g.homology_label == (1,) for g in spectrum)
    assert len(product_boundary_spectrum(sphere, Fraction(3, 2))) == 1
    with pytest.raises(SpectrumError):
        product_boundary_spectrum(sphere, Fraction(3))


def test_odd_dimensional_fiber(model):
    spectrum = product_boundary_spectrum(
        morse_data(model("dstar_s3").geometry), Fraction(2)
    )
    top, bottom = spectrum["gamma_max"], spectrum["gamma_min"]
    assert (top.cz, top.q_degree, top.z2_degree) == (2, 3, 1)
    assert (bottom.cz, bottom.q_degree, bottom.z2_degree) == (5, 6, 0)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("covers", range(1, 6))
def test_handle_indices(n, covers):
    spectrum = handle_spectrum(n, Fraction(covers), Fraction(1))
    expected = [n - 1 + 2 * j for j in range(1, covers * n + 1)]
    assert sorted(g.cz for g in spectrum) == expected
    assert max(g.multiplicity for g in spectrum) == covers


def test_handle_names():
    spectrum = handle_spectrum(3, Fraction(5, 2), Fraction(1))
    assert [g.name for g in spectrum][:4] == ["h1_1", "h2_1", "h3_1", "h1_2"]
    assert spectrum["h2_2"].action == 2
    with pytest.raises(SpectrumError):
        spectrum["h1_3"]


def test_handle_below_period(caplog):
    with caplog.at_level(logging.WARNING):
        spectrum = handle_spectrum(3, Fraction(1, 2), Fraction(1))
    assert not len(spectrum)
    assert "below the handle period" in caplog.text
    with pytest.raises(SpectrumError):
        handle_spectrum(1, Fraction(2), Fraction(1))


def test_spinal_lifts():
    spectrum = spinal_spectrum(base_spectrum(), 3, Fraction(2), Fraction(3, 4))
    names = [g.name for g in spectrum]
    assert names[:6] == [
        "g_hat",
        "g_check1",
        "g_check2",
        "h_hat",
        "h_check1",
        "h_check2",
    ]
    assert spectrum["g_hat"].cz == -5
    assert spectrum["g_check2"].cz == -6
    assert all(SPINE in spectrum[n].flags for n in names[:6])
    papers = [g for g in spectrum if PAPER in g.flags]
    assert [g.name for g in papers] == [
        "paper1_1",
        "paper2_1",
        "paper3_1",
        "paper1_2",
        "paper2_2",
        "paper3_2",
    ]
    assert spectrum["paper2_2"].homology_label == (0, 2, 0)
    assert spectrum["paper2_2"].cz is None


def test_spinal_without_paper():
    spectrum = spinal_spectrum(base_spectrum(), 1, Fraction(1))
    assert [g.name for g in spectrum] == ["g_hat"]


@pytest.mark.parametrize(
    "regions, bound, c1_trivial",
    [(0, Fraction(2), True), (2, Fraction(3), True), (2, Fraction(2), False)],
)
def test_invalid_spinal(regions, bound, c1_trivial):
    with pytest.raises(SpectrumError):
        spinal_spectrum(base_spectrum(), regions, bound, c1_trivial=c1_trivial)


def test_vdim():
    five = orbit("e", 0, 5, n=4)
    query = ConfigurationQuery(4, (five,))
    assert vdim(query) == 5
    assert vdim(ConfigurationQuery(4, (five,), point_constraint=True)) == -1
    assert vdim(ConfigurationQuery(4, (five,), genus=1)) == 3
    assert vdim(ConfigurationQuery(4, (five,), (orbit("f", 1, 3, n=4),))) == 1


def test_trivial_cylinder():
    g = orbit("g", 0, 2)
    cylinder = ConfigurationQuery(3, (g,), (g,))
    assert is_trivial_cylinder(cylinder)
    assert vdim(cylinder) == -1
    assert not is_trivial_cylinder(ConfigurationQuery(3, (g,), (g,), genus=1))
    assert not is_trivial_cylinder(ConfigurationQuery(3, (g,)))


def test_invalid_queries():
    paper = spinal_spectrum(base_spectrum(), 2, Fraction(2), Fraction(1))["paper1_1"]
    with pytest.raises(ConfigurationError):
        vdim(ConfigurationQuery(3, ()))
    with pytest.raises(ConfigurationError):
        vdim(ConfigurationQuery(3, (paper,)))
    with pytest.raises(ConfigurationError):
        ConfigurationQuery(3, (paper,), genus=-1)


def test_normalize_count():
    g = orbit("g", 0, 2)
    h = orbit("h", 1, 4, multiplicity=2)
    assert normalize_count(12, [g, g, h]) == 3
    assert normalize_count(Fraction(1, 2), []) == Fraction(1, 2)


@pytest.mark.parametrize("m", [1, 2])
def test_certificate_enumerates_every_configuration(m):
    spectrum = spinal_spectrum(base_spectrum(), 3, Fraction(2), Fraction(3, 4))
    certificate = certify_lower_bound(spectrum, m, Fraction(2))
    assert certificate
    found = {
        (c.genus, tuple(g.name for g in c.orbits))
        for c in certificate.configurations
    }
    assert len(found) == len(certificate.configurations)
    assert found == brute_force_configurations(spectrum, m, Fraction(2))
    assert all(c.vdim < 0 for c in certificate.configurations)


def test_certificate_counts():
    spectrum = spinal_spectrum(base_spectrum(), 3, Fraction(2), Fraction(3, 4))
    certificate = certify_lower_bound(spectrum, 1, Fraction(2))
    assert len(certificate.configurations) == 27
    assert len(certificate.excluded) == 36
    assert str(certificate.configurations[0]) == "g=0: g_hat (vdim -6)"


def test_counterexample():
    spectrum = spinal_spectrum(base_spectrum(g_cz=4), 3, Fraction(2), Fraction(3, 4))
    result = certify_lower_bound(spectrum, 1, Fraction(2))
    assert not result
    assert str(result) == "counterexample: g=0: g_hat (vdim 4) (vdim = 4 >= 0)"


def test_cancelling_windings_are_counterexamples():
    spectrum = spinal_spectrum(base_spectrum(), 2, Fraction(2), Fraction(1, 2))
    result = certify_lower_bound(spectrum, 1, Fraction(2))
    assert not result
    assert result.reason == "paper windings cancel"
    assert [g.name for g in result.configuration.orbits] == ["paper1_1", "paper2_1"]


def test_certificate_bound_is_checked():
    spectrum = spinal_spectrum(base_spectrum(), 3, Fraction(2), Fraction(3, 4))
    with pytest.raises(SpectrumError):
        certify_lower_bound(spectrum, 1, Fraction(3))


def test_spine_bound_violation_is_logged(caplog):
    spectrum = spinal_spectrum(base_spectrum(), 3, Fraction(2), Fraction(3, 4))
    with caplog.at_level(logging.WARNING):
        certify_lower_bound(spectrum, 1, Fraction(2), spine_bound=Fraction(-6))
    assert "Spine orbit 'g_hat' has index -5, above -6" in caplog.text
