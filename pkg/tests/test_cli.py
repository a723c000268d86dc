import pytest

from blinfty.cli import main


BROKEN = """\
[generators]
s z2=0
m1 z2=1
m2 z2=1
t z2=0

[operators]
s -> m1 + m2
m1 -> t
m2 -> t
"""


@pytest.fixture
def run(capsys):
    def invoke(*argv):
        status = main(list(argv))
        out, err = capsys.readouterr()
        return status, out.rstrip("\n"), err

    return invoke


@pytest.fixture
def broken(tmp_path):
    path = tmp_path / "broken.model"
    path.write_text(BROKEN, encoding="utf-8")
    return str(path)


@pytest.mark.parametrize(
    "golden_name, argv",
    [
        ("check_torsion1", ["check", "torsion1"]),
        ("check_trivial", ["check", "trivial"]),
        ("torsion_torsion1", ["torsion", "torsion1"]),
        ("torsion_trivial", ["torsion", "trivial", "--kmax", "6"]),
        ("torsion_order2", ["torsion", "order2"]),
        ("deform_order2", ["deform", "order2"]),
        ("deform_order2_weights", ["deform", "order2", "--weights", "2"]),
        ("linearize_augmented", ["linearize", "augmented"]),
        ("spectrum_dstar_s2", ["spectrum", "dstar_s2"]),
        ("spectrum_handle", ["spectrum", "handle"]),
        ("certify_spinal_k3", ["certify", "spinal_k3", "--m", "1", "--period", "2"]),
    ],
)
def test_golden_output(run, golden, golden_name, argv):
    status, out, _ = run(*argv)
    assert status == 0
    assert out == golden(golden_name)


@pytest.mark.parametrize("threads", ["1", "4", "8"])
def test_output_does_not_depend_on_threads(run, golden, threads):
    status, out, _ = run("torsion", "order2", "--threads", threads)
    assert status == 0
    assert out == golden("torsion_order2")
    _, out, _ = run("check", "torsion1", "--threads", threads)
    assert out == golden("check_torsion1")


def test_deformed_model_parses(run, tmp_path):
    _, out, _ = run("deform", "order2")
    path = tmp_path / "deformed.model"
    path.write_text(out, encoding="utf-8")
    status, out, _ = run("check", str(path))
    assert status == 0
    assert out.startswith("BL_∞ axiom verified up to truncation to order 4")


def test_axiom_failure(run, broken):
    status, out, _ = run("check", broken, "--trunc-letters", "1")
    assert status == 1
    lines = out.splitlines()
    assert lines[0].startswith("BL_∞ axiom fails on")
    assert lines[1] == "  p̂²(s) = 2 t"


def test_homology_of_broken_model(run, broken):
    status, out, _ = run("homology", broken, "--trunc-letters", "1")
    assert status == 1
    assert out.startswith("BL_∞ axiom fails: p̂² does not vanish on 's'")


def test_homology(run):
    status, out, _ = run("homology", "torsion1", "--level", "2")
    assert status == 0
    assert out.splitlines()[-1] == "unit class vanishes; witness: a⊙b"


def test_missing_augmentation(run):
    status, out, _ = run("linearize", "torsion1")
    assert status == 1
    assert out.startswith("no augmentation: no augmentation with values in")


def test_vdim(run):
    status, out, _ = run(
        "vdim", "spinal_k3", "--positive", "g_hat", "--negative", "g_hat"
    )
    assert status == 0
    assert out.splitlines() == [
        "vdim = -1",
        "note: trivial cylinder over g_hat, exempt from the dimension argument",
    ]
    status, out, _ = run("vdim", "spinal_k3", "--positive", "g_hat", "g_check1")
    assert out == "vdim = -12"


def test_parse_errors_exit_with_input_status(run, tmp_path):
    path = tmp_path / "bad.model"
    path.write_text("[generators]\na z2=1\n\n[operators]\na z -> 1\n", encoding="utf-8")
    status, out, err = run("check", str(path))
    assert status == 2
    assert not out
    assert f"{path}:5:3: error[unknown-generator]" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "no-such-model"],
        ["spectrum", "torsion1"],
        ["vdim", "handle", "--positive", "nothing"],
        ["torsion", "torsion1", "--novikov-order", "-1"],
    ],
)
def test_bad_input(run, argv):
    status, out, err = run(*argv)
    assert status == 2
    assert err.startswith("error: ")


def test_usage_errors():
    with pytest.raises(SystemExit) as excinfo:
        main(["torsion"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["torsion", "torsion1", "--threads", "0"])
    assert excinfo.value.code == 2
