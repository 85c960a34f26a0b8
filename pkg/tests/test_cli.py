import math
import subprocess
import sys

import pytest

from optodiscrim import cli
from optodiscrim.fock import DeviceSpec

PI4 = repr(math.pi / 4)
SMALL_GENERAL = ["general", "--phases", f"{PI4},-{PI4}", "--p-list", "0.1,0.4,0.7", "--max-cutoff", "16", "--max-gap", "0"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return cli.read_csv(text)


# beamsplitter


def test_beamsplitter_default_grid(capsys):
    code, out, _ = run(capsys, "beamsplitter", "--delta", PI4)
    assert code == 0
    meta, rows = rows_of(out)
    assert meta["command"] == "beamsplitter"
    assert meta["tool"].startswith("optodiscrim")
    assert len(rows) == 49
    ns = [float(r["mean_photons"]) for r in rows]
    assert all(b <= a for a, b in zip(ns, ns[1:]))
    q01 = [r for r in rows if abs(float(r["p_error"]) - 0.1) < 1e-12]
    assert len(q01) == 1
    assert float(q01[0]["mean_photons"]) == pytest.approx(0.7029437251522861, abs=1e-12)
    assert q01[0]["strategy"] == "analytic-beamsplitter"
    assert q01[0]["state_descriptor"].startswith("noon(n=3;")


def test_beamsplitter_delta_frac_pi_matches_radians(capsys):
    _, a, _ = run(capsys, "beamsplitter", "--delta-frac-pi", "0.25", "--q-list", "0.1,0.3")
    _, b, _ = run(capsys, "beamsplitter", "--delta", PI4, "--q-list", "0.1,0.3")
    assert rows_of(a)[1] == rows_of(b)[1]


def test_energy_column_is_half_plus_photons(capsys):
    _, out, _ = run(capsys, "beamsplitter", "--delta", "1.0", "--q-list", "0.05,0.2,0.5")
    for r in rows_of(out)[1]:
        assert float(r["energy"]) == float(r["mean_photons"]) + 0.5


# coherent and compare


def test_coherent_row(capsys):
    code, out, _ = run(capsys, "coherent", "--delta", PI4, "--q-list", "0.1")
    assert code == 0
    (row,) = rows_of(out)[1]
    assert float(row["eta"]) == pytest.approx(2.8037085013495417, rel=1e-13)
    assert row["strategy"] == "coherent-homodyne"


def test_coherent_from_phases_uses_best_mode(capsys):
    code, out, _ = run(capsys, "coherent", "--phases", "0.2,-1.4,0.9", "--q-list", "0.2")
    assert code == 0
    (row,) = rows_of(out)[1]
    assert "mode=1" in row["state_descriptor"]


def test_compare_values(capsys):
    code, out, _ = run(capsys, "compare", "--delta", PI4, "--q-list", "0.05,0.1,0.2,0.3")
    assert code == 0
    rows = rows_of(out)[1]
    ratios = [float(r["advantage_ratio"]) for r in rows]
    assert ratios == pytest.approx([4.658979011722334, 3.9885248292701463, 3.440356853965393, 3.1997688565852673], rel=1e-12)
    assert rows[1]["n_star"] == "3"


# certificates: every row can be recomputed from its descriptor alone


def _check_certificates(text, dev):
    rows = rows_of(text)[1]
    assert rows
    for r in rows:
        pe, n = cli.evaluate_descriptor(r["state_descriptor"], dev)
        assert abs(pe - float(r["p_error"])) <= 1e-10
        assert abs(n - float(r["mean_photons"])) <= 1e-10


def test_certificates_beamsplitter(capsys):
    _, out, _ = run(capsys, "beamsplitter", "--delta", "2.2")
    _check_certificates(out, DeviceSpec.beamsplitter(2.2))


def test_certificates_coherent(capsys):
    _, out, _ = run(capsys, "coherent", "--phases", "0.3,-2.0")
    _check_certificates(out, DeviceSpec((0.3, -2.0)))


def test_certificates_general(capsys):
    code, out, _ = run(capsys, *SMALL_GENERAL)
    assert code == 0
    _check_certificates(out, DeviceSpec.beamsplitter(math.pi / 4))


def test_descriptor_rejects_garbage():
    with pytest.raises(ValueError):
        cli.evaluate_descriptor("ket(0)", DeviceSpec((0.3,)))


# general


def test_general_meta_and_columns(capsys):
    code, out, _ = run(capsys, *SMALL_GENERAL)
    meta, rows = rows_of(out)
    assert code == 0
    assert meta["cutoff_stable"] == "true"
    assert int(meta["final_cutoff"]) <= 16
    assert {"p", "converged", "cutoff", "iterations"} <= set(rows[0])
    assert all(r["converged"] == "true" for r in rows)
    pes = [float(r["p_error"]) for r in rows]
    assert pes == sorted(pes)


def test_general_empty_p_list_is_header_only(capsys):
    code, out, _ = run(capsys, "general", "--phases", "0.5", "--p-list", "")
    assert code == 0
    meta, rows = rows_of(out)
    assert rows == []
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert body == ["p_error,mean_photons,energy,strategy,state_descriptor,p,converged,cutoff,iterations"]


def test_general_nonconvergence_exit_code(capsys):
    code, out, err = run(capsys, "general", "--phases", "0.8,-0.8", "--p-list", "0.3", "--max-iters", "3", "--max-gap", "0")
    assert code == 3
    assert "did not converge" in err
    assert rows_of(out)[1][0]["converged"] == "false"


def test_output_to_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "out.csv"
    assert cli.main(["beamsplitter", "--delta", "0.9", "--output", str(path)]) == 0
    assert capsys.readouterr().out == ""
    _, out, _ = run(capsys, "beamsplitter", "--delta", "0.9")
    assert path.read_text() == out


# determinism


@pytest.mark.parametrize(
    "argv",
    [
        ["beamsplitter", "--delta", "0.7"],
        ["coherent", "--phases", "0.4,1.9"],
        ["compare", "--delta", "0.3", "--q-list", "0.1,0.2"],
        SMALL_GENERAL + ["--seed", "5"],
    ],
)
def test_identical_flags_give_identical_bytes(capsys, argv):
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


# usage errors


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["beamsplitter", "--delta", "0"], "--delta"),
        (["beamsplitter", "--delta-frac-pi", "2"], "--delta-frac-pi"),
        (["beamsplitter", "--delta", "1", "--q-list", "0.6"], "--q-list"),
        (["beamsplitter", "--delta", "1", "--points", "0"], "--points"),
        (["general", "--phases", "0,0"], "--phases"),
        (["general", "--phases", "0.3", "--p-list", "1.0"], "--p-list"),
        (["general", "--phases", "0.3", "--cutoff", "0"], "--cutoff"),
        (["general", "--phases", "0.3", "--max-gap", "-1"], "--max-gap"),
        (["coherent", "--delta", "1", "--q-list", "0.5"], "--q-list"),
        (["compare", "--delta", "1", "--q", "0.7"], "--q"),
    ],
)
def test_usage_errors_name_the_flag(capsys, argv, flag):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert flag in err


def test_argparse_errors_exit_2(capsys):
    for argv in (["verify", "nonsense"], ["beamsplitter"], ["general", "--phases", "a,b"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


# verify


def test_verify_single_suite(capsys):
    code, out, _ = run(capsys, "verify", "pairs")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("checks passed")
    assert "FAIL" not in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "optodiscrim", "compare", "--delta", "0.5"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1].startswith("0.5,0.10000000000000001,")
