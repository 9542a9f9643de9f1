import json
import subprocess
import sys

import pytest

from pdslab.cli import run


def quiet(argv, capsys):
    code, report = run(argv)
    capsys.readouterr()
    return code, report


@pytest.mark.parametrize(
    "argv, code, params",
    [
        (["verify-pds", "--n", "1", "--e", "0", "--a", "0", "--level", "0"], 0, (16, 6, 2, 2)),
        (["verify-pds", "--n", "2", "--e", "01", "--a", "0w", "--level", "1"], 0, (256, 68, 12, 20)),
    ],
)
def test_verify_pds(argv, code, params, capsys):
    got, report = quiet(argv, capsys)
    assert got == code
    f = report["results"]["found"]
    assert (f["v"], f["k"], f["lambda"], f["mu"]) == params
    assert report["schema"] == "pdslab-report/1"


def test_verify_pds_degenerate(capsys):
    code, report = quiet(["verify-pds", "--n", "1", "--e", "0", "--a", "w", "--level", "0"], capsys)
    assert code == 0
    assert report["results"]["found"]["degenerate"]


def test_malformed_input_exit_2(capsys):
    code, report = quiet(["verify-pds", "--n", "2", "--e", "0x", "--a", "00", "--level", "0"], capsys)
    assert code == 2 and "error" in report


@pytest.mark.parametrize("e, a, variant, fusions", [("00", "00", 4, 15), ("11", "0w", 3, 5)])
def test_scheme_amorphic(e, a, variant, fusions, capsys):
    code, report = quiet(["scheme", "--n", "2", "--e", e, "--a", a, "--variant", str(variant), "--amorphic"], capsys)
    assert code == 0
    fus = report["results"]["amorphy"]["fusions"]
    assert len(fus) == fusions and all(f["scheme"] for f in fus)


def test_scheme_empty_class_exit_2(capsys):
    code, _ = quiet(["scheme", "--n", "1", "--e", "0", "--a", "w", "--variant", "4"], capsys)
    assert code == 2


def test_regular_family_a(capsys):
    argv = ["regular", "--family", "A", "--n", "2", "--e", "11", "--a", "00", "--v", "11", "--b", "10"]
    code, report = quiet(argv, capsys)
    assert code == 0
    assert all(report["verdicts"].values())
    assert report["results"]["invariants"]["class"] == 2


def test_regular_family_d_reports_class_and_exponent(capsys):
    argv = ["regular", "--family", "D", "--epsilon", "1", "--tail-n", "0", "--pullback", "none"]
    code, report = quiet(argv, capsys)
    inv = report["results"]["invariants"]
    assert (inv["class"], inv["exponent"]) == (6, 16)
    # the only disagreement with the closed forms is the Frattini order
    assert report["results"]["mismatches"] == ["frattini order: predicted 8192, found 4096"]
    assert code == 1


def test_custom_not_invariant_names_condition_b(capsys):
    cfg = {"e": "11", "a": "00", "tau": {"kind": "tau", "v": "11"}, "K_gens": ["1000"], "h": "w000"}
    code, report = quiet(["regular", "--custom", json.dumps(cfg)], capsys)
    assert code == 1
    assert report["results"]["failed_conditions"] == ["b"]


@pytest.mark.parametrize(
    "e, a, tau, how",
    [
        ("11", "00", {"kind": "tau", "v": "11"}, "order2_pair"),
        ("01", "w0", {"kind": "rho", "a": "w0"}, "order4_pair"),
    ],
)
def test_search(e, a, tau, how, capsys):
    code, report = quiet(["regular", "--search", "--e", e, "--a", a, "--tau", json.dumps(tau)], capsys)
    assert code == 0
    assert report["results"]["search"] == how


def test_search_form_mismatch_names_condition_a(capsys):
    tau = json.dumps({"kind": "rho", "a": "w0"})
    code, report = quiet(["regular", "--search", "--e", "01", "--a", "00", "--tau", tau], capsys)
    assert code == 1
    assert report["results"]["failed_conditions"] == ["a"]


def test_reports_are_deterministic(tmp_path, capsys):
    argv = ["scheme", "--n", "2", "--e", "01", "--a", "w0", "--variant", "3", "--amorphic"]
    paths = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        assert quiet(["--no-timing", "--out", str(p)] + argv, capsys)[0] == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert "timing" not in json.loads(paths[0].read_text())


def test_threads_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("PDSLAB_THREADS", "nope")
    code, _ = quiet(["verify-pds", "--n", "1", "--e", "0", "--a", "0", "--level", "1"], capsys)
    assert code == 2
    monkeypatch.setenv("PDSLAB_THREADS", "2")
    code, _ = quiet(["verify-pds", "--n", "1", "--e", "0", "--a", "0", "--level", "1"], capsys)
    assert code == 0


def test_module_entry_point_exit_code():
    out = subprocess.run(
        [sys.executable, "-m", "pdslab.cli", "--no-timing", "scheme", "--n", "1", "--e", "0", "--a", "w"],
        capture_output=True, text=True,
    )
    assert out.returncode == 2
    assert json.loads(out.stdout)["ok"] is False
