import json
import subprocess
import sys

import pytest

from fairxp import bundle
from fairxp.cli import main

M = "bundle:credit_model.json"
BK = "bundle:k1.bk"
MAP = "bundle:credit.map"
PART = "bundle:credit.partition"
DATA = "bundle:credit_data.csv"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_explain_hawa_trace(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "explain", M, "--individual", bundle.HAWA, "--trace", "--report", str(report))
    assert code == 0
    assert "explanation: A & B & !D & P" in out
    doc = json.loads(report.read_text())
    steps = doc["report"]["outputs"]["trace"]
    assert [s["flip_found"] for s in steps] == [True, False, False, False, False, True, False, True, True, False]
    assert doc["report"]["inputs"]["model"]["path"] == M
    assert "seconds" in doc["timing"]


def test_explain_refuses_unreal_under_bk(capsys):
    code, _, err = run(capsys, "explain", M, "--individual", bundle.HAWA, "--bk", BK)
    assert code == 3
    assert "not a real individual" in err


def test_explain_with_order_and_all(capsys):
    code, out, _ = run(
        capsys, "explain", M, "--dataset", DATA, "--row", "0", "--order", "G,J,H,B,C,A,S,D,P,M", "--all"
    )
    assert code == 0
    assert "explanation: A & !S & !D & P & M" in out
    assert "  - A & !S & !D & P & M" in out


def test_explain_constant_model(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "truth-table", "features": ["A", "B"], "table": "1111"}))
    code, out, _ = run(capsys, "explain", str(path), "--individual", "A=0,B=1")
    assert code == 0
    assert "explanation: TRUE" in out


def test_audit_yahya(capsys, tmp_path):
    report = tmp_path / "a.json"
    code, out, _ = run(
        capsys, "audit", M, "--individual", bundle.YAHYA, "--protected", "G", "--bk", BK,
        "--mapping", MAP, "--partition", PART, "--report", str(report),
    )
    assert code == 0
    assert "explicit_bias: false" in out
    assert "bk_aware_bias: true" in out
    assert "fair: true" in out
    assert "criterion:   A & !S & !D & P & M" in out
    assert "counterpart: A & !G & !S & !D & !M" in out
    body = json.loads(report.read_text())["report"]
    entry = body["outputs"]["individuals"][0]
    assert entry["bias"]["bk_explanations"] == [{"literals": "A & !S & !D & P & M", "class": "proxy-factor", "nu": 1}]
    assert body["outputs"]["summary"]["process_bias_witness"] is not None


def test_audit_dataset_skips_unreal(capsys, tmp_path):
    data = tmp_path / "d.csv"
    text = bundle.read_text(DATA).splitlines()
    hawa_row = ",".join(v.split("=")[1] for v in bundle.HAWA.split(","))
    data.write_text("\n".join(text[:4] + [hawa_row]) + "\n")
    code, out, _ = run(capsys, "audit", M, "--dataset", str(data), "--protected", "G", "--bk", BK)
    assert code == 0
    assert "skipped_unreal: 1" in out
    assert "individuals: 4" in out


def test_audit_single_unreal_exit_3(capsys):
    code, _, _ = run(capsys, "audit", M, "--individual", bundle.HAWA, "--protected", "G", "--bk", BK)
    assert code == 3


def test_mine_bk(capsys, tmp_path):
    code, out, _ = run(capsys, "mine-bk", DATA)
    assert code == 0
    assert "forbid !G & P & M" in out.splitlines()
    assert "# provenance: learned" in out
    target = tmp_path / "k.bk"
    assert run(capsys, "mine-bk", DATA, "-o", str(target))[0] == 0
    assert target.read_text() == out
    code, out, _ = run(capsys, "find-proxies", str(target), "--protected", "G", "--context-arity", "1")
    assert code == 0
    assert "q=M ctx=(P=1) q:=1 => p:=1  [G]" in out


def test_find_proxies(capsys):
    code, out, _ = run(capsys, "find-proxies", BK, "--protected", "G", "--context-arity", "1")
    assert code == 0
    assert "q=P ctx=(M=1) q:=1 => p:=1  [G]" in out
    code, out, _ = run(capsys, "find-proxies", BK, "--protected", "G", "--context-arity", "0")
    assert code == 0 and out == ""
    code, out, _ = run(capsys, "find-proxies", BK, "--protected", "A", "--model", M)
    assert code == 0 and out == ""


def test_check_mapping(capsys, tmp_path):
    code, out, _ = run(capsys, "check-mapping", MAP, "--partition", PART, "--bk", BK, "--model", M)
    assert code == 0
    assert "consistent: true" in out
    bad = tmp_path / "bad.map"
    bad.write_text("mapping G: 1 -> 0\n{G} => {!G}\n{G} => {!G, M}\n")
    code, out, _ = run(capsys, "check-mapping", str(bad), "--partition", PART, "--model", M)
    assert code == 0
    assert "injective: false" in out
    assert "ambiguous source: {G}" in out
    assert "uncovered real individuals: 0" in out


def test_verify_bundle(capsys):
    code, out, _ = run(capsys, "verify-bundle")
    assert code == 0
    assert out.count("PASS") == 7 and "FAIL" not in out


@pytest.mark.parametrize(
    "argv",
    [
        ["explain", M, "--individual", "A=1"],
        ["explain", M, "--individual", bundle.HAWA, "--order", "A,B"],
        ["explain", "bundle:missing.json", "--individual", bundle.HAWA],
        ["explain", M],
        ["audit", M, "--individual", bundle.YAHYA, "--protected", "Z"],
        ["audit", M, "--individual", bundle.YAHYA, "--protected", "G", "--mapping", MAP],
        ["mine-bk", DATA, "--max-arity", "11"],
        ["frobnicate"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_cap_exit_4(capsys, tmp_path):
    names = [f"X{i}" for i in range(25)]
    path = tmp_path / "wide.json"
    path.write_text(json.dumps({"kind": "linear-threshold", "features": names,
                                "weights": ["1"] * 25, "bias": "-0.5"}))
    code, _, _ = run(capsys, "explain", str(path), "--individual", ",".join(f"{n}=1" for n in names))
    assert code == 4


def test_report_bodies_are_deterministic(capsys, tmp_path):
    bodies = []
    for i in range(2):
        report = tmp_path / f"r{i}.json"
        run(capsys, "audit", M, "--individual", bundle.YAHYA, "--protected", "G", "--bk", BK,
            "--mapping", MAP, "--partition", PART, "--report", str(report))
        bodies.append(json.dumps(json.loads(report.read_text())["report"], sort_keys=True))
    assert bodies[0] == bodies[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fairxp.cli", "verify-bundle"], capture_output=True, text=True)
    assert proc.returncode == 0
