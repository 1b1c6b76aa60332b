import json
import math
import subprocess
import sys

import pytest

from virasoro_transgression import cli


def run_cli(*args):
    return cli.main(list(args))


def load(path):
    return json.loads(path.read_text())


def test_verify_lemma_passes(tmp_path):
    report_path = tmp_path / "lemma.json"
    code = run_cli("verify", "lemma", "--seed", "1", "--no-timestamp",
                   "--report", str(report_path))
    assert code == 0
    report = load(report_path)
    assert report["summary"]["passed"]
    lemma = next(c for c in report["checks"] if c["name"] == "lemma/coboundary-identities")
    assert lemma["computed"] < 1e-9


def test_verify_whitney_passes(tmp_path):
    report_path = tmp_path / "whitney.json"
    code = run_cli("verify", "whitney", "--no-timestamp", "--report", str(report_path))
    assert code == 0
    report = load(report_path)
    solved = next(c for c in report["checks"] if c["name"] == "whitney/solved-lambda")
    assert abs(solved["computed"]) < 1e-12


def test_rough_resolution_reports_measured_values(tmp_path):
    report_path = tmp_path / "rough.json"
    code = run_cli("verify", "cocycle", "--quadrature-points", "64",
                   "--no-timestamp", "--report", str(report_path))
    report = load(report_path)
    trivial = [c for c in report["checks"] if "normalization" in c["name"]]
    assert trivial and all(c["passed"] for c in trivial)
    # every check carries its measured value, pass or fail
    assert all("computed" in c for c in report["checks"])
    assert code in (0, 1)
    if code == 1:
        assert any(not c["passed"] for c in report["checks"])


def test_report_schema(tmp_path):
    report_path = tmp_path / "schema.json"
    run_cli("verify", "whitney", "--no-timestamp", "--report", str(report_path))
    report = load(report_path)
    assert set(report) == {"config", "checks", "summary"}
    assert set(report["summary"]) == {"n_checks", "n_failed", "passed"}
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)
    for check in report["checks"]:
        assert set(check) == {
            "name", "description", "computed", "expected",
            "tolerance", "passed", "runtime_s",
        }


def test_timestamp_present_by_default(tmp_path):
    report_path = tmp_path / "ts.json"
    run_cli("verify", "whitney", "--report", str(report_path))
    assert "timestamp" in load(report_path)["summary"]


def test_central_charge_zero_scale(tmp_path):
    report_path = tmp_path / "cc0.json"
    code = run_cli("central-charge", "0", "--no-timestamp", "--report", str(report_path))
    assert code == 0
    check = load(report_path)["checks"][0]
    assert check["computed"] == 0.0
    assert check["expected"] == 0.0


def test_central_charge_unnormalized(tmp_path):
    report_path = tmp_path / "cc1.json"
    code = run_cli("central-charge", "1", "--no-timestamp", "--report", str(report_path))
    assert code == 0
    check = load(report_path)["checks"][0]
    assert check["computed"] == pytest.approx(-96.0 * math.pi**2, rel=1e-2)


def test_sweep_single_point_matches_central_charge(tmp_path):
    sweep_path = tmp_path / "sweep.json"
    cc_path = tmp_path / "cc.json"
    assert run_cli("sweep", "lambda", "--values=0.25", "--no-timestamp",
                   "--report", str(sweep_path)) == 0
    assert run_cli("central-charge", "0.25", "--no-timestamp",
                   "--report", str(cc_path)) == 0
    sweep_val = load(sweep_path)["checks"][0]["computed"]
    cc_val = load(cc_path)["checks"][0]["computed"]
    assert sweep_val == cc_val


def test_sweep_lambda_linear(tmp_path):
    report_path = tmp_path / "sweep_lin.json"
    code = run_cli("sweep", "lambda", "--values=-1,0,1", "--no-timestamp",
                   "--report", str(report_path))
    assert code == 0
    csv_text = (tmp_path / "sweep_lin.csv").read_text()
    rows = [line.split(",") for line in csv_text.strip().splitlines()[1:]]
    assert len(rows) == 3
    charges = {float(r[1]): float(r[2]) for r in rows}
    assert charges[1.0] == pytest.approx(-charges[-1.0], rel=1e-10)
    assert charges[0.0] == 0.0


def test_sweep_resolution_decreases(tmp_path):
    report_path = tmp_path / "sweep_res.json"
    code = run_cli("sweep", "resolution", "--values=16,32,64", "--no-timestamp",
                   "--report", str(report_path))
    assert code == 0
    report = load(report_path)
    defects = {
        c["name"]: c["computed"]
        for c in report["checks"]
        if c["name"].startswith("sweep/resolution=")
    }
    assert defects["sweep/resolution=16"] > defects["sweep/resolution=32"]
    assert defects["sweep/resolution=32"] > defects["sweep/resolution=64"]


def test_determinism_byte_identical(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    run_cli("verify", "cocycle", "--seed", "3", "--no-timestamp", "--report", str(p1))
    run_cli("verify", "cocycle", "--seed", "3", "--no-timestamp", "--report", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_unknown_suite_is_usage_error():
    assert run_cli("verify", "nonsense") == 2


def test_empty_sweep_is_usage_error(tmp_path):
    assert run_cli("sweep", "lambda", "--values=", "--report",
                   str(tmp_path / "x.json")) == 2


def test_unknown_tolerance_is_usage_error():
    assert run_cli("verify", "whitney", "--tolerance", "bogus=1") == 2


def test_malformed_tolerance_is_usage_error():
    assert run_cli("verify", "whitney", "--tolerance", "whitney_lambda") == 2


def test_bad_scale_is_usage_error():
    assert run_cli("central-charge", "abc") == 2


def test_tolerance_override_can_force_failure(tmp_path):
    report_path = tmp_path / "forced.json"
    code = run_cli("verify", "cocycle", "--no-timestamp",
                   "--tolerance", "variant_agreement=0",
                   "--report", str(report_path))
    assert code == 1
    report = load(report_path)
    failed = [c for c in report["checks"] if not c["passed"]]
    assert any(c["name"] == "cocycle/variant-agreement" for c in failed)


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "virasoro_transgression.cli", "verify", "whitney",
         "--no-timestamp"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["passed"]
