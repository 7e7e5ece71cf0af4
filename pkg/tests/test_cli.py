import csv
import json

import pytest

from soficlab.cli import main
from soficlab.perms import read_perm


def test_build_writes_artifacts(tmp_path):
    out = tmp_path / "build7"
    assert main(["build", "--p", "7", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["format"] == "soficlab-report"
    assert all(c["pass"] for c in report["checks"])
    spec = json.loads((out / "homspecs.json").read_text())
    assert spec["p"] == 7 and spec["r_p"] == 11
    perm = read_perm(out / "sigma_t.sprm")
    assert perm.size == 367_416
    sidecar = json.loads((out / "sigma_t.sprm.json").read_text())
    assert sidecar["p"] == 7


def test_build_rejects_bad_p(tmp_path, capsys):
    assert main(["build", "--p", "4", "--out", str(tmp_path / "x")]) == 1
    err = capsys.readouterr().err
    assert "prime" in err


def test_build_rejects_small_m(tmp_path, capsys):
    assert main(["build", "--p", "7", "--m", "4", "--out", str(tmp_path / "x")]) == 1
    assert "m = 4 < 5" in capsys.readouterr().err


def test_verify_covers(tmp_path):
    out = tmp_path / "covers"
    assert main(["verify", "covers", "--seed", "42", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert all(c["pass"] for c in report["checks"])


def test_verify_induction():
    assert main(["verify", "induction", "--seed", "5"]) == 0


def test_measure_boundary_csv(tmp_path):
    out = tmp_path / "boundary.csv"
    assert main(["measure", "boundary", "--primes", "7,13", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert {r["p"] for r in rows} == {"7", "13"}
    decorated = [r for r in rows if r["family"] == "decorated"]
    assert len(decorated) == 2


def test_measure_defect_csv(tmp_path):
    out = tmp_path / "defect.csv"
    assert main(["measure", "defect", "--primes", "7", "--samples", "2000",
                 "--seed", "17", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert [r["mode"] for r in rows] == ["exact", "sampled"]
    assert rows[0]["value"] == "1075/5103"  # exact rational survives the CSV
    assert rows[0]["radius"] == "0.0"
    assert rows[1]["seed"] == "24"  # 17 + p


def test_measure_spectra_csv(tmp_path):
    out = tmp_path / "spectra.csv"
    assert main(["measure", "spectra", "--primes", "7", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert list(rows[0]) == ["p", "family", "N", "degree", "lambda2", "gap",
                             "residual", "iterations", "seed"]
    assert float(rows[0]["gap"]) > 0.05


def test_measure_defect_exact_refusal(tmp_path, capsys):
    out = tmp_path / "defect.csv"
    code = main(["measure", "defect", "--primes", "7,13", "--mode", "exact",
                 "--out", str(out)])
    assert code == 3
    assert "refused" in capsys.readouterr().err


def test_measure_rejects_bad_primes(capsys):
    assert main(["measure", "boundary", "--primes", "7,11"]) == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "no-such-suite"])
    assert exc.value.code == 2


def test_partition_command(tmp_path):
    out = tmp_path / "part"
    assert main(["partition", "--p", "7", "--plant", "g-factor",
                 "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["checks"][0]["name"] == "recover-g-factor"
    assert report["checks"][0]["pass"]


def test_partition_rejects_unknown_candidate(capsys):
    assert main(["partition", "--p", "7", "--plant", "nonsense"]) == 2


def test_induce_command():
    assert main(["induce", "--seed", "5"]) == 0
