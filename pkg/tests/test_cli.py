import csv
import io
import json
import re
import subprocess
import sys

import pytest

from ibd.cases import REGISTRY, CaseRecord, classify, run_case, verify_all
from ibd.cli import COLUMNS, fmt_real, fmt_value, main

NUMBER = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# number formatting -------------------------------------------------------


def test_seventeen_significant_digits():
    assert fmt_real(0.1) == "1.0000000000000001e-01"
    assert fmt_real(-2.5e-300) == "-2.5000000000000000e-300"
    assert fmt_real(float("inf")) == "inf"
    assert float(fmt_real(1 / 3)) == 1 / 3
    assert fmt_value(1 - 2j) == "1.0000000000000000e+00-2.0000000000000000e+00j"


# status rules ------------------------------------------------------------


def test_classify():
    assert classify(1e-9, 1.0, 1e-8, False) == "pass"
    assert classify(1.0, 1e-9, 1e-8, False) == "pass"
    assert classify(1.0, 1.0, 1e-8, False) == "fail"
    assert classify(1e-9, 1.0, 1e-8, True) == "flagged"
    assert classify(1.0, 1.0, 1e-8, True) == "fail"


def test_record_invariants():
    for rec in verify_all("s*")[0]:
        assert isinstance(rec, CaseRecord)
        if rec.status == "pass":
            assert rec.abs_err <= rec.tol or rec.rel_err <= rec.tol
        if rec.status == "flagged":
            assert rec.note


# list --------------------------------------------------------------------


def test_list_shows_every_case_with_an_anchor(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    lines = out.splitlines()
    assert [line.split("\t")[0] for line in lines] == sorted(REGISTRY)
    assert all("anchor: " in line and line.split("anchor: ")[1] for line in lines)


# run ---------------------------------------------------------------------


def test_run_sinc_csv(capsys):
    code, out, _ = run(capsys, "run", "sinc", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == ",".join(COLUMNS)
    (row,) = rows(out)
    assert row["status"] == "pass"
    for col in ("method_value", "oracle_value", "abs_err", "rel_err", "tol"):
        assert NUMBER.match(row[col]), row[col]
    assert float(row["method_value"]) == pytest.approx(1.5707963267948966, rel=1e-16)


def test_run_ramanujan_exact():
    rec = run_case("ramanujan-exact", {"n": "12"})
    assert rec.status == "pass"
    assert rec.method_value == rec.oracle_value == 221


def test_run_kurokawa_s2_is_flagged(capsys):
    code, out, _ = run(capsys, "run", "kurokawa", "--param", "s=2", "--param", "q=0.5", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert row["status"] == "flagged"
    assert "Euler-accelerated rhs" in row["note"]
    assert float(row["abs_err"]) <= 1e-6


def test_run_kurokawa_half_passes():
    rec = run_case("kurokawa", {"s": "0.5", "q": "0.5"})
    assert rec.status == "pass"


def test_heaviside_midpoint_changes_the_convention(capsys):
    _, plain, _ = run(capsys, "run", "ramanujan", "--param", "p=1/2", "--param", "n=1", "--format", "json")
    _, mid, _ = run(capsys, "run", "ramanujan", "--param", "p=1/2", "--param", "n=1", "--format", "json",
                    "--heaviside-midpoint")
    assert json.loads(plain)[0]["note"] != json.loads(mid)[0]["note"]
    assert float(json.loads(mid)[0]["method_value"]) == pytest.approx(0.19634954084936207, rel=1e-14)


def test_markdown_is_a_table(capsys):
    code, out, _ = run(capsys, "run", "series-exp")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("| case_id |") and lines[1].startswith("|---")
    assert len(lines) == 3


# verify-all --------------------------------------------------------------


def test_simplex_suite(capsys):
    code, out, _ = run(capsys, "verify-all", "--filter", "simplex-*", "--format", "csv")
    assert code == 0
    recs = rows(out)
    assert len(recs) == 5
    assert [r["case_id"] for r in recs] == sorted(r["case_id"] for r in recs)
    assert all(r["status"] == "pass" for r in recs)


def test_empty_filter(capsys):
    code, out, _ = run(capsys, "verify-all", "--filter", "nonexistent-*", "--format", "json")
    assert code == 0
    assert json.loads(out) == []


def test_infeasible_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify-all", "--filter", "s*", "--tol", "1e-30", "--format", "csv")
    assert code == 1
    assert any(r["status"] == "fail" for r in rows(out))


def test_reports_are_deterministic(capsys):
    def strip(text):
        return [{k: v for k, v in r.items() if k != "seconds"} for r in rows(text)]

    argv = ("verify-all", "--filter", "simplex-*", "--seed", "7", "--format", "csv")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert strip(a) == strip(b)


def test_seed_reaches_monte_carlo(capsys):
    _, a, _ = run(capsys, "run", "simplex-laplace", "--seed", "1", "--format", "csv")
    _, b, _ = run(capsys, "run", "simplex-laplace", "--seed", "2", "--format", "csv")
    # the closed form is the method; the Monte Carlo estimate is the oracle
    assert rows(a)[0]["method_value"] == rows(b)[0]["method_value"]
    assert rows(a)[0]["oracle_value"] != rows(b)[0]["oracle_value"]


# configuration -----------------------------------------------------------


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "ibd.conf"
    cfg.write_text("# defaults\nformat = csv\ntol = 1e-30\nparam.order = 40\n")
    code, out, _ = run(capsys, "run", "series-exp", "--config", str(cfg))
    assert code == 1
    assert rows(out)[0]["params"].startswith("order=40")
    code, out, _ = run(capsys, "run", "series-exp", "--config", str(cfg), "--tol", "1e-10", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["status"] == "pass"


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("no equals sign\n")
    assert run(capsys, "run", "sinc", "--config", str(cfg))[0] == 2
    assert run(capsys, "run", "sinc", "--config", str(tmp_path / "missing.conf"))[0] == 2


# usage errors ------------------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["run", "no-such-case"],
    ["run", "sinc", "--param", "bogus=1"],
    ["run", "ramanujan", "--param", "n=abc"],
    ["run", "sinc", "--param", "novalue"],
    ["verify-all", "--param", "n=1"],
    ["frobnicate"],
    ["run", "sinc", "--format", "xml"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ibd.cli", "run", "sinc", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert rows(proc.stdout)[0]["status"] == "pass"
