import csv
import io
import math

import pytest

from grouptest.analytics import BETA_STAR, E_LN2
from grouptest.cli import main

FIVE_ITEM = "5 3\n00110\n10100\n01001\ny 011\nK 1 2\n"


def _rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@pytest.fixture
def instance_file(tmp_path):
    def write(text, name="inst.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_simulate_header_and_rows(tmp_path):
    out = tmp_path / "sim.csv"
    rc = main(["simulate", "--N", "40", "--K", "3", "--Tmin", "10", "--Tmax", "20", "--Tstep", "10",
               "--trials", "5", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.splitlines()[0] == "T,algorithm,trials,successes,success_rate,stderr,budget_exhausted"
    rows = _rows(text)
    assert len(rows) == 2 * 4
    assert "\r" not in text


def test_simulate_no_defectives_all_success(capsys):
    assert main(["simulate", "--N", "20", "--K", "0", "--Tmin", "3", "--Tmax", "3",
                 "--trials", "1"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert {float(r["success_rate"]) for r in rows} == {1.0}


def test_simulate_replay_is_byte_identical(tmp_path):
    args = ["simulate", "--N", "50", "--K", "4", "--Tmin", "10", "--Tmax", "30", "--Tstep", "10",
            "--trials", "20", "--seed", "3"]
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert main(args + ["--out", str(c), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


@pytest.mark.parametrize("bad", [
    ["simulate", "--trials", "0"],
    ["simulate", "--Tmin", "20", "--Tmax", "10"],
    ["simulate", "--algorithms", "COMP,LP"],
    ["simulate", "--workers", "0"],
    ["simulate", "--node-limit", "0"],
    ["simulate", "--N", "abc"],
    ["bounds", "--p", "1.5"],
    ["rates", "--beta-min", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_one(bad, capsys):
    assert main(bad) == 1
    assert "error" in capsys.readouterr().err


def test_bounds_csv(capsys):
    assert main(["bounds", "--N", "500", "--K", "10", "--Tmin", "0", "--Tmax", "200",
                 "--Tstep", "50"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert list(rows[0]) == ["T", "info_bound", "comp_lower", "dd_exact", "dd_lower", "sss_lower",
                             "sss_upper"]
    assert float(rows[0]["dd_exact"]) == 0.0
    assert float(rows[0]["info_bound"]) == pytest.approx(1 / math.comb(500, 10), rel=1e-5)
    for r in rows:
        for key, val in r.items():
            if key != "T":
                assert 0.0 <= float(val) <= 1.0


def test_rates_csv(capsys):
    assert main(["rates", "--beta-min", "0.25", "--beta-max", "1", "--step", "0.25"]) == 0
    text = capsys.readouterr().out
    rows = {float(r["beta"]): r for r in _rows(text)}
    assert sorted(rows) == [0.25, 0.5, 0.75, 1.0]
    assert float(rows[1.0]["comp_lower"]) == pytest.approx(0.5307, abs=5e-5)
    assert float(rows[1.0]["dd_lower"]) == pytest.approx(0.5307, abs=5e-5)
    assert float(rows[1.0]["sss_upper"]) == 1.0
    assert float(rows[0.5]["dd_lower"]) == pytest.approx(1 / E_LN2, rel=1e-5)
    assert float(rows[0.5]["sss_upper"]) == pytest.approx(1 / E_LN2, rel=1e-5)
    footer = text.strip().splitlines()[-1]
    assert footer.startswith("# beta_star=")
    assert float(footer.split("=")[1]) == pytest.approx(BETA_STAR, abs=1e-5)


def test_decode_five_item(instance_file, capsys):
    path = instance_file(FIVE_ITEM)
    assert main(["decode", path, "--algorithm", "SCOMP"]) == 0
    out = capsys.readouterr().out
    assert "estimate: 1 2\n" in out
    assert "success: yes" in out
    assert main(["decode", path, "--algorithm", "comp"]) == 0
    out = capsys.readouterr().out
    assert "estimate: 1 2 5\n" in out
    assert "success: no" in out


def test_decode_all_negative(instance_file, capsys):
    path = instance_file("3 2\n110\n011\ny 00\n")
    assert main(["decode", path, "--algorithm", "COMP"]) == 0
    out = capsys.readouterr().out
    assert "estimate: \n" in out
    assert "success" not in out


def test_decode_budget_exhausted_exit_two(instance_file, capsys):
    path = instance_file(FIVE_ITEM)
    assert main(["decode", path, "--algorithm", "SSS", "--node-limit", "1",
                 "--no-dd-preprocessing"]) == 2
    assert "budget" in capsys.readouterr().err


def test_decode_parse_failure(instance_file, capsys):
    assert main(["decode", instance_file("3 2\n11\n001\n")]) == 1
    assert main(["decode", "/nonexistent/instance.txt"]) == 1


def test_check_design(instance_file, capsys):
    ident = "5 5\n" + "".join("".join("1" if i == j else "0" for j in range(5)) + "\n"
                               for i in range(5))
    assert main(["check-design", instance_file(ident), "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "disjunct: yes" in out and "separable: yes" in out
    assert main(["check-design", instance_file("3 2\n110\n111\n"), "--k", "1"]) == 0
    assert "separable: no" in capsys.readouterr().out
    assert main(["check-design", instance_file("2 3\n00\n00\n00\n"), "--k", "1"]) == 0
    assert "disjunct: no" in capsys.readouterr().out


def test_check_design_too_large(instance_file, capsys):
    ident = "30 1\n" + "0" * 30 + "\n"
    assert main(["check-design", instance_file(ident), "--k", "10", "--cap", "100"]) == 2
