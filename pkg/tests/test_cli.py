import io
import re

import pytest

from ramanujan_lab import harness
from ramanujan_lab.cli import fmt, main

SAMPLE = ["sample", "--family", "I", "--constraint", "connected", "--n", "60",
          "--d", "3", "--count", "20", "--seed", "42"]


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_fmt_six_significant():
    assert fmt(2.8284271247461903) == "2.82843"
    assert fmt(0.000123456789) == "0.000123457"
    assert fmt(True) == "1" and fmt(7) == "7" and fmt(None) == "-"


def test_sample_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(SAMPLE + ["--out", str(a)])[0] == 0
    assert run(SAMPLE + ["--out", str(b)])[0] == 0
    name = harness.cell_filename("CI", 60, 3)
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_sample_env_out(tmp_path, monkeypatch):
    monkeypatch.setenv(harness.ENV_OUT, str(tmp_path / "env"))
    assert run(SAMPLE)[0] == 0
    assert (tmp_path / "env" / harness.cell_filename("CI", 60, 3)).exists()


def test_analyze_and_plot(tmp_path):
    for n in ("40", "60", "80"):
        argv = list(SAMPLE)
        argv[argv.index("60")] = n
        argv[argv.index("20")] = "120"
        run(argv + ["--out", str(tmp_path)])
    code, text = run(["analyze", "--in", str(tmp_path), "--refs", "tw1,normal"])
    assert code == 0
    for section in ("chi-square", "z (mass", "correlation", "exponent fits", "percent Ramanujan"):
        assert section in text
    # no printed number carries more than six significant digits
    for tok in re.findall(r"-?\d+\.\d+(?:e-?\d+)?", text):
        mantissa = tok.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
        assert len(mantissa) <= 6
    code, text = run(["plot-data", "--figure", "mean_vs_N", "--in", str(tmp_path)])
    assert code == 0 and text.startswith("x,y,series")
    assert len(text.splitlines()) == 4


def test_analyze_empty(tmp_path):
    assert run(["analyze", "--in", str(tmp_path)])[0] == 1


def test_bad_refs(tmp_path):
    with pytest.raises(SystemExit):
        run(["analyze", "--in", str(tmp_path), "--refs", "tw3"])


def test_tw_table():
    code, text = run(["tw-table", "--step", "0.5"])
    lines = text.splitlines()
    assert code == 0 and lines[0] == "s,f1,F1,f2,F2,f4,F4"
    assert len(lines) == 1 + 29


def test_goe_validate():
    code, text = run(["goe-validate", "--n", "50", "--count", "1000", "--seed", "1"])
    assert code == 0
    assert text.splitlines()[0].startswith("N,count")


def test_invalid_sample_args(tmp_path):
    code, _ = run(["sample", "--family", "G", "--n", "10", "--d", "3", "--out", str(tmp_path)])
    assert code == 2
