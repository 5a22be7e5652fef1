import json
import subprocess
import sys

import jsonschema
import pytest

from supercohom.cli import load_schema, main, parse_config, parse_range, sweep_triples
from supercohom.families import InapplicableParameters

SCHEMA = load_schema()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    docs = [json.loads(line) for line in out.splitlines() if line.strip()]
    for d in docs:
        jsonschema.validate(d, SCHEMA)
    return docs


def test_classify_super_resonant(capsys):
    code, out, _ = run(capsys, "classify", "--lambda", "-1/2", "--nu", "-1/2", "--mu", "1")
    assert code == 0
    (rec,) = records(out)
    assert {k: rec[k] for k in ("class", "k", "s", "t")} == {
        "class": "super_resonant", "k": "1", "s": 1, "t": 1}


@pytest.mark.parametrize("argv, tag", [
    (["--lambda", "1/3", "--nu", "0", "--mu", "4/3"], "weakly_resonant"),
    (["--lambda", "1/7", "--nu", "2/7", "--mu", "0"], "none"),
])
def test_classify_other(capsys, argv, tag):
    code, out, _ = run(capsys, "classify", *argv)
    assert code == 0 and records(out)[0]["class"] == tag


def test_dim_classical(capsys):
    code, out, _ = run(capsys, "dim", "--classical", "--lambda", "0", "--nu", "0", "--mu", "1")
    (rec,) = records(out)
    assert code == 0 and rec["dim"] == 3 and rec["mode"] == "classical"


def test_dim_relative(capsys):
    code, out, _ = run(capsys, "dim", "--relative", "--lambda", "0", "--nu", "0", "--mu", "1/2")
    assert code == 0 and records(out)[0]["dim"] == 0


def test_dim_strict_flags_unstable(capsys):
    # a ceiling at the starting order leaves no room for the stabilization check
    code, out, _ = run(capsys, "dim", "--lambda", "0", "--nu", "0", "--mu", "1",
                       "--order", "3", "--max-order", "3", "--strict")
    rec = records(out)[0]
    assert rec["stabilized"] is False and code == 3


def test_bracket(capsys):
    code, out, _ = run(capsys, "bracket", "x^2", "theta", "--format", "pretty")
    assert code == 0 and out.strip() == "-x*theta"
    code, out, _ = run(capsys, "bracket", "x^2", "theta")
    assert records(out)[0]["result"] == "-x*theta"


def test_bracket_parse_error_is_inapplicable(capsys):
    code, _, err = run(capsys, "bracket", "x^", "theta")
    assert code == 2 and "error" in err


def test_verify_c_plus_d(capsys):
    code, out, _ = run(capsys, "verify", "--family", "c+d", "--k", "2", "--s", "1")
    (rec,) = records(out)
    assert code == 0 and rec["passed"]
    assert rec["checks"][0] == {"check": "c + d = h'(fg)^(3)", "status": "PASS"}


def test_verify_inapplicable(capsys):
    code, out, err = run(capsys, "verify", "--family", "a1", "--k", "1", "--lambda", "0")
    assert code == 2 and out == ""
    assert "vanishes at i=1" in err


def test_verify_super_reports_each_member(capsys):
    code, out, _ = run(capsys, "verify", "--family", "super", "--lambda", "0", "--nu", "0", "--mu", "1")
    rec = records(out)[0]
    assert code == 0 and [c["status"] for c in rec["checks"]] == ["PASS"]


def test_basis_classical(capsys):
    code, out, _ = run(capsys, "basis", "--classical", "--lambda", "0", "--nu", "0", "--mu", "1")
    rec = records(out)[0]
    assert code == 0 and rec["dim"] == 3 and rec["source"] == "closed-form"
    assert rec["families"] == ["b", "c", "d"]


def test_basis_super(capsys):
    code, out, _ = run(capsys, "basis", "--lambda", "0", "--nu", "0", "--mu", "1")
    rec = records(out)[0]
    assert code == 0 and rec["dim"] == len(rec["basis"]) == 1


def test_missing_triple_is_inapplicable(capsys):
    code, _, err = run(capsys, "dim", "--lambda", "0")
    assert code == 2 and "required" in err


def test_negative_values_parse():
    cfg = parse_config(["dim", "--lambda", "-1/2", "--nu", "-3", "--mu", "1"])
    assert (cfg.lam, cfg.nu, cfg.mu) == ("-1/2", "-3", "1")


def test_sweep_order_is_lexicographic():
    cfg = parse_config(["table", "--s-max", "1", "--t-max", "1", "--delta-range", "0..1"])
    triples = sweep_triples(cfg)
    assert triples == sorted(triples) and len(triples) == 8


def test_table_tsv_and_json(capsys):
    argv = ["table", "--classical", "--s-max", "1", "--t-max", "0", "--delta-range", "0..2"]
    code, out, _ = run(capsys, *argv, "--format", "tsv")
    lines = out.splitlines()
    assert code == 0 and lines[0].split("\t")[0] == "lambda" and len(lines) == 7
    code, out, _ = run(capsys, *argv)
    assert len(records(out)) == 6


def test_table_is_independent_of_worker_count():
    argv = [sys.executable, "-m", "supercohom.cli", "table", "--classical", "--s-max", "2",
            "--t-max", "1", "--delta-range", "0..4", "--format", "tsv"]
    one = subprocess.run(argv + ["--jobs", "1"], capture_output=True, check=True).stdout
    two = subprocess.run(argv + ["--jobs", "2"], capture_output=True, check=True).stdout
    assert one == two and one


def test_internal_errors_map_to_exit_one(capsys, monkeypatch):
    import supercohom.cli as cli

    def boom(cfg):
        raise RuntimeError("kaput")
    monkeypatch.setitem(cli.COMMANDS, "classify", boom)
    code, _, err = run(capsys, "classify", "--lambda", "0", "--nu", "0", "--mu", "0")
    assert code == 1 and "kaput" in err


@pytest.mark.parametrize("text, want", [("0..3", [0, 1, 2, 3]), ("0..8:2", [0, 2, 4, 6, 8]),
                                        ("-1..1", [-1, 0, 1])])
def test_parse_range(text, want):
    assert parse_range(text) == want


@pytest.mark.parametrize("bad", ["3..1", "0..x", "5", "0..4:0"])
def test_parse_range_rejects(bad):
    with pytest.raises(InapplicableParameters):
        parse_range(bad)
