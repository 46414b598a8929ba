import csv
import io
import json
import math

import pytest

from rieszschur.certificates import Certificate, Inequality, Verdict
from rieszschur.cli import (DEFAULTS, ConfigError, exit_code, main, make_config, read_config_file,
                            resolve_settings, run)
from rieszschur.norms import Enclosure
from rieszschur.report import CSV_COLUMNS, Report, dumps, emit, load_report

CHECK = ["check", "--Q", "sin(x)", "--f", "sin(3*x)/sin(x)", "--sigma", "2", "--tau", "1"]


def run_main(argv, capsysbinary):
    code = main(argv)
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


# ---------------------------------------------------------------- exit codes

def test_check_equality_exits_zero(capsysbinary):
    code, out, _ = run_main(CHECK, capsysbinary)
    assert code == 0
    data = json.loads(out)
    assert data["certificates"][0]["verdict"] == Verdict.EQUALITY_WITHIN_TOL.value
    assert data["wall_time_ms"] == 0


def test_parse_error_exits_one_with_position(capsysbinary):
    code, _, err = run_main(["sup", "--f", "sin(x"], capsysbinary)
    assert code == 1 and "5" in err


def test_hypothesis_failure_exits_two(capsysbinary):
    code, _, err = run_main(["check", "--Q", "cos(x)^2", "--f", "sin(x)", "--sigma", "1",
                             "--tau", "2"], capsysbinary)
    assert code == 2 and "positive A_s(Q)" in err


def test_negative_sigma_exits_two(capsysbinary):
    code, _, _ = run_main(["check", "--Q", "sin(x)", "--f", "sin(x)", "--sigma", "-1",
                           "--tau", "1"], capsysbinary)
    assert code == 2


def test_missing_argument_exits_two(capsysbinary):
    code, _, err = run_main(["check", "--Q", "sin(x)"], capsysbinary)
    assert code == 2 and "--f" in err


def test_unwritable_output_exits_four(tmp_path, capsysbinary):
    target = tmp_path / "missing" / "out.json"
    code, _, _ = run_main(["sup", "--f", "sin(x)", "--out", str(target)], capsysbinary)
    assert code == 4


def test_certified_violation_exits_three():
    bad = Enclosure(2.0, 2.0, 0.0, True)
    one = Enclosure(1.0, 1.0, 0.0, True)
    cert = Certificate(Inequality.MAIN, bad, 1.0, one, -1.0, Verdict.VIOLATION_SUSPECTED)
    assert exit_code(Report(certificates=(cert,))) == 3
    assert exit_code(Report(diagnostics=({"criterion": 1, "passed": False},))) == 3
    assert exit_code(Report()) == 0


# ---------------------------------------------------------------- configuration

def test_config_file_is_overridden_by_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# weights\nQ = sin(x)\nf = sin(x)\nsigma = 1\ntau = 1\nseed = 5\nbasis-size = 6\n")
    rc = make_config(["check", "--config", str(cfg), "--seed", "9"])
    assert rc.Q_expr == "sin(x)" and rc.sigma == 1.0 and rc.tau == 1.0
    assert rc.seed == 9 and rc.basis_size == 6


def test_defaults_apply_when_nothing_given():
    st = resolve_settings({}, {})
    assert st == DEFAULTS


def test_bad_config_lines_rejected(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sigma 1\n")
    with pytest.raises(ConfigError):
        read_config_file(str(cfg))
    cfg.write_text("colour = red\n")
    with pytest.raises(ConfigError):
        read_config_file(str(cfg))


def test_bad_numeric_value_exits_two(capsysbinary):
    code, _, _ = run_main(["sup", "--f", "sin(x)", "--step", "fine"], capsysbinary)
    assert code == 2


# ---------------------------------------------------------------- output formats

def test_csv_has_one_row_per_certificate(capsysbinary):
    code, out, _ = run_main(CHECK + ["--format", "csv"], capsysbinary)
    rows = list(csv.reader(io.StringIO(out.decode())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 2
    assert rows[1][0] == "MAIN"


def test_text_format_mentions_verdict(capsysbinary):
    _, out, _ = run_main(CHECK + ["--format", "text"], capsysbinary)
    assert b"EQUALITY_WITHIN_TOL" in out


def test_json_report_round_trips_byte_for_byte():
    report = run(make_config(CHECK))
    blob = emit(report, "json")
    assert emit(load_report(blob), "json") == blob
    assert load_report(blob) == report


def test_empty_report_is_valid_in_every_format():
    r = Report()
    assert json.loads(emit(r, "json"))["certificates"] == []
    assert emit(r, "csv").decode().strip() == ",".join(CSV_COLUMNS)
    assert emit(r, "text").startswith(b"report version")


def test_nonfinite_floats_use_json_tokens():
    text = dumps({"a": math.inf, "b": -math.inf, "c": math.nan, "d": 2.0, "e": 0.1})
    assert text == '{"a":Infinity,"b":-Infinity,"c":NaN,"d":2.0,"e":0.10000000000000001}'
    back = json.loads(text)
    assert math.isinf(back["a"]) and math.isnan(back["c"])


def test_timing_flag_records_wall_time():
    assert run(make_config(["sup", "--f", "sin(x)", "--timing"])).wall_time_ms >= 0
    assert run(make_config(["sup", "--f", "sin(x)"])).wall_time_ms == 0


# ---------------------------------------------------------------- other commands

def test_a_s_command(capsysbinary):
    code, out, _ = run_main(["a-s", "--Q", "sin(x)", "--s", "3"], capsysbinary)
    enc = json.loads(out)["enclosures"][0]
    assert code == 0 and enc["lo"] == pytest.approx(1.0, abs=1e-9)


def test_zeros_command(capsysbinary):
    code, out, _ = run_main(["zeros", "--Q", "x*(x - 1)"], capsysbinary)
    zs = json.loads(out)["diagnostics"][0]["zeros"]["zeros"]
    assert code == 0 and zs == pytest.approx([0.0, 1.0], abs=1e-14)


def test_density_command(capsysbinary):
    code, out, _ = run_main(["density", "--Q", "sin(x)", "--s", "3"], capsysbinary)
    diag = json.loads(out)["diagnostics"][0]
    assert code == 0 and diag["density"]["is_dense"]


def test_sharpness_command(capsysbinary):
    code, out, _ = run_main(["sharpness", "--Q", "sin(x)", "--sigma", "2", "--tau", "1",
                             "--iterations", "300"], capsysbinary)
    res = json.loads(out)["diagnostics"][0]["sharpness"]
    assert code == 0 and res["ratio"] <= res["constant"] * (1 + 1e-6)
