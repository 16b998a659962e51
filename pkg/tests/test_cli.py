import json
import subprocess
import sys

import pytest

from gammaschur.cli import SCHEMA, main
from gammaschur.crossings import CrossingReport
from gammaschur.planners.signal import SignalPlan
from gammaschur.planners.trace import TracePlan
from gammaschur.schur import OrderVerdict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_cdf_closed_form(capsys):
    code, out, _ = run(capsys, "cdf", "--weights", "0.5,0.5", "--alpha", "1", "--beta", "1", "--x", "1")
    assert code == 0 and out == "0.593994150290\n"


def test_cdf_several_points_json(capsys):
    code, out, _ = run(capsys, "--json", "cdf", "--weights", "0.7,0.3", "--alpha", "1",
                       "--beta", "1", "--x", "0.5,1")
    recs = records(out)
    assert code == 0 and len(recs) == 2
    assert all(r["schema"] == SCHEMA for r in recs)
    assert recs[1]["value"] == pytest.approx(0.6073661812373317, abs=1e-12)


def test_pdf_and_mode(capsys):
    _, out, _ = run(capsys, "pdf", "--weights", "1", "--alpha", "2", "--beta", "1", "--x", "1")
    assert out == "0.367879441171\n"
    _, out, _ = run(capsys, "mode", "--weights", "1", "--alpha", "3", "--beta", "2", "--json")
    assert records(out)[0]["value"] == pytest.approx(1.0, abs=1e-8)


def test_compare_json(capsys):
    code, out, _ = run(capsys, "compare", "--mu", "0.5,0.5", "--lambda", "1,0", "--alpha", "2",
                       "--beta", "1", "--x", "3", "--json")
    rec = records(out)[0]
    assert code == 0
    assert (rec["relation"], rec["decided_by"]) == ("MuGE", "Theorem1")
    assert OrderVerdict.from_dict(rec).concave_threshold == 2.5


def test_compare_numeric(capsys):
    _, out, _ = run(capsys, "compare", "--mu", "0.5,0.5", "--lambda", "1,0", "--alpha", "2",
                    "--beta", "1", "--x", "2.2", "--numeric")
    assert out.startswith("MuLE Numeric")


def test_crossings_report_round_trip(capsys):
    _, out, _ = run(capsys, "crossings", "--mu", "0.5,0.5", "--lambda", "1,0", "--alpha", "1",
                    "--beta", "1", "--x-lo", "0.01", "--x-hi", "10", "--json")
    rep = CrossingReport.from_dict(records(out)[0])
    assert rep.count == 1 and rep.crossings[0][0] == pytest.approx(1.2564312086, abs=1e-8)


def test_crossings_csv(capsys):
    _, out, _ = run(capsys, "crossings", "--mu", "0.5,0.5", "--lambda", "1,0", "--alpha", "1",
                    "--beta", "1", "--grid", "16", "--csv")
    lines = out.splitlines()
    assert lines[0] == "x,P_mu,P_lambda,D" and len(lines) == 17
    x, p_mu, p_lam, d = map(float, lines[1].split(","))
    assert d == pytest.approx(p_mu - p_lam, abs=1e-11)


def test_plan_signal(capsys):
    _, out, _ = run(capsys, "plan-signal", "--x", "1.5", "--delta", "0.01", "--json")
    rec = records(out)[0]
    assert SignalPlan.from_dict(rec).min_samples == 7


def test_plan_trace_inline_and_file(capsys, tmp_path):
    _, out, _ = run(capsys, "plan-trace", "--spectrum", "3,2,1", "--epsilon", "0.25",
                    "--delta", "0.01", "--json")
    plan = TracePlan.from_dict(records(out)[0])
    assert (plan.exact_samples, plan.bound_samples) == (78, 295)
    p = tmp_path / "m.txt"
    p.write_text("3\n3 0 0\n0 2 0\n0 0 1\n", encoding="utf-8")
    _, out, _ = run(capsys, "plan-trace", "--spectrum-file", str(p), "--epsilon", "0.25",
                    "--delta", "0.01")
    assert out.startswith("exact=78 bound=295")


def test_weights_file(capsys, tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("0.3\n0.7\n", encoding="utf-8")
    _, out, _ = run(capsys, "cdf", "--weights-file", str(p), "--alpha", "1", "--beta", "1", "--x", "1")
    assert float(out) == pytest.approx(0.6073661812373317, abs=1e-11)


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "bakirov")
    assert code == 0 and out.startswith("PASS")


def test_domain_error_exit_1(capsys):
    code, out, err = run(capsys, "cdf", "--weights", "0,0", "--alpha", "1", "--beta", "1", "--x", "1")
    assert code == 1 and out == ""
    rec = json.loads(err)
    assert rec["error"] == "AllWeightsZero" and rec["schema"] == SCHEMA


def test_not_comparable_exit_1(capsys):
    code, _, err = run(capsys, "compare", "--mu", "1,0", "--lambda", "0.5,0.5", "--alpha", "1",
                       "--beta", "1", "--x", "1")
    assert code == 1 and json.loads(err)["error"] == "NotComparable"


@pytest.mark.parametrize("argv", [
    ["cdf", "--weights", "a,b", "--alpha", "1", "--beta", "1", "--x", "1"],
    ["cdf", "--alpha", "1", "--beta", "1", "--x", "1"],
    ["nonsense"],
    [],
])
def test_usage_error_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_global_flags_before_and_after_subcommand(capsys):
    _, before, _ = run(capsys, "--json", "--eval-tol", "1e-12", "cdf", "--weights", "1",
                       "--alpha", "1", "--beta", "1", "--x", "1")
    _, after, _ = run(capsys, "cdf", "--weights", "1", "--alpha", "1", "--beta", "1",
                      "--x", "1", "--json", "--eval-tol", "1e-12")
    assert before == after and records(before)[0]["error_bound"] == 1e-12


def test_help_documents_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["cdf", "--help"])
    out = capsys.readouterr().out
    assert "1e-10" in out and "1e-08 * mean" in out and "1e-8 * sum" in out


def test_byte_identical_runs():
    argv = [sys.executable, "-m", "gammaschur", "--seed", "3", "verify", "--suite", "planners", "--json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
