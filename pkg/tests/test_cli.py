import csv
import io
import json

import pytest

from hybridmsd import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#")))


def test_map(capsys):
    code, out, _ = run(capsys, "map", "--protocol", "h4", "--p", "0.826")
    assert code == 0
    assert float(rows(out)[0]["p_out"]) == pytest.approx(0.8417, abs=1e-4)
    code, out, _ = run(capsys, "map", "--protocol", "t5", "--p", "0.655")
    assert float(rows(out)[0]["p_out"]) == pytest.approx(0.655, abs=1e-3)


def test_map_rejects_out_of_range(capsys):
    code, _, err = run(capsys, "map", "--protocol", "h4", "--p", "1.2")
    assert code == cli.EXIT_VALIDATION
    assert "p <= 1" in err
    assert run(capsys, "map", "--protocol", "h9", "--p", "0.5")[0] == cli.EXIT_VALIDATION


def test_plan_summary_and_exit_codes(capsys):
    code, out, _ = run(capsys, "plan", "--p", "0.78", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["summary"]["N5"] == 5
    assert payload["rows"][-1]["p_out"] >= 0.999
    code, _, err = run(capsys, "plan", "--bloch", "0.3", "0.3", "0.3")
    assert code == cli.EXIT_NOT_DISTILLABLE and "octahedron" in err
    code, out, _ = run(capsys, "plan", "--axis", "T", "--p", "0.9")
    assert {r["protocol"] for r in rows(out)} == {"T5"}


def test_precision_flag(capsys):
    _, out, _ = run(capsys, "map", "--protocol", "h4", "--p", "0.826", "--precision", "12")
    assert rows(out)[0]["p_out"] == "0.841714434001"


def test_sweeps(capsys, tmp_path):
    path = tmp_path / "eff.csv"
    assert run(capsys, "sweep", "efficiency", "--points", "300", "--out", str(path))[0] == 0
    flagged = [r for r in rows(path.read_text()) if r["crossover"] == "1"]
    assert len(flagged) == 1 and float(flagged[0]["p_h"]) == pytest.approx(0.870, abs=0.005)
    assert not list(tmp_path.glob("*.tmp"))

    _, out, _ = run(capsys, "sweep", "iterations", "--points", "2", "--p-min", "0.78", "--p-max", "0.8")
    assert int(rows(out)[0]["n7"]) == pytest.approx(26, abs=1)

    _, out, _ = run(capsys, "sweep", "turning-point", "--points", "3", "--p-min", "0.75", "--p-max", "0.8")
    assert all(0.83 <= float(r["p_star"]) <= 0.87 for r in rows(out))


def test_unwritable_output(capsys, tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    assert run(capsys, "sweep", "regions", "--resolution", "50", "--out", str(bad))[0] == cli.EXIT_IO


def test_montecarlo_commands(capsys):
    _, out, _ = run(capsys, "montecarlo", "experiment")
    assert len(rows(out)) == 5
    _, out, _ = run(capsys, "montecarlo", "robustness", "--centers", "0.826", "--deviations", "0",
                    "--samples", "5", "--precision", "17")
    _, map_out, _ = run(capsys, "map", "--protocol", "h4", "--p", "0.826", "--precision", "17")
    assert float(rows(out)[0]["mean_dp"]) == float(rows(map_out)[0]["p_out"]) - 0.826
    code, out, _ = run(capsys, "montecarlo", "gaussian", "--mean", "0.848", "--samples", "300", "--format", "json")
    summary = json.loads(out)["summary"]
    assert summary["output_mean"] > summary["input_mean"]
    assert run(capsys, "montecarlo", "gaussian", "--sigma", "-1")[0] == cli.EXIT_VALIDATION


def test_montecarlo_seed_determinism(capsys):
    argv = ("montecarlo", "robustness", "--centers", "0.8", "0.9", "--deviations", "0.1", "--samples", "20")
    first = run(capsys, *argv, "--seed", "4")[1]
    assert run(capsys, *argv, "--seed", "4", "--workers", "2")[1] == first
    assert run(capsys, *argv, "--seed", "5")[1] != first
