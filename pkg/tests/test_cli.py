import json

import pytest

from conftest import micro_capacity, tiny2
from msopt.cli import main
from msopt.serialization import write_instance


@pytest.fixture
def files(tmp_path):
    paths = {"tiny2": tmp_path / "tiny2.json", "micro": tmp_path / "micro.json", "dir": tmp_path}
    write_instance(tiny2(), paths["tiny2"])
    write_instance(micro_capacity(), paths["micro"])
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_fullspace(files, capsys):
    code, out, _ = run(capsys, "solve", "--algorithm", "fullspace", "--instance", files["tiny2"])
    assert code == 0
    assert json.loads(out)["objective"] == pytest.approx(1.5)


@pytest.mark.parametrize("algo", ["benders", "lagrangian-cp", "dw"])
def test_decompositions_agree(files, capsys, algo):
    code, out, _ = run(capsys, "solve", "--algorithm", algo, "--instance", files["tiny2"])
    assert code == 0
    assert json.loads(out)["objective"] == pytest.approx(1.5, abs=1e-4 * 2.5)


def test_iteration_limit_exit(files, capsys):
    code, _, _ = run(capsys, "solve", "--algorithm", "benders", "--max-iter", "0", "--instance", files["tiny2"])
    assert code == 2


def test_parse_error_exit(files, capsys):
    bad = files["dir"] / "bad.json"
    bad.write_text('{"schema_version": "1", "kind": "multiscale"}')
    code, _, err = run(capsys, "solve", "--algorithm", "fullspace", "--instance", bad)
    assert code == 1 and "first_stage" in err


def test_usage_error_exit(capsys):
    assert run(capsys, "solve", "--instance", "x.json")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_infeasible_exit(files, capsys):
    from msopt.model import FirstStage, MultiScaleInstance, Subperiod
    from msopt.serialization import write_instance as w
    inst = MultiScaleInstance(FirstStage([1.0], A=[[1.0]], senses=["LE"], b=[-1.0]),
                              [Subperiod([1.0], [[1.0]], [[1.0]], ["GE"], [1.0])])
    path = files["dir"] / "inf.json"
    w(inst, path)
    assert run(capsys, "solve", "--algorithm", "fullspace", "--instance", path)[0] == 3
    assert run(capsys, "solve", "--algorithm", "benders", "--instance", path)[0] == 3


def test_log_csv(files, capsys):
    log = files["dir"] / "b.csv"
    run(capsys, "solve", "--algorithm", "benders", "--instance", files["tiny2"], "--log", log)
    lines = log.read_text().splitlines()
    assert lines[0] == "iteration,lower_bound,upper_bound,gap,wall_millis"
    assert len(lines) >= 2 and all(l.endswith(",0") for l in lines[1:])


def test_out_file(files, capsys):
    out = files["dir"] / "s.json"
    code, stdout, _ = run(capsys, "solve", "--algorithm", "dw", "--instance", files["micro"], "--out", out)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["objective"] == pytest.approx(7.0)


def test_pamso(files, capsys):
    code, out, _ = run(capsys, "solve", "--algorithm", "pamso", "--instance", files["micro"], "--budget", "200")
    assert code == 0 and json.loads(out)["objective"] == pytest.approx(7.0, abs=1e-6)
    code, _, err = run(capsys, "solve", "--algorithm", "pamso", "--instance", files["tiny2"])
    assert code == 1 and "capacity" in err


def test_metrics(files, capsys):
    code, out, _ = run(capsys, "metrics", "--instance", files["micro"])
    assert code == 0 and json.loads(out)["vmm"] == pytest.approx(3.5)
    code, out, _ = run(capsys, "metrics", "--report", "vss", "--instance", files["tiny2"])
    assert code == 0 and json.loads(out)["vss"] == pytest.approx(0.25)
    code, _, err = run(capsys, "metrics", "--report", "vmm", "--instance", files["tiny2"])
    assert code == 1 and "vmm requires a high-level builder" in err


def test_generate(files, capsys):
    a, b = files["dir"] / "a.json", files["dir"] / "b.json"
    assert run(capsys, "generate", "--seed", "0", "--out", a)[0] == 0
    assert run(capsys, "generate", "--seed", "0", "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert run(capsys, "generate", "--n-subperiods", "0")[0] == 1


def test_convert_then_solve(files, capsys):
    lowered = files["dir"] / "lowered.json"
    assert run(capsys, "convert", "--instance", files["micro"], "--out", lowered)[0] == 0
    _, direct, _ = run(capsys, "solve", "--algorithm", "fullspace", "--instance", files["micro"])
    _, via, _ = run(capsys, "solve", "--algorithm", "fullspace", "--instance", lowered)
    assert json.loads(direct)["objective"] == json.loads(via)["objective"]
    assert run(capsys, "convert", "--instance", files["tiny2"])[0] == 1


def test_log_level_env(files, capsys, monkeypatch):
    monkeypatch.setenv("MSOPT_LOG_LEVEL", "debug")
    assert run(capsys, "solve", "--algorithm", "fullspace", "--instance", files["tiny2"])[0] == 0
