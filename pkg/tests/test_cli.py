import json
import subprocess
import sys

import pytest

from linrel.cli import main


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "linrel.cli", *args],
                          capture_output=True, text=True)
    return proc


def test_gen_writes_instance(tmp_path):
    out = tmp_path / "inst.json"
    code = main(["gen", "--xdim", "2", "--ydim", "2", "--alpha", "1",
                 "--beta", "1", "--seed", "7", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["measured"]["alpha"] == 1
    assert doc["measured"]["beta"] == 1
    assert doc["header"]["seed"] == 7
    assert "instance_hash" in doc["header"]
    assert doc["spec"]["x_dim"] == 2


def test_gen_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--xdim", "3", "--ydim", "3", "--alpha", "1", "--beta", "1",
            "--seed", "11"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_infeasible_exit_2(capsys):
    code = main(["gen", "--xdim", "2", "--ydim", "2", "--alpha", "3",
                 "--beta", "1"])
    assert code == 2
    assert "alpha" in capsys.readouterr().err


def test_analyze_worked_pair(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"matrix": [[0.0, 0.0], [0.0, 1.0]]},
        "B": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
    }))
    out = tmp_path / "analysis.json"
    assert main(["analyze", str(inst), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["pair"]["nu"] == 1
    assert doc["A"]["gamma"] == pytest.approx(1.0)
    assert doc["A"]["alpha"] == 1 and doc["A"]["beta"] == 1
    assert all(doc["A"]["duality"].values())
    assert doc["pair"]["bound_valid"]
    assert doc["pair"]["radii"]["pencil"] == pytest.approx(1.0)


def test_analyze_identity_pair_all_zero_indices(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
        "B": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
    }))
    out = tmp_path / "analysis.json"
    assert main(["analyze", str(inst), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    for key in ("A", "B"):
        assert doc[key]["alpha"] == 0 and doc[key]["beta"] == 0
        assert doc[key]["beta_prime"] == 0
    assert doc["pair"]["nu"] == "inf"


def test_analyze_zero_graph_gamma_inf(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"x_dim": 2, "y_dim": 2, "graph": {"ambient": 4, "basis": []}},
        "B": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
    }))
    out = tmp_path / "analysis.json"
    assert main(["analyze", str(inst), "--out", str(out)]) == 0
    text = out.read_text()
    doc = json.loads(text)
    assert doc["A"]["gamma"] == "inf"
    assert doc["A"]["alpha"] == 0


def test_analyze_malformed_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit) as exc:
        main(["analyze", str(bad)])
    assert exc.value.code == 2


def test_sweep_outputs(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"matrix": [[0.0, 0.0], [0.0, 1.0]]},
        "B": {"matrix": [[0.0, 0.0], [0.0, 1.0]]},
    }))
    base = tmp_path / "sweep"
    assert main(["sweep", str(inst), "--sigma", "0", "--tau", "1",
                 "--grid-points", "4", "--phases", "4",
                 "--out", str(base)]) == 0
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert doc["radii"]["full"] == pytest.approx(1.0)
    assert all(r["alpha"] == 1 for r in doc["records"])
    csv_text = (tmp_path / "sweep.csv").read_text()
    lines = csv_text.strip().split("\n")
    assert lines[0].startswith("re,im,alpha")
    assert len(lines) == 1 + 1 + 4 * 4  # header + lambda 0 + grid


def test_sweep_header_only_csv(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
        "B": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
    }))
    base = tmp_path / "empty"
    assert main(["sweep", str(inst), "--sigma", "0", "--tau", "1",
                 "--grid-points", "0", "--out", str(base)]) == 0
    lines = (tmp_path / "empty.csv").read_text().strip().split("\n")
    assert lines == [lines[0]]


def test_sweep_deterministic_bytes(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"matrix": [[0.0, 0.0], [0.0, 1.0]]},
        "B": {"matrix": [[0.0, 0.0], [0.0, 1.0]]},
    }))
    for name in ("s1", "s2"):
        assert main(["sweep", str(inst), "--sigma", "0", "--tau", "1",
                     "--grid-points", "3", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "s1.csv").read_bytes() == (tmp_path / "s2.csv").read_bytes()
    assert (tmp_path / "s1.json").read_bytes() == (tmp_path / "s2.json").read_bytes()


def test_chains_command(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "A": {"matrix": [[0.0, 0.0], [0.0, 1.0]]},
        "B": {"matrix": [[1.0, 0.0], [0.0, 1.0]]},
    }))
    assert main(["chains", str(inst)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["nu"] == 1
    assert doc["m_dims"][0] == 2
    assert doc["nu_duality"]["equality_nu"] is True


def test_verify_small_pass(tmp_path):
    out = tmp_path / "summary.json"
    code = main(["verify", "--suite", "gap", "--trials", "12", "--seed", "3",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["conclusion_failures"] == 0
    assert doc["suites"]["gap"]["lemmas"]["gap_dimension"]["fail"] == 0
    assert doc["header"]["seed"] == 3
    assert "tolerances" in doc["header"]


def test_verify_trials_zero_vacuous(tmp_path):
    out = tmp_path / "summary.json"
    assert main(["verify", "--suite", "duality", "--trials", "0",
                 "--seed", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["conclusion_failures"] == 0
    assert doc["suites"]["duality"]["lemmas"] == {}


def test_verify_replay_round_trip(tmp_path):
    # replay re-runs serialized cases and reproduces the verdict
    from linrel import suites as sts
    payload = {"suite": "duality", "seed": 5,
               "cases": [sts._pair_case(5, i) for i in range(3)]}
    replay_file = tmp_path / "replay.json"
    replay_file.write_text(json.dumps(payload))
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["verify", "--replay", str(replay_file), "--out", str(out1)]) == 0
    assert main(["verify", "--replay", str(replay_file), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    assert doc["suites"]["duality"]["trials"] == 3


def test_verify_replay_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert main(["verify", "--replay", str(bad)]) == 2


def test_console_entry_point():
    proc = run_cli(["--version"])
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.1.0"
