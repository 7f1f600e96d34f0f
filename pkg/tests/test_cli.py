import json

import numpy as np
import pytest

from stabsat import cli
from stabsat.circuit import parse_circuit

from conftest import FIXTURES, HTH_VALUE


def run(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    assert code == 0, err
    return json.loads(out)


def test_fixtures(capsys):
    r = run_json(capsys, "qcsat", "solve", FIXTURES / "fixture_clifford.qcirc")
    assert r["mode"] == "exact" and r["t"] == 0 and r["value_exact"] == "1"
    r = run_json(capsys, "nic", "clifford", FIXTURES / "fixture_identity.qcirc", "--alpha", 1, "--beta", 0.5)
    assert r["decision"] == "no"
    r = run_json(capsys, "qcsat", "solve", FIXTURES / "fixture_hth.qcirc", "--exact")
    assert abs(r["value"] - HTH_VALUE) < 1e-12


def test_float_format():
    assert cli.dumps({"a": 0.1, "b": 1.0, "c": [2, "x", None, True]}) == \
        '{"a": 0.10000000000000001, "b": 1.0, "c": [2, "x", null, true]}'


def test_gen_then_solve_and_accept(tmp_path, capsys):
    f = tmp_path / "r.qcirc"
    run_json(capsys, "gen", "random", "--n", 3, "--m", 3, "--s", 20, "--t", 2, "--seed", 7, "--out", f)
    assert parse_circuit(f.read_text()).t_count == 2
    sol = run_json(capsys, "qcsat", "solve", f, "--exact")
    wit = tmp_path / "w.json"
    code, out, _ = run(capsys, "--json", "qcsat", "witness", f, "--exact")
    wit.write_text(out)
    acc = run_json(capsys, "oracle", "accept", f, "--witness", wit)
    dense = run_json(capsys, "oracle", "val", f)
    assert abs(acc["acceptance_probability"] - sol["value"]) < 1e-9
    assert abs(dense["value"] - sol["value"]) < 1e-9


def test_accept_amplitudes(tmp_path, capsys):
    wit = tmp_path / "w.json"
    wit.write_text(json.dumps({"real": [0.0, 1.0], "imag": [0.0, 0.0]}))
    f = tmp_path / "copy.qcirc"
    f.write_text("qubits 2\nwitness 0\nancilla 1\noutput 1\ncx 0 1\n")
    assert run_json(capsys, "oracle", "accept", f, "--witness", wit)["acceptance_probability"] == 1.0
    wit.write_text(json.dumps({"real": [1.0, 1.0]}))
    assert run(capsys, "oracle", "accept", f, "--witness", wit)[0] == 2


def test_determinism(tmp_path, capsys):
    f = tmp_path / "r.qcirc"
    run(capsys, "gen", "random", "--n", 4, "--m", 4, "--s", 40, "--t", 4, "--seed", 3, "--out", f)
    outs = []
    for threads in (1, 3, 1):
        r = run_json(capsys, "--seed", 11, "--threads", threads, "qcsat", "solve", f, "--randomized")
        r.pop("wall_time_ms")
        outs.append(json.dumps(r))
    assert len(set(outs)) == 1


def test_flags_after_subcommand(capsys):
    r = run_json(capsys, "qcsat", "solve", FIXTURES / "fixture_clifford.qcirc", "--seed", "4")
    assert r["value"] == 1.0


def test_appendix_and_decide(tmp_path, capsys):
    r = run_json(capsys, "appendix", "width", FIXTURES / "fixture_hth.qcirc")
    assert r == {"b": 2, "t": 1, "predicted_dim": 4}
    r = run_json(capsys, "appendix", "solve", FIXTURES / "fixture_hth.qcirc")
    assert abs(r["value"] - HTH_VALUE) < 1e-9
    r = run_json(capsys, "qcsat", "decide", FIXTURES / "fixture_clifford.qcirc", "--a", 0.6, "--b", 0.3)
    assert r["decision"] == "yes"
    assert run(capsys, "qcsat", "decide", FIXTURES / "fixture_clifford.qcirc")[0] == 2


def test_nic_and_oracle_distance(capsys):
    r = run_json(capsys, "nic", "lightcone", FIXTURES / "fixture_identity.qcirc", "--depth", 4)
    assert r["decision"] == "no"
    r = run_json(capsys, "oracle", "distance", FIXTURES / "fixture_identity.qcirc")
    assert r["distance"] < 1e-9


def test_ising(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("vertices 1\n")
    f = tmp_path / "i.qcirc"
    run_json(capsys, "gen", "ising", "--graph", g, "--out", f)
    assert abs(run_json(capsys, "qcsat", "solve", f)["value"] - 1) < 1e-9


def test_errors(tmp_path, capsys):
    code, _, err = run(capsys, "qcsat", "solve", tmp_path / "missing.qcirc")
    assert code == 2
    bad = tmp_path / "bad.qcirc"
    bad.write_text("qubits 2\nwitness 0\nancilla 1\noutput 1\nfrob 0\n")
    code, _, err = run(capsys, "qcsat", "solve", bad)
    assert code == 2 and "line 5" in err and "Circuit format" in err
    assert run(capsys, "nope")[0] == 2
    big = tmp_path / "big.qcirc"
    big.write_text("qubits 15\nwitness 0\noutput 1\n")
    assert run(capsys, "oracle", "val", big)[0] == 3
    t3 = tmp_path / "t3.qcirc"
    t3.write_text("qubits 3\nwitness 0\noutput 1\nh 0\nt 0\nh 1\nt 1\nh 2\nt 2\n")
    assert run(capsys, "qcsat", "solve", t3, "--exact", "--cap", 1)[0] == 0  # --exact lifts the cap
    assert run(capsys, "qcsat", "solve", t3, "--cap", 1, "--seed", 1)[0] == 0
