import csv
import io
import json

import numpy as np
import pytest

from qcohere import channels, cli, qcore, states


@pytest.fixture
def write_state(tmp_path):
    def write(rho, name="state.json"):
        path = tmp_path / name
        path.write_text(states.state_to_json(rho))
        return str(path)
    return write


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_compute_mcms(capsys, write_state):
    code, out, _ = run(capsys, "compute", "--state", write_state(states.mcms(0.5, 3)), "--measure", "c_l1")
    assert code == 0
    obj = json.loads(out)
    assert abs(obj["value"] - 1.0) < 1e-12
    assert obj["measure"] == "c_l1"


def test_compute_trace_discord_bell(capsys, write_state):
    path = write_state(states.bell_diagonal((0.6, -0.18, 0.3)))
    code, out, _ = run(capsys, "compute", "--state", path, "--measure", "trace_discord")
    assert code == 0
    # intermediate of |c_i| is 0.3
    assert abs(json.loads(out)["value"] - 0.3) < 1e-12


def test_compute_with_basis(capsys, write_state, tmp_path):
    basis = tmp_path / "basis.json"
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    basis.write_text(json.dumps(states.matrix_to_json(H)))
    plus = write_state(qcore.proj(states.maximally_coherent(2)))
    code, out, _ = run(capsys, "compute", "--state", plus, "--measure", "c_l1", "--basis", basis)
    assert code == 0 and abs(json.loads(out)["value"]) < 1e-12


def test_compute_errors(capsys, tmp_path, write_state):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "re": [1, 0]}')
    code, _, err = run(capsys, "compute", "--state", bad, "--measure", "c_l1")
    assert code == 2 and err
    good = write_state(np.eye(2) / 2)
    assert run(capsys, "compute", "--state", good, "--measure", "nonsense")[0] == 2
    # a discord measure needs a bipartite state
    assert run(capsys, "compute", "--state", write_state(np.eye(3) / 3), "--measure", "trace_discord")[0] == 2
    assert run(capsys, "compute", "--state", tmp_path / "missing.json", "--measure", "c_l1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_sweep_freezing_plateau(capsys, write_state):
    path = write_state(states.bell_diagonal((0.6, -0.18, 0.3)))
    code, out, _ = run(capsys, "sweep", "--state", path, "--channel", "phase_flip", "--measure", "entropic_discord",
                       "--grid", "0:0.1:11")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 11
    vals = np.array([float(r["value"]) for r in rows])
    assert np.ptp(vals) < 1e-6
    params = [float(r["param"]) for r in rows]
    assert params == sorted(params)


def test_sweep_amplitude_damping(capsys, write_state):
    path = write_state(qcore.proj(states.maximally_coherent(2)))
    code, out, _ = run(capsys, "sweep", "--state", path, "--channel", "amplitude_damping", "--measure", "c_l1",
                       "--grid", "0:1:9")
    assert code == 0
    vals = np.array([float(r["value"]) for r in read_csv(out)])
    assert np.all(np.diff(vals) < 0)
    # C_l1 of AD(gamma)|+> is sqrt(1 - gamma)
    assert np.allclose(vals, np.sqrt(1 - np.linspace(0, 1, 9)), atol=1e-11)


def test_sweep_one_side_and_json(capsys, write_state):
    path = write_state(states.bell_diagonal((0.5, 0.3, 0.1)))
    code, out, _ = run(capsys, "sweep", "--state", path, "--channel", "depolarizing", "--measure", "c_l1",
                       "--grid", "0:1:3", "--on", "B", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    rho = states.bell_diagonal((0.5, 0.3, 0.1))
    out_state = channels.apply(channels.standard_channel("depolarizing", 0.5), rho, "B", (2, 2))
    from qcohere import coherence
    assert abs(rows[1]["value"] - coherence.c_l1(out_state).value) < 1e-11


def test_sweep_errors(capsys, write_state):
    path = write_state(qcore.proj(states.maximally_coherent(2)))
    assert run(capsys, "sweep", "--state", path, "--channel", "amplitude_damping", "--measure", "c_l1",
               "--grid", "0:1:0")[0] == 2
    assert run(capsys, "sweep", "--state", path, "--channel", "amplitude_damping", "--measure", "c_l1",
               "--grid", "0:2:3")[0] == 2
    assert run(capsys, "sweep", "--state", path, "--channel", "warp", "--measure", "c_l1",
               "--grid", "0:1:3")[0] == 2


def test_parse_grid():
    assert np.allclose(cli.parse_grid("0:1:5"), np.linspace(0, 1, 5))
    for bad in ("0:1", "a:b:c", "0:1:0"):
        with pytest.raises(ValueError):
            cli.parse_grid(bad)


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "bell-diagonal-suite")
    assert code == 0
    assert all(r["status"] == "PASS" for r in read_csv(out))
    assert run(capsys, "verify", "--suite", "no-such-suite")[0] == 2
    code, out, _ = run(capsys, "verify", "--suite", "haar", "-d", 2, "-n", 10_000, "--seed", 1)
    assert code == 0
    assert read_csv(out)[0]["check"] == "haar_l1_d2"
    for suite in ("coherence-suite", "channels-suite"):
        assert run(capsys, "verify", "--suite", suite, "-n", 3)[0] == 0


def test_verify_failure_serializes_case(capsys, monkeypatch):
    monkeypatch.setitem(cli.SUITES, "broken", lambda a: [("fine", 0.0, 1e-9), ("off", 1.0, 1e-9)])
    code, out, err = run(capsys, "verify", "--suite", "broken")
    assert code == 1
    assert "FAIL" in out
    assert "off" in err


def test_haar_command(capsys):
    code, out, _ = run(capsys, "haar", "-d", 2, "-n", 10_000, "--seed", 1)
    assert code == 0
    obj = json.loads(out)
    assert abs(obj["mean"] - np.pi / 4) < 4 * obj["stderr"]


def test_curve_command(capsys):
    code, out, _ = run(capsys, "curve", "--kind", "fermionic", "--measure", "negativity", "--grid", "0.1:10:5")
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["acceleration", "r", "measure", "value", "n_max"]
    vals = [float(r["value"]) for r in rows]
    assert vals == sorted(vals, reverse=True)
    code, out, _ = run(capsys, "curve", "--kind", "bosonic", "--measure", "negativity", "--grid", "0.5:2:3")
    assert code == 0 and all(int(r["n_max"]) >= 4 for r in read_csv(out))


def test_byte_identical_outputs(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "verify", "--suite", "coherence-suite", "-n", 4, "--seed", 9, "--out", path)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.splitlines()[0] == "check,error,tol,status"


def test_float_format():
    text = cli.rows_to_text([{"x": 1 / 3}], ["x"], "csv")
    assert text.splitlines()[1] == "0.333333333333"
