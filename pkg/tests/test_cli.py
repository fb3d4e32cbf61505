import csv
import io
import json

import pytest

from noisymagic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rom_t_two_copies(capsys):
    code, out, _ = run(capsys, "rom", "--state", "T", "--copies", "2", "--basis", "full")
    data = json.loads(out)
    assert code == 0 and data["l1"] == pytest.approx(1.747547, abs=1e-6)
    assert data["schema_version"] == 1


def test_outputs_are_byte_identical(capsys):
    a = run(capsys, "rom", "--state", "unit2", "--p", "0.05")[1]
    b = run(capsys, "rom", "--state", "unit2", "--p", "0.05")[1]
    assert a == b


def test_scaling_csv(capsys):
    code, out, _ = run(capsys, "scaling", "--p-grid", "0")
    rows = list(csv.DictReader(io.StringIO(out)))
    heis = next(r for r in rows if r["method"] == "heisenberg")
    assert code == 0 and float(heis["alpha"]) == 1.0 and heis["schema_version"] == "1"


def test_rqc_costs_columns(capsys):
    code, out, _ = run(capsys, "rqc-costs", "--p-grid", "0", "--m", "2", "--n", "3", "--d", "4")
    header = out.splitlines()[0].split(",")
    assert header == ["schema_version", "p", "t", "method", "cost_log2", "alpha"]


def test_channel_norm(capsys):
    _, out, _ = run(capsys, "channel-norm", "--gate", "T")
    assert json.loads(out)["norm"] == 2**0.5


def test_basis_counts(capsys):
    _, out, _ = run(capsys, "basis", "--n", "2", "--kind", "reduced")
    assert json.loads(out)["columns"] == 20


def test_gadget(capsys):
    code, out, _ = run(capsys, "gadget", "--gate", "T", "--p", "0")
    assert code == 0 and json.loads(out)["rom"] == pytest.approx(2**0.5, abs=1e-7)


def test_simulate(tmp_path, capsys):
    circuit = {"n": 1, "init": "+", "ops": [["T", 0], ["depo1", 0, 0.1]], "observable": "X"}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(circuit))
    code, out, _ = run(capsys, "simulate", "--circuit", str(path), "--shots", "4000", "--exact")
    data = json.loads(out)
    assert code == 0
    for r in data["results"].values():
        assert abs(r["mean"] - data["exact"]) < 0.1


@pytest.mark.parametrize(
    "argv",
    [
        ["nope"],
        ["rom", "--copies", "0"],
        ["rom", "--p", "2"],
        ["rom", "--state", "U"],
        ["scaling", "--p-grid", "a:b:c"],
        ["simulate", "--circuit", "/nonexistent.json"],
        ["rom", "--threads", "0"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("noisymagic: error=usage") and err.count("\n") == 1


def test_infeasible_exit_three(tmp_path, capsys):
    vec = tmp_path / "v.json"
    vec.write_text(json.dumps({"n": 1, "coeffs": [1, 0.7, 0.7, 0], "t_qubits": []}))
    code, _, err = run(capsys, "rom", "--state", "vector", "--vector", str(vec), "--basis", "reduced")
    assert code == 3 and "error=infeasible" in err


def test_solver_failure_exit_two(monkeypatch, capsys):
    from noisymagic import cli
    from noisymagic.rom import SolverError

    def boom(*a, **k):
        raise SolverError("iteration limit")

    monkeypatch.setattr(cli, "rom", boom)
    code, _, err = run(capsys, "rom")
    assert code == 2 and "error=solver" in err


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "rom", "-o", str(out))
    assert code == 0 and stdout == "" and json.loads(out.read_text())["l1"] > 1.41


def test_cache_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("NOISYMAGIC_CACHE_DIR", str(tmp_path))
    run(capsys, "rom", "--copies", "2")
    assert list(tmp_path.glob("full-n2__*.json"))
