import json
from pathlib import Path

import numpy as np
import pytest

from vnqp.cli import main
from vnqp.documents import InputError, parse_document, parse_input

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
MALFORMED = HERE / "malformed"

# document -> field the diagnostic must name
MALFORMED_FIELDS = {
    "syntax_error.json": "line=3",
    "missing_gates.json": "field=gates",
    "unknown_mode.json": "field=mode",
    "missing_mode.json": "field=mode",
    "non_unitary_gate.json": "field=gates[1]",
    "program_out_of_range.json": "field=program",
    "data_not_normalized.json": "field=data.amplitudes",
    "data_wrong_layout.json": "field=data.layout",
    "slot_out_of_range.json": "field=slots[1]",
    "missing_slots.json": "field=slots",
    "rotation_out_of_range.json": "field=program.layers[0].rotations[0][0]",
    "entangler_bad_qubit.json": "field=program.layers[0].entanglers[0].target",
    "unknown_op.json": "field=circuit[0].op",
    "unknown_gate_name.json": "field=circuit[0].gate",
    "sweep_bad_q.json": "field=Qs[1]",
    "sweep_missing_targets.json": "field=targets",
    "ragged_matrix.json": "field=gates[0][0]",
    "not_an_object.json": "field=<document>",
}


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "name,fmt",
    [
        ("qpu_cnot", "json"),
        ("qpu_cnot", "csv"),
        ("threebus_xx", "json"),
        ("hybrid_theta", "json"),
        ("compile_bell", "json"),
        ("compile_bell.hybrid", "json"),
        ("sweep_fixed", "csv"),
    ],
)
def test_golden_run(capsys, name, fmt):
    code, out, err = run_cli(capsys, "run", GOLDEN / f"{name}.json", "--format", fmt)
    assert code == 0, err
    assert out == (GOLDEN / f"{name}.expected.{fmt}").read_text()


def test_golden_compile(capsys):
    code, out, _ = run_cli(capsys, "compile", GOLDEN / "compile_bell.json")
    assert code == 0
    assert out == (GOLDEN / "compile_bell.hybrid.json").read_text()


def test_golden_values_are_physical():
    cnot = json.loads((GOLDEN / "qpu_cnot.expected.json").read_text())
    amps = np.array(cnot["output"]["amplitudes"])
    np.testing.assert_allclose(amps[:, 0], [0, 0, 0, 1], atol=1e-15)
    bell = json.loads((GOLDEN / "compile_bell.hybrid.expected.json").read_text())
    z = np.array([re + 1j * im for re, im in bell["output"]["amplitudes"]])
    np.testing.assert_allclose(np.abs(z) ** 2, [0.5, 0, 0, 0.5], atol=1e-12)
    assert bell["fidelity"] >= 1 - 1e-9


def test_malformed_corpus_is_complete():
    on_disk = {p.name for p in MALFORMED.glob("*.json")}
    assert on_disk == set(MALFORMED_FIELDS)
    assert len(on_disk) >= 10


@pytest.mark.parametrize("name", sorted(MALFORMED_FIELDS))
def test_malformed_rejected(capsys, name):
    code, out, err = run_cli(capsys, "run", MALFORMED / name)
    assert code in (1, 2)
    assert out == ""
    assert err.startswith("vnq: error: E_")
    assert MALFORMED_FIELDS[name] in err


def test_compile_roundtrip_program():
    spec = parse_input((GOLDEN / "compile_bell.json").read_text())
    hybrid = parse_input((GOLDEN / "compile_bell.hybrid.json").read_text())
    from vnqp.synth import compile_circuit

    assert hybrid.payload["program"] == compile_circuit(spec.payload["circuit"])


def test_output_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"sweep{i}.csv"
        assert run_cli(capsys, "sweep", "--qs", "4,8", "--targets", "20", "--seed", "3", "--format", "csv", "--out", path)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"Q,worst_infidelity,mean_infidelity\n")


def test_seed_changes_random_sweep(capsys):
    a = run_cli(capsys, "sweep", "--qs", "8", "--targets", "10", "--seed", "1")[1]
    b = run_cli(capsys, "sweep", "--qs", "8", "--targets", "10", "--seed", "2")[1]
    assert a != b


def test_stdin_input(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO((GOLDEN / "hybrid_theta.json").read_text()))
    code, out, _ = run_cli(capsys, "run", "-")
    assert code == 0
    assert out == (GOLDEN / "hybrid_theta.expected.json").read_text()


def test_selftest_passes(capsys):
    code, out, _ = run_cli(capsys, "selftest")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert len(doc["checks"]) == 8
    code, out, _ = run_cli(capsys, "selftest", "--format", "csv")
    assert out.splitlines()[0] == "check,passed,detail"


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["run", "x.json", "--format", "xml"],
        ["run", "x.json", "--tol", "abc"],
        [],
    ],
)
def test_argparse_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_usage_errors_exit_2(capsys):
    assert run_cli(capsys, "run", GOLDEN / "qpu_cnot.json", "--tol", "-1")[0] == 2
    code, _, err = run_cli(capsys, "compile", GOLDEN / "compile_bell.json", "--format", "csv")
    assert code == 2 and "E_USAGE" in err
    assert run_cli(capsys, "sweep")[0] == 2
    assert run_cli(capsys, "sweep", "--qs", "4,x")[0] == 2
    assert run_cli(capsys, "compile", GOLDEN / "qpu_cnot.json")[0] == 2


def test_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", tmp_path / "nope.json")
    assert code == 1 and "E_IO" in err


def test_tol_flag_loosens_unitarity(capsys, tmp_path):
    eps = 1e-7
    doc = {
        "mode": "qpu",
        # perturbs only the column that |0> does not reach
        "gates": ["I", [[[1, 0], [eps, 0]], [[0, 0], [1, 0]]]],
        "program": 1,
        "data": {"layout": [2], "amplitudes": [[1, 0], [0, 0]]},
    }
    path = tmp_path / "loose.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "run", path)
    assert code == 1 and "E_NOT_UNITARY" in err
    assert run_cli(capsys, "run", path, "--tol", "1e-6")[0] == 0


def test_input_error_str():
    err = InputError("E_VALUE", "bad", field="x.y", line=4)
    assert str(err) == "E_VALUE line=4 field=x.y: bad"


def test_parse_document_named_and_matrix_gates():
    named = parse_document({"mode": "qpu", "gates": ["I", "X"], "program": 1,
                            "data": {"layout": [2], "amplitudes": [[1, 0], [0, 0]]}})
    explicit = parse_document({"mode": "qpu", "gates": ["I", [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]], "program": 1,
                               "data": {"layout": [2], "amplitudes": [[1, 0], [0, 0]]}})
    np.testing.assert_array_equal(named.payload["table"].stack(), explicit.payload["table"].stack())
