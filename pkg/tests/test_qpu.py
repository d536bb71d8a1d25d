import numpy as np
import pytest

from vnqp.core import CNOT, I2, X, DenseUnitary, DimensionError, StateVector, fidelity, random_unitary, tensor
from vnqp.qpu import (
    GateTable,
    apply_qpu,
    build_qpu,
    extract_gate,
    load_program,
    no_programming_witness,
    parallel_schmidt_tol,
    probe_states,
)

cnot_table = GateTable([I2, X])


def test_build_qpu_is_cnot():
    assert np.max(np.abs(build_qpu(cnot_table).matrix.entries - CNOT.entries)) == 0.0


def test_build_qpu_single_block(rng):
    U = random_unitary(3, rng)
    np.testing.assert_array_equal(build_qpu(GateTable([U])).matrix.entries, U.entries)


def test_build_qpu_block_structure(rng):
    table = GateTable.random(3, 2, rng)
    mat = build_qpu(table).matrix.entries
    # dense multiplication oracle for unitarity
    assert np.max(np.abs(mat.conj().T @ mat - np.eye(6))) <= 1e-12
    for c in range(3):
        for c2 in range(3):
            block = mat[2 * c:2 * c + 2, 2 * c2:2 * c2 + 2]
            if c != c2:
                assert np.all(block == 0)
            else:
                np.testing.assert_array_equal(block, table[c].entries)


def test_gate_table_rejects_mixed_dims(rng):
    with pytest.raises(DimensionError):
        GateTable([I2, random_unitary(3, rng)])
    with pytest.raises(DimensionError):
        GateTable([])


def test_apply_qpu_examples(rng):
    out = apply_qpu(cnot_table, load_program(cnot_table, 1, StateVector.basis([2], 0)))
    np.testing.assert_array_equal(out.amplitudes, StateVector.basis([2, 2], (1, 1)).amplitudes)
    psi = StateVector.random([2], rng)
    table = GateTable([I2, random_unitary(2, rng)])
    s = load_program(table, 0, psi)
    np.testing.assert_allclose(apply_qpu(table, s).amplitudes, s.amplitudes, atol=1e-15)


@pytest.mark.parametrize("M,N", [(1, 2), (2, 3), (3, 2), (4, 4)])
def test_apply_qpu_matches_dense(rng, M, N):
    table = GateTable.random(M, N, rng)
    s = StateVector.random([M, N], rng)
    dense = build_qpu(table).matrix.entries @ s.amplitudes
    assert np.max(np.abs(apply_qpu(table, s).amplitudes - dense)) <= 1e-12


def test_apply_qpu_layout_mismatch(rng):
    with pytest.raises(DimensionError):
        apply_qpu(cnot_table, StateVector.random([2, 3], rng))


def test_deterministic_program_contract(rng):
    for _ in range(20):
        M, N = rng.integers(1, 5, size=2)
        table = GateTable.random(M, N, rng)
        psi = StateVector.random([N], rng)
        for c in range(M):
            want = tensor(StateVector.basis([M], c), StateVector([N], table[c].entries @ psi.amplitudes))
            assert fidelity(apply_qpu(table, load_program(table, c, psi)), want) >= 1 - 1e-12


def test_apply_qpu_linearity(rng):
    table = GateTable.random(3, 2, rng)
    a, b = StateVector.random([3, 2], rng), StateVector.random([3, 2], rng)
    alpha, beta = 0.6, 0.8j
    mix = StateVector.from_unnormalized([3, 2], alpha * a.amplitudes + beta * b.amplitudes)
    norm = np.linalg.norm(alpha * a.amplitudes + beta * b.amplitudes)
    combined = (alpha * apply_qpu(table, a).amplitudes + beta * apply_qpu(table, b).amplitudes) / norm
    np.testing.assert_allclose(apply_qpu(table, mix).amplitudes, combined, atol=1e-12)


def test_extract_gate_roundtrip(rng):
    op = build_qpu(cnot_table)
    np.testing.assert_array_equal(extract_gate(op, 0).entries, I2.entries)
    np.testing.assert_array_equal(extract_gate(op, 1).entries, X.entries)
    table = GateTable.random(4, 3, rng)
    op = build_qpu(table)
    for c in range(4):
        np.testing.assert_array_equal(extract_gate(op, c).entries, table[c].entries)
    with pytest.raises(IndexError):
        extract_gate(op, 4)


def test_witness_equal_gates(rng):
    table = GateTable([I2, I2])
    for p in probe_states(2):
        assert no_programming_witness(table, 0, 1, p) == no_programming_witness(table, 1, 0, p)
        w = no_programming_witness(table, 0, 1, p)
        assert (w.schmidt_rank, w.gates_parallel) == (1, True)


def test_witness_cnot_on_zero():
    w = no_programming_witness(cnot_table, 0, 1, StateVector.basis([2], 0))
    assert (w.schmidt_rank, w.gates_parallel) == (2, False)


@pytest.mark.parametrize("phi", [0.0, 0.3, np.pi / 2, 2.5, np.pi])
def test_witness_global_phase(rng, phi):
    U = random_unitary(2, rng)
    table = GateTable([U, DenseUnitary(np.exp(1j * phi) * U.entries)])
    psi = StateVector.random([2], rng)
    w = no_programming_witness(table, 0, 1, psi)
    # SVD oracle: the output matrix is rank one up to rounding
    out = apply_qpu(table, load_program(table, StateVector([2], [1 / np.sqrt(2)] * 2), psi))
    sv = np.linalg.svd(out.amplitudes.reshape(2, 2), compute_uv=False)
    assert sv[1] < 1e-12
    assert (w.schmidt_rank, w.gates_parallel) == (1, True)


def test_witness_rank_agrees_with_parallel(rng):
    # Contract: rank 1 iff parallel, including near the fidelity threshold.
    for eps in (0.0, 1e-13, 1e-11, 1e-9, 1e-6, 1e-2, 1.0):
        gate = DenseUnitary([[np.exp(1j * eps), 0], [0, np.exp(-1j * eps)]])
        table = GateTable([I2, gate])
        plus = StateVector([2], [1 / np.sqrt(2)] * 2)
        w = no_programming_witness(table, 0, 1, plus)
        assert (w.schmidt_rank == 1) == w.gates_parallel


def test_parallel_tol_matches_fidelity_threshold():
    tol = parallel_schmidt_tol(1e-10)
    # smallest Schmidt coefficient sqrt((1-o)/2) at o = sqrt(1 - 1e-10)
    assert tol == pytest.approx(np.sqrt((1 - np.sqrt(1 - 1e-10)) / 2))
    assert 4.9e-6 < tol < 5.1e-6


def test_no_programming_property(rng):
    for _ in range(20):
        table = GateTable.random(3, 2, rng)
        assert any(no_programming_witness(table, 0, 2, p).schmidt_rank == 2 for p in probe_states(2))


def test_probe_states_fixed():
    a, b = probe_states(3), probe_states(3)
    assert len(a) == 12
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.amplitudes, y.amplitudes)


def test_witness_errors(rng):
    with pytest.raises(ValueError):
        no_programming_witness(cnot_table, 1, 1, StateVector.basis([2], 0))
    with pytest.raises(DimensionError):
        no_programming_witness(cnot_table, 0, 1, StateVector.basis([3], 0))
