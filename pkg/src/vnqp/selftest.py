"""Seeded invariant checks, runnable from the command line via ``vnq selftest``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import CNOT, H, I2, X, StateVector, cyclic_shift_matrix, dft, fidelity, random_unitary
from .hybrid import apply_hybrid_program, apply_momentum_qpu, build_momentum_qpu, theta_matrix
from .qpu import GateTable, apply_qpu, build_qpu, load_program, no_programming_witness, probe_states
from .synth import CircuitIR, Cnot, OneQubit, compile_circuit, euler_decompose, gate_fidelity, precision_sweep
from .threebus import ProgramMemory, run_program, shift_unitary_power_is_identity


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _qpu_contract(rng) -> Check:
    worst = 0.0
    for _ in range(20):
        M, N = rng.integers(1, 5), rng.integers(1, 5)
        table = GateTable.random(M, N, rng)
        psi = StateVector.random([N], rng)
        for c in range(M):
            out = apply_qpu(table, load_program(table, c, psi))
            want = load_program(table, c, StateVector([N], table[c].entries @ psi.amplitudes))
            worst = max(worst, 1 - fidelity(out, want))
    return Check("qpu_contract", worst <= 1e-12, f"max infidelity {worst:.3e}")


def _cnot_fixture(rng) -> Check:
    err = float(np.max(np.abs(build_qpu(GateTable([I2, X])).matrix.entries - CNOT.entries)))
    return Check("cnot_fixture", err <= 1e-15, f"max entry error {err:.3e}")


def _witness(rng) -> Check:
    ok = True
    for _ in range(10):
        table = GateTable.random(2, 2, rng)
        ok &= any(no_programming_witness(table, 0, 1, p).schmidt_rank == 2 for p in probe_states(2))
        phased = GateTable([table[0], np.exp(1j * rng.uniform(0, 2 * np.pi)) * table[0].entries])
        ok &= all(no_programming_witness(phased, 0, 1, p).schmidt_rank == 1 for p in probe_states(2))
    return Check("no_programming_witness", bool(ok), "10 random tables")


def _three_bus(rng) -> Check:
    worst, restored = 0.0, True
    for M, P in itertools.product((2, 3), (1, 2, 3)):
        table = GateTable.random(M, 2, rng)
        psi = StateVector.random([2], rng)
        for slots in itertools.product(range(M), repeat=P):
            mem = ProgramMemory(M, slots)
            res = run_program(table, mem, psi)
            want = psi.amplitudes
            for c in mem.execution_order:
                want = table[c].entries @ want
            worst = max(worst, float(np.max(np.abs(res.data.amplitudes - want))))
            restored &= res.program_restored
        restored &= shift_unitary_power_is_identity(M, P)
    return Check("three_bus_sequencing", worst <= 1e-10 and restored, f"max error {worst:.3e}")


def _duality(rng) -> Check:
    worst = 0.0
    for Q, axis in itertools.product((2, 4, 8, 16), (1, 2, 3)):
        dense = build_momentum_qpu(axis, Q).entries
        for col in range(2 * Q):
            s = StateVector.basis((Q, 2), col)
            worst = max(worst, float(np.max(np.abs(apply_momentum_qpu(axis, s).amplitudes - dense[:, col]))))
    F = dft(8).entries
    diag = F @ cyclic_shift_matrix(8) @ F.conj().T
    worst = max(worst, float(np.max(np.abs(diag - np.diag(np.diag(diag))))))
    return Check("position_momentum_duality", worst <= 1e-10, f"max error {worst:.3e}")


def _theta_group(rng) -> Check:
    worst = 0.0
    for a, b in rng.uniform(-2, 2, size=(200, 2)):
        for axis in (1, 2, 3):
            worst = max(worst, float(np.max(np.abs(theta_matrix(axis, a) @ theta_matrix(axis, b) - theta_matrix(axis, a + b)))))
            worst = max(worst, float(np.max(np.abs(theta_matrix(axis, a) - theta_matrix(axis, a + 1)))))
    return Check("theta_group_and_period", worst <= 1e-12, f"max error {worst:.3e}")


def _synthesis(rng) -> Check:
    worst = min(gate_fidelity(euler_decompose(U).matrix(), U) for U in (random_unitary(2, rng) for _ in range(200)))
    rows = precision_sweep([random_unitary(2, rng) for _ in range(50)], [16, 32, 64])
    monotone = all(a.worst_infidelity > b.worst_infidelity for a, b in zip(rows, rows[1:]))
    return Check("euler_synthesis", 1 - worst <= 1e-9 and monotone, f"min fidelity {worst:.15f}")


def _bell(rng) -> Check:
    prog = compile_circuit(CircuitIR(2, [OneQubit(0, H), Cnot(0, 1)]))
    out = apply_hybrid_program(prog, StateVector.basis((2, 2), 0))
    bell = StateVector((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    f = fidelity(out, bell)
    return Check("bell_fixture", f >= 1 - 1e-9, f"fidelity {f:.15f}")


CHECKS = (_qpu_contract, _cnot_fixture, _witness, _three_bus, _duality, _theta_group, _synthesis, _bell)


def run_selftest(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    return [check(rng) for check in CHECKS]
