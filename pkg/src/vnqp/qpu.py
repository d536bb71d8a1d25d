"""Finite-dimensional quantum processing unit built from conditional dynamics.

A gate table ``u_0, ..., u_{M-1}`` is wired into the block-diagonal operator
``sum_c |c><c| ⊗ u_c`` acting on ``program ⊗ data``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Sequence

import numpy as np

from .core import (
    VALID_TOL,
    DenseUnitary,
    DimensionError,
    RegisterLayout,
    StateVector,
    fidelity,
    schmidt_rank,
)


class GateTable:
    """Instruction set of a processor: ``M`` unitaries of a common size ``N``."""

    __slots__ = ("gates", "_stack")

    def __init__(self, gates: Sequence):
        gates = tuple(g if isinstance(g, DenseUnitary) else DenseUnitary(g) for g in gates)
        if not gates:
            raise DimensionError("a gate table needs at least one gate")
        dims = {g.dim for g in gates}
        if len(dims) != 1:
            raise DimensionError(f"inconsistent gate dimensions {sorted(dims)}")
        stack = np.stack([g.entries for g in gates])
        stack.flags.writeable = False
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "_stack", stack)

    def __setattr__(self, name, value):
        raise AttributeError("GateTable is immutable")

    @property
    def M(self) -> int:
        return len(self.gates)

    @property
    def N(self) -> int:
        return self.gates[0].dim

    @property
    def data_dim(self) -> int:
        return self.N

    def stack(self) -> np.ndarray:
        """Gates as an ``(M, N, N)`` array."""
        return self._stack

    def __len__(self) -> int:
        return len(self.gates)

    def __getitem__(self, c: int) -> DenseUnitary:
        return self.gates[c]

    @classmethod
    def random(cls, M: int, N: int, rng: np.random.Generator) -> "GateTable":
        from .core import random_unitary

        return cls([random_unitary(N, rng) for _ in range(M)])


@dataclass(frozen=True, eq=False)
class QpuOperator:
    table: GateTable
    matrix: DenseUnitary


def build_qpu(table: GateTable) -> QpuOperator:
    """Materialize ``sum_c |c><c| ⊗ u_c`` as an ``MN x MN`` unitary."""
    M, N = table.M, table.N
    mat = np.zeros((M * N, M * N), dtype=complex)
    for c, g in enumerate(table.gates):
        mat[c * N:(c + 1) * N, c * N:(c + 1) * N] = g.entries
    return QpuOperator(table, DenseUnitary(mat))


def extract_gate(op: QpuOperator, c: int) -> DenseUnitary:
    """Read diagonal block ``c`` back out of a QPU matrix."""
    M, N = op.table.M, op.table.N
    if not 0 <= c < M:
        raise IndexError(f"program index {c} out of range [0, {M})")
    return DenseUnitary(op.matrix.entries[c * N:(c + 1) * N, c * N:(c + 1) * N])


def apply_blocks(stack: np.ndarray, amps: np.ndarray) -> np.ndarray:
    """Blockwise conditional dynamics on an ``(..., M, N)`` amplitude array.

    The second-to-last axis is the program index selecting ``stack[c]``;
    leading axes are spectators.
    """
    return np.einsum("cij,...cj->...ci", stack, amps)


def apply_qpu(table: GateTable, s: StateVector) -> StateVector:
    """Run the processor on a ``(M, N)`` state without building the full matrix."""
    expected = (table.M, table.N)
    if s.layout.factors != expected:
        raise DimensionError(f"state layout {s.layout.factors} does not match QPU layout {expected}")
    out = apply_blocks(table.stack(), s.amplitudes.reshape(expected))
    return StateVector(s.layout, out)


def load_program(table: GateTable, program: int | StateVector, data: StateVector) -> StateVector:
    """Composite input ``|program> ⊗ |data>`` for a processor."""
    if data.dim != table.N:
        raise DimensionError(f"data register has dim {data.dim}, gates act on dim {table.N}")
    if isinstance(program, StateVector):
        if program.dim != table.M:
            raise DimensionError(f"program register has dim {program.dim}, table has {table.M} gates")
        prog = program.amplitudes
    else:
        if not 0 <= program < table.M:
            raise IndexError(f"program index {program} out of range [0, {table.M})")
        prog = np.zeros(table.M, dtype=complex)
        prog[program] = 1.0
    return StateVector(RegisterLayout((table.M, table.N)), np.kron(prog, data.amplitudes))


@dataclass(frozen=True)
class WitnessResult:
    schmidt_rank: int
    gates_parallel: bool


def parallel_schmidt_tol(fid_tol: float) -> float:
    # For (|c1>a + |c2>b)/√2 with |<a|b>| = o the smaller Schmidt coefficient is
    # sqrt((1 - o)/2); matching it to fidelity o^2 >= 1 - fid_tol keeps the
    # rank test and the parallelism test in agreement.
    return sqrt((1.0 - sqrt(1.0 - fid_tol)) / 2.0)


def no_programming_witness(
    table: GateTable, c1: int, c2: int, psi: StateVector, tol: float = VALID_TOL
) -> WitnessResult:
    """Probe whether two programs can share a non-orthogonal program state.

    Runs the processor on ``(|c1> + |c2>)/√2 ⊗ |psi>``.  The program register
    stays unentangled with the data (Schmidt rank 1) exactly when
    ``u_c1 |psi>`` and ``u_c2 |psi>`` agree up to phase.
    """
    if c1 == c2:
        raise ValueError("witness needs two distinct program indices")
    for c in (c1, c2):
        if not 0 <= c < table.M:
            raise IndexError(f"program index {c} out of range [0, {table.M})")
    if psi.dim != table.N:
        raise DimensionError(f"probe state has dim {psi.dim}, gates act on dim {table.N}")
    prog = np.zeros(table.M, dtype=complex)
    prog[[c1, c2]] = 1 / np.sqrt(2)
    out = apply_qpu(table, load_program(table, StateVector([table.M], prog), psi))
    rank = schmidt_rank(out, 1, tol=parallel_schmidt_tol(tol))
    a = StateVector(psi.layout, table[c1].entries @ psi.amplitudes)
    b = StateVector(psi.layout, table[c2].entries @ psi.amplitudes)
    return WitnessResult(rank, fidelity(a, b) >= 1 - tol)


def probe_states(N: int, count: int = 12, seed: int = 0) -> list[StateVector]:
    """Fixed probe set: basis states, pairwise superpositions, then seeded random fill."""
    layout = RegisterLayout([N])
    probes = [StateVector.basis(layout, i) for i in range(N)]
    for j in range(1, N):
        for phase in (1, -1, 1j, -1j):
            v = np.zeros(N, dtype=complex)
            v[0], v[j] = 1, phase
            probes.append(StateVector.from_unnormalized(layout, v))
    rng = np.random.default_rng(seed)
    while len(probes) < count:
        probes.append(StateVector.random(layout, rng))
    return probes[:count]
