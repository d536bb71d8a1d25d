"""Compile single-qubit unitaries and small circuits into hybrid programs.

A target ``U`` is written as ``θ3(q3) θ2(q2) θ1(q1) = e^{iφ} U`` with rotations
about x, then y, then z.  Since ``θ(q + 1/2) = -θ(q)``, every parameter is
only needed on ``[0, 1/2)``; the sign goes into the global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    CNOT,
    PAULI,
    DenseUnitary,
    DimensionError,
    StateVector,
    apply,
    unitarity_deviation,
)
from .hybrid import Entangler, HybridLayer, HybridProgram, apply_hybrid_program, theta_matrix, triple_matrix

# Below this |cos| of the middle rotation the first and last axes are
# treated as collinear and the first parameter is pinned to zero.
GIMBAL_TOL = 1e-12
_HALF_SNAP = 1e-13


@dataclass(frozen=True)
class EulerTriple:
    q1: float
    q2: float
    q3: float
    global_phase: float = 0.0

    @property
    def params(self) -> tuple[float, float, float]:
        return (self.q1, self.q2, self.q3)

    def matrix(self) -> np.ndarray:
        """The rotation product ``θ3 θ2 θ1`` (without the phase correction)."""
        return triple_matrix(self.q1, self.q2, self.q3)

    def target(self) -> np.ndarray:
        """``e^{-iφ} θ3 θ2 θ1``, i.e. the decomposed unitary itself."""
        return np.exp(-1j * self.global_phase) * self.matrix()


def _half_turn(q: float) -> float:
    q = q % 0.5
    return 0.0 if q > 0.5 - _HALF_SNAP else q


def _adjoint(V: np.ndarray) -> np.ndarray:
    """SO(3) image ``R_ab = tr(σ_a V σ_b V†)/2``."""
    paulis = [PAULI[j].entries for j in (1, 2, 3)]
    return np.array(
        [[0.5 * np.trace(a @ V @ b @ V.conj().T).real for b in paulis] for a in paulis]
    )


def euler_decompose(U, tol: float = 1e-10) -> EulerTriple:
    """Parameters ``(q1, q2, q3)`` in ``[0, 1/2)`` and phase ``φ`` in ``[0, 2π)``.

    ``θ_j(q)`` is the rotation by ``-4πq`` about axis ``j``, so the x and y
    angles are read off the last row of the rotation matrix; the z angle is
    taken from the residual ``U θ1† θ2†``, which keeps the result accurate
    near the collinear (gimbal) configuration ``q2 ∈ {1/8, 3/8}``.  There the
    first parameter is fixed to 0 and the whole residual goes to ``q3``.
    """
    U = U.entries if isinstance(U, DenseUnitary) else np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 unitary, got shape {U.shape}")
    dev = unitarity_deviation(U)
    if dev > tol:
        raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")

    V = U / np.sqrt(np.linalg.det(U))
    R = _adjoint(V)
    # Last row of Rz(a3) Ry(a2) Rx(a1) is (-sin a2, cos a2 sin a1, cos a2 cos a1).
    cos2 = math.hypot(R[2, 1], R[2, 2])
    a2 = math.atan2(-R[2, 0], cos2)
    a1 = 0.0 if cos2 < GIMBAL_TOL else math.atan2(R[2, 1], R[2, 2])
    q1 = _half_turn(-a1 / (4 * math.pi))
    q2 = _half_turn(-a2 / (4 * math.pi))

    resid = U @ theta_matrix(1, q1).conj().T @ theta_matrix(2, q2).conj().T
    # resid ∝ diag(e^{2πi q3}, e^{-2πi q3})
    q3 = _half_turn(float(np.angle(resid[0, 0] * np.conj(resid[1, 1]))) / (4 * math.pi))

    W = triple_matrix(q1, q2, q3)
    phase = float(np.angle(np.trace(W @ U.conj().T))) % (2 * math.pi)
    if phase >= 2 * math.pi - 1e-15:
        phase = 0.0
    return EulerTriple(q1, q2, q3, phase)


def gate_fidelity(A, B) -> float:
    """Phase-insensitive overlap ``|tr(A B†)| / d``."""
    A = np.asarray(A.entries if isinstance(A, DenseUnitary) else A)
    B = np.asarray(B.entries if isinstance(B, DenseUnitary) else B)
    return float(abs(np.trace(A @ B.conj().T)) / A.shape[0])


def infidelity(A, B) -> float:
    return max(0.0, 1.0 - gate_fidelity(A, B) ** 2)


def quantize_param(q: float, Q: int) -> float:
    """Nearest grid point ``k/Q``; halfway cases go to the smaller ``k``."""
    if Q < 1:
        raise ValueError("grid resolution Q must be >= 1")
    k = math.ceil(q * Q - 0.5)
    return (k % Q) / Q


def quantize(t: EulerTriple, Q: int) -> EulerTriple:
    return EulerTriple(*(quantize_param(q, Q) for q in t.params), t.global_phase)


@dataclass(frozen=True)
class SweepRow:
    Q: int
    worst_infidelity: float
    mean_infidelity: float


def precision_sweep(targets: Sequence, Qs: Sequence[int]) -> list[SweepRow]:
    """Infidelity of grid-quantized decompositions, one row per resolution."""
    if not targets or not Qs:
        raise ValueError("precision sweep needs at least one target and one grid size")
    mats = [np.asarray(t.entries if isinstance(t, DenseUnitary) else t, dtype=complex) for t in targets]
    triples = [euler_decompose(U) for U in mats]
    rows = []
    for Q in Qs:
        errs = np.array([infidelity(quantize(t, Q).matrix(), U) for t, U in zip(triples, mats)])
        rows.append(SweepRow(int(Q), float(errs.max()), float(errs.mean())))
    return rows


# Circuit IR ---------------------------------------------------------------


@dataclass(frozen=True)
class OneQubit:
    qubit: int
    matrix: DenseUnitary


@dataclass(frozen=True)
class Cnot:
    control: int
    target: int


class CircuitIR:
    """Ordered 1q-unitary / CNOT instruction list on ``n_qubits`` qubits."""

    __slots__ = ("n_qubits", "instructions")

    def __init__(self, n_qubits: int, instructions: Sequence = ()):
        if n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        instrs = []
        for ins in instructions:
            if isinstance(ins, OneQubit):
                mat = ins.matrix if isinstance(ins.matrix, DenseUnitary) else DenseUnitary(ins.matrix)
                if mat.dim != 2:
                    raise DimensionError(f"1q instruction needs a 2x2 matrix, got dim {mat.dim}")
                _check_qubit(ins.qubit, n_qubits)
                instrs.append(OneQubit(ins.qubit, mat))
            elif isinstance(ins, Cnot):
                _check_qubit(ins.control, n_qubits)
                _check_qubit(ins.target, n_qubits)
                if ins.control == ins.target:
                    raise ValueError("CNOT control and target must differ")
                instrs.append(ins)
            else:
                raise TypeError(f"unknown instruction {ins!r}")
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "instructions", tuple(instrs))

    def __setattr__(self, name, value):
        raise AttributeError("CircuitIR is immutable")

    def unitary(self) -> np.ndarray:
        """Dense circuit unitary (qubit 0 most significant)."""
        n = self.n_qubits
        dim = 2 ** n
        U = np.eye(dim, dtype=complex)
        for ins in self.instructions:
            if isinstance(ins, OneQubit):
                op = np.kron(np.kron(np.eye(2 ** ins.qubit), ins.matrix.entries), np.eye(2 ** (n - ins.qubit - 1)))
            else:
                op = _cnot_dense(n, ins.control, ins.target)
            U = op @ U
        return U

    def apply(self, s: StateVector) -> StateVector:
        for ins in self.instructions:
            if isinstance(ins, OneQubit):
                s = apply(ins.matrix, s, [ins.qubit])
            else:
                s = apply(CNOT, s, [ins.control, ins.target])
        return s


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise ValueError(f"qubit index {q} out of range [0, {n})")


def _cnot_dense(n: int, control: int, target: int) -> np.ndarray:
    dim = 2 ** n
    idx = np.arange(dim)
    cbit = (idx >> (n - 1 - control)) & 1
    out = np.where(cbit == 1, idx ^ (1 << (n - 1 - target)), idx)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[out, idx] = 1.0
    return mat


def compile_circuit(circ: CircuitIR) -> HybridProgram:
    """Translate a circuit into layers of rotation triples and entangler bits.

    Each 1q instruction becomes its own triple (no merging).  A layer takes
    rotations on distinct qubits until an entangler is appended; a later
    rotation, or a second rotation on a qubit already used, opens a new layer.
    """
    n = circ.n_qubits
    layers: list[HybridLayer] = []
    rots: list[tuple[float, float, float]] = [(0.0, 0.0, 0.0)] * n
    used: set[int] = set()
    ents: list[Entangler] = []

    def flush():
        nonlocal rots, used, ents
        if used or ents:
            layers.append(HybridLayer(tuple(rots), tuple(ents)))
        rots, used, ents = [(0.0, 0.0, 0.0)] * n, set(), []

    for ins in circ.instructions:
        if isinstance(ins, OneQubit):
            if ents or ins.qubit in used:
                flush()
            rots[ins.qubit] = euler_decompose(ins.matrix).params
            used.add(ins.qubit)
        else:
            ents.append(Entangler(1, ins.control, ins.target))
    flush()
    return HybridProgram(n, tuple(layers))


def program_unitary(prog: HybridProgram) -> np.ndarray:
    """Dense unitary of a hybrid program, column by column."""
    dim = 2 ** prog.n_qubits
    cols = [
        apply_hybrid_program(prog, StateVector.basis([2] * prog.n_qubits, i)).amplitudes
        for i in range(dim)
    ]
    return np.stack(cols, axis=1)
