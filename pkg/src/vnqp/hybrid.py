"""Hybrid processors: continuous program variables steering qubit rotations.

Each continuous variable lives on the circle ``[0, 1)`` (the rotation family
``exp(2πi q σ_j)`` has period 1 in ``q``) and is discretized to the uniform
grid ``q_k = k/Q``.  The position basis is the grid basis; the momentum basis
is its unitary DFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import (
    CNOT,
    PAULI,
    DenseUnitary,
    DimensionError,
    RegisterLayout,
    StateVector,
    apply,
)
from .qpu import GateTable, QpuOperator, apply_blocks, build_qpu


def _turns_sincos(q: float) -> tuple[float, float]:
    """``(cos 2πq, sin 2πq)`` with exact values at quarter turns."""
    q = float(q) % 1.0
    quarter = round(4.0 * q)
    frac = (4.0 * q - quarter) * (math.pi / 2.0)
    c, s = math.cos(frac), math.sin(frac)
    for _ in range(quarter % 4):
        c, s = -s, c
    return c, s


def _axis(fam) -> int:
    axis = fam.axis if isinstance(fam, RotationFamily) else fam
    if axis not in PAULI:
        raise ValueError(f"rotation axis must be 1, 2 or 3, got {axis!r}")
    return int(axis)


@dataclass(frozen=True)
class RotationFamily:
    """One-parameter family ``q -> exp(2πi q σ_axis)``; axis 1, 2, 3 = x, y, z."""

    axis: int

    def __post_init__(self):
        _axis(self.axis)

    def gate(self, q: float) -> DenseUnitary:
        return theta_gate(self.axis, q)


def theta_matrix(axis: int, q: float) -> np.ndarray:
    c, s = _turns_sincos(q)
    return c * np.eye(2, dtype=complex) + 1j * s * PAULI[_axis(axis)].entries


def theta_gate(axis, q: float) -> DenseUnitary:
    """``exp(2πi q σ_axis) = cos(2πq) I + i sin(2πq) σ_axis``, with ``q`` taken mod 1."""
    return DenseUnitary(theta_matrix(_axis(axis), q))


def grid_values(Q: int) -> np.ndarray:
    if Q < 1:
        raise ValueError("grid resolution Q must be >= 1")
    return np.arange(Q) / Q


def grid_index(q: float, Q: int, tol: float = 1e-9) -> int:
    """Grid point ``k`` with ``k/Q == q``; raises if ``q`` is off-grid."""
    x = (float(q) % 1.0) * Q
    k = round(x)
    if abs(x - k) > tol:
        raise ValueError(f"parameter {q!r} is not on the Q={Q} grid")
    return k % Q


def position_table(fam, Q: int) -> GateTable:
    axis = _axis(fam)
    return GateTable([theta_gate(axis, q) for q in grid_values(Q)])


def build_position_qpu(fam, Q: int) -> QpuOperator:
    """``sum_k |q_k><q_k| ⊗ θ(q_k)`` on ``grid ⊗ qubit``."""
    return build_qpu(position_table(fam, Q))


def momentum_basis(Q: int) -> np.ndarray:
    """Columns are the momentum states ``|p_k>_j = exp(2πi jk/Q)/√Q``."""
    jk = np.outer(np.arange(Q), np.arange(Q)) % Q
    return np.exp(2j * np.pi * jk / Q) / math.sqrt(Q)


def build_momentum_qpu(fam, Q: int) -> DenseUnitary:
    """``sum_k |p_k><p_k| ⊗ θ(k/Q)`` assembled directly from momentum projectors."""
    axis = _axis(fam)
    basis = momentum_basis(Q)
    mat = np.zeros((2 * Q, 2 * Q), dtype=complex)
    for k in range(Q):
        proj = np.outer(basis[:, k], basis[:, k].conj())
        mat += np.kron(proj, theta_matrix(axis, k / Q))
    return DenseUnitary(mat)


def apply_position_qpu(fam, s: StateVector) -> StateVector:
    Q = s.layout.factors[0]
    if s.layout.factors != (Q, 2):
        raise DimensionError(f"expected layout (Q, 2), got {s.layout.factors}")
    return StateVector(s.layout, apply_blocks(position_table(fam, Q).stack(), s.tensor()))


def apply_momentum_qpu(fam, s: StateVector) -> StateVector:
    """Momentum-controlled rotation on a ``(Q, 2)`` state.

    The program register is transformed to momentum coordinates, the
    blockwise rotation ``θ(k/Q)`` fires on momentum label ``k``, and the
    register is transformed back: ``(F† ⊗ I) QPU_pos (F ⊗ I)``.
    """
    f = s.layout.factors
    if len(f) != 2 or f[1] != 2:
        raise DimensionError(f"expected layout (Q, 2), got {f}")
    Q = f[0]
    mom = np.fft.fft(s.tensor(), axis=0, norm="ortho")
    mom = apply_blocks(position_table(fam, Q).stack(), mom)
    return StateVector(s.layout, np.fft.ifft(mom, axis=0, norm="ortho"))


@dataclass(frozen=True)
class Entangler:
    """CNOT(control -> target), fired iff ``bit`` is 1."""

    bit: int
    control: int
    target: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"entangler bit must be 0 or 1, got {self.bit!r}")
        if self.control == self.target:
            raise ValueError("entangler control and target must differ")


@dataclass(frozen=True)
class HybridLayer:
    """One processing unit: a rotation triple per qubit, then entanglers in order."""

    rotations: tuple[tuple[float, float, float], ...]
    entanglers: tuple[Entangler, ...] = ()

    def __post_init__(self):
        rots = tuple(tuple(float(q) for q in r) for r in self.rotations)
        for r in rots:
            if len(r) != 3:
                raise ValueError(f"each qubit needs three rotation parameters, got {r}")
            if any(not 0.0 <= q < 1.0 for q in r):
                raise ValueError(f"rotation parameters must lie in [0, 1), got {r}")
        object.__setattr__(self, "rotations", rots)
        object.__setattr__(self, "entanglers", tuple(self.entanglers))

    @classmethod
    def identity(cls, n_qubits: int) -> "HybridLayer":
        return cls(((0.0, 0.0, 0.0),) * n_qubits)


@dataclass(frozen=True)
class HybridProgram:
    n_qubits: int
    layers: tuple[HybridLayer, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.n_qubits < 1:
            raise ValueError("a hybrid program needs at least one data qubit")
        for layer in self.layers:
            if len(layer.rotations) != self.n_qubits:
                raise ValueError(
                    f"layer has {len(layer.rotations)} rotation triples for {self.n_qubits} qubits"
                )
            for e in layer.entanglers:
                for q in (e.control, e.target):
                    if not 0 <= q < self.n_qubits:
                        raise ValueError(f"entangler qubit {q} out of range [0, {self.n_qubits})")

    @classmethod
    def single(cls, rotations, entanglers: Iterable[Entangler] = ()) -> "HybridProgram":
        layer = HybridLayer(tuple(rotations), tuple(entanglers))
        return cls(len(layer.rotations), (layer,))


def triple_matrix(q1: float, q2: float, q3: float) -> np.ndarray:
    """``θ3(q3) θ2(q2) θ1(q1)``: the first parameter acts first."""
    return theta_matrix(3, q3) @ theta_matrix(2, q2) @ theta_matrix(1, q1)


def apply_hybrid_program(prog: HybridProgram, data: StateVector) -> StateVector:
    """Run a program written into basis/position states of the program register.

    Such a program register never entangles with the data, so only the data
    register is tracked.
    """
    if data.layout.factors != (2,) * prog.n_qubits:
        raise DimensionError(
            f"data layout {data.layout.factors} is not {prog.n_qubits} qubits"
        )
    s = data
    for layer in prog.layers:
        for qubit, triple in enumerate(layer.rotations):
            if any(triple):
                s = apply(DenseUnitary(triple_matrix(*triple)), s, [qubit])
        for e in layer.entanglers:
            if e.bit:
                s = apply(CNOT, s, [e.control, e.target])
    return s


def figure_controls(n_qubits: int) -> tuple[tuple[int, int], ...]:
    """Three continuous variables per qubit driving axes 1, 2, 3 in turn."""
    return tuple((qubit, axis) for qubit in range(n_qubits) for axis in (1, 2, 3))


class HybridState:
    """Joint state of a hybrid program register and ``m`` data qubits.

    Factor order: ``k`` continuous variables (``Q`` grid points each), then
    one qubit per discrete entangler switch, then the data qubits.
    ``controls[v] = (qubit, axis)`` names the rotation driven by variable
    ``v``; ``switches[s] = (control, target)`` names the CNOT gated by switch
    ``s``.
    """

    __slots__ = ("Q", "m", "controls", "switches", "state")

    def __init__(self, Q: int, m: int, controls, switches, state: StateVector):
        controls = tuple((int(q), _axis(a)) for q, a in controls)
        switches = tuple((int(c), int(t)) for c, t in switches)
        for q, _ in controls:
            if not 0 <= q < m:
                raise ValueError(f"control drives qubit {q}, outside [0, {m})")
        for c, t in switches:
            if c == t or not (0 <= c < m and 0 <= t < m):
                raise ValueError(f"invalid entangler pair ({c}, {t}) for {m} qubits")
        expected = hybrid_layout(Q, len(controls), len(switches), m)
        if state.layout != expected:
            raise DimensionError(f"state layout {state.layout.factors} is not {expected.factors}")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "switches", switches)
        object.__setattr__(self, "state", state)

    def __setattr__(self, name, value):
        raise AttributeError("HybridState is immutable")

    @property
    def k(self) -> int:
        return len(self.controls)

    @property
    def program_cut(self) -> int:
        """Factor index separating program factors from data qubits."""
        return len(self.controls) + len(self.switches)

    def with_state(self, state: StateVector) -> "HybridState":
        return HybridState(self.Q, self.m, self.controls, self.switches, state)

    @classmethod
    def from_program(cls, prog: HybridProgram, Q: int, data: StateVector) -> "HybridState":
        """Write a single-layer program into grid/switch basis states next to ``data``."""
        if len(prog.layers) != 1:
            raise ValueError("only single-layer programs map onto one hybrid register")
        layer = prog.layers[0]
        digits = [grid_index(q, Q) for triple in layer.rotations for q in triple]
        digits += [e.bit for e in layer.entanglers]
        switches = [(e.control, e.target) for e in layer.entanglers]
        layout = hybrid_layout(Q, 3 * prog.n_qubits, len(switches), prog.n_qubits)
        ctrl = StateVector.basis(RegisterLayout(layout.factors[: len(digits)]), digits)
        state = StateVector(layout, np.kron(ctrl.amplitudes, data.amplitudes))
        return cls(Q, prog.n_qubits, figure_controls(prog.n_qubits), switches, state)


def hybrid_layout(Q: int, k: int, n_switches: int, m: int) -> RegisterLayout:
    return RegisterLayout((Q,) * k + (2,) * n_switches + (2,) * m)


def apply_hybrid_program_superposed(hs: HybridState) -> HybridState:
    """Controlled dynamics with the program register in an arbitrary state.

    Rotations fire in ``controls`` order, each blockwise in its variable's grid
    basis; switch-gated CNOTs follow in ``switches`` order.
    """
    k, e = hs.k, len(hs.switches)
    t = np.array(hs.state.tensor())
    last = t.ndim
    for v, (qubit, axis) in enumerate(hs.controls):
        qa = k + e + qubit
        blocks = position_table(axis, hs.Q).stack()
        moved = np.moveaxis(t, (v, qa), (last - 2, last - 1))
        t = np.moveaxis(apply_blocks(blocks, moved), (last - 2, last - 1), (v, qa))
    for s, (c, tgt) in enumerate(hs.switches):
        sa, ca, ta = k + s, k + e + c, k + e + tgt
        sel = [slice(None)] * last
        sel[sa] = 1
        sel[ca] = 1
        # Indexing drops the switch and control axes; shift the target axis accordingly.
        ta_sub = ta - sum(1 for a in (sa, ca) if a < ta)
        t[tuple(sel)] = np.flip(t[tuple(sel)], axis=ta_sub).copy()
    return hs.with_state(StateVector(hs.state.layout, t))
