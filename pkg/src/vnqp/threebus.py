"""Three-bus sequencing: program memory, cyclic shift and compound steps.

The pseudo-classical bus holds ``P`` instruction slots ``(c_P, ..., c_1)`` as a
single factor of dimension ``M**P`` (``c_P`` most significant).  The
intermediate bus holds the current instruction ``c_0``.  Together the two
buses index the ``(P+1)``-digit base-``M`` number ``c_P ... c_1 c_0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import DimensionError, RegisterLayout, StateVector
from .qpu import GateTable, apply_blocks


@dataclass(frozen=True)
class ProgramMemory:
    """Instruction slots ``(c_P, ..., c_1)`` plus the current instruction ``c_0``.

    ``slots`` is written in register order, so ``slots[-1]`` is ``c_1``, the
    first instruction to fire.
    """

    M: int
    slots: tuple[int, ...]
    current: int = 0

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(int(c) for c in self.slots))
        if self.M < 1:
            raise ValueError("instruction-set size M must be >= 1")
        if not self.slots:
            raise ValueError("program memory needs at least one slot")
        for c in self.slots + (self.current,):
            if not 0 <= c < self.M:
                raise ValueError(f"instruction index {c} out of range [0, {self.M})")

    @classmethod
    def from_sequence(cls, M: int, instructions: Sequence[int], current: int = 0) -> "ProgramMemory":
        """Memory that fires ``instructions`` in the given (execution) order."""
        return cls(M, tuple(reversed(tuple(instructions))), current)

    @property
    def P(self) -> int:
        return len(self.slots)

    @property
    def execution_order(self) -> tuple[int, ...]:
        """Instructions in firing order ``c_1, ..., c_P``."""
        return tuple(reversed(self.slots))

    def digits(self) -> tuple[int, ...]:
        return self.slots + (self.current,)

    def index(self) -> int:
        """Flat index of ``|p; c>`` on ``H_p ⊗ H_c``."""
        return RegisterLayout((self.M,) * (self.P + 1)).index(self.digits())


def three_bus_layout(M: int, P: int, N: int) -> RegisterLayout:
    return RegisterLayout((M ** P, M, N))


def shift_permutation(M: int, P: int) -> np.ndarray:
    """Index map of the right cyclic shift on ``H_p ⊗ H_c``.

    ``|c_P, ..., c_1; c_0> -> |c_0, c_P, ..., c_2; c_1>``: the last base-``M``
    digit moves to the front.
    """
    idx = np.arange(M ** (P + 1))
    return idx // M + (idx % M) * M ** P


class ReversibleIndexUpdate:
    """Bijection on ``(P+1)``-tuples of instruction indices, stored as a permutation
    of flat indices ``c_P ... c_0`` (base ``M``)."""

    __slots__ = ("M", "P", "perm")

    def __init__(self, M: int, P: int, perm: Sequence[int]):
        perm = np.asarray(perm, dtype=np.int64).reshape(-1)
        size = M ** (P + 1)
        if perm.size != size:
            raise ValueError(f"update must map all {size} index tuples, got {perm.size} entries")
        if perm.min(initial=0) < 0 or perm.max(initial=0) >= size:
            raise ValueError("update maps outside the index domain")
        if np.unique(perm).size != size:
            raise ValueError("index update is not a bijection")
        perm.flags.writeable = False
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "perm", perm)

    def __setattr__(self, name, value):
        raise AttributeError("ReversibleIndexUpdate is immutable")

    @classmethod
    def from_function(
        cls, M: int, P: int, fn: Callable[[tuple[int, ...]], Sequence[int]]
    ) -> "ReversibleIndexUpdate":
        """Tabulate ``fn`` over all digit tuples ``(c_P, ..., c_0)``."""
        layout = RegisterLayout((M,) * (P + 1))
        perm = [layout.index(tuple(fn(layout.digits(i)))) for i in range(layout.total_dim)]
        return cls(M, P, perm)

    @classmethod
    def cyclic_shift(cls, M: int, P: int) -> "ReversibleIndexUpdate":
        return cls(M, P, shift_permutation(M, P))

    @classmethod
    def identity(cls, M: int, P: int) -> "ReversibleIndexUpdate":
        return cls(M, P, np.arange(M ** (P + 1)))

    def then(self, other: "ReversibleIndexUpdate") -> "ReversibleIndexUpdate":
        """Apply ``self`` first, then ``other``."""
        return ReversibleIndexUpdate(self.M, self.P, other.perm[self.perm])

    def __call__(self, digits: Sequence[int]) -> tuple[int, ...]:
        layout = RegisterLayout((self.M,) * (self.P + 1))
        return layout.digits(int(self.perm[layout.index(digits)]))


def _permute_control(perm: np.ndarray, amps: np.ndarray, data_dim: int) -> np.ndarray:
    amps = amps.reshape(perm.size, data_dim)
    out = np.empty_like(amps)
    out[perm] = amps
    return out


def _check_control(s: StateVector, M: int, N: int | None = None) -> int:
    f = s.layout.factors
    if len(f) < 2 or f[1] != M:
        raise DimensionError(f"layout {f} is not (M**P, M, ...) for M={M}")
    P = round(np.log(f[0]) / np.log(M)) if M > 1 else None
    if M > 1 and M ** P != f[0]:
        raise DimensionError(f"program-memory factor {f[0]} is not a power of M={M}")
    if N is not None and (len(f) != 3 or f[2] != N):
        raise DimensionError(f"layout {f} does not end in a data factor of dim {N}")
    return P


def shft(s: StateVector, M: int) -> StateVector:
    """Right cyclic shift on the two program buses of a ``(M**P, M[, N])`` state."""
    P = _check_control(s, M)
    if M == 1:
        return s
    data_dim = s.dim // (M ** (P + 1))
    out = _permute_control(shift_permutation(M, P), s.amplitudes, data_dim)
    return StateVector(s.layout, out)


def shift_unitary_power_is_identity(M: int, P: int) -> bool:
    """Whether ``P+1`` shift applications return every index to itself."""
    perm = shift_permutation(M, P)
    cur = np.arange(perm.size)
    for _ in range(P + 1):
        cur = perm[cur]
    return bool(np.array_equal(cur, np.arange(perm.size)))


def step(table: GateTable, s: StateVector) -> StateVector:
    """One compound step: shift the program buses, then fire the QPU on ``c_0``."""
    P = _check_control(s, table.M, table.N)
    shifted = shft(s, table.M)
    amps = shifted.amplitudes.reshape(s.layout.factors)
    return StateVector(s.layout, apply_blocks(table.stack(), amps))


def load_memory(table: GateTable, mem: ProgramMemory, psi: StateVector) -> StateVector:
    if mem.M != table.M:
        raise DimensionError(f"program memory uses M={mem.M}, table has {table.M} gates")
    if psi.dim != table.N:
        raise DimensionError(f"data register has dim {psi.dim}, gates act on dim {table.N}")
    ctrl = np.zeros(table.M ** (mem.P + 1), dtype=complex)
    ctrl[mem.index()] = 1.0
    return StateVector(three_bus_layout(table.M, mem.P, table.N), np.kron(ctrl, psi.amplitudes))


@dataclass(frozen=True, eq=False)
class RunResult:
    data: StateVector
    program_restored: bool
    final: StateVector


def run_program(table: GateTable, mem: ProgramMemory, psi: StateVector) -> RunResult:
    """Execute ``P`` compound steps, then one bare shift to restore the buses.

    ``P`` shifts of the ``P+1`` cyclic slots leave the memory rotated by one
    position, hence the trailing shift.
    """
    s0 = load_memory(table, mem, psi)
    s = s0
    for _ in range(mem.P):
        s = step(table, s)
    s = shft(s, table.M)
    block = s.amplitudes.reshape(-1, table.N)
    weights = np.linalg.norm(block, axis=1)
    restored = bool(abs(weights[mem.index()] - 1.0) <= 1e-12)
    # Unrestored buses: report the dominant branch so the caller still sees data.
    j = mem.index() if restored else int(np.argmax(weights))
    return RunResult(StateVector.from_unnormalized([table.N], block[j]), restored, s)


def run_with_update(
    table: GateTable,
    upd: ReversibleIndexUpdate,
    init: Sequence[int],
    psi: StateVector,
    steps: int,
) -> StateVector:
    """Alternate ``upd`` on the program buses with the QPU, ``steps`` times.

    ``init`` is the digit tuple ``(c_P, ..., c_1, c_0)``.  Returns the data
    register; the program buses remain a basis state throughout, so the data
    factors out exactly.
    """
    if upd.M != table.M:
        raise DimensionError(f"update uses M={upd.M}, table has {table.M} gates")
    mem = ProgramMemory(upd.M, tuple(init[:-1]), init[-1])
    if mem.P != upd.P:
        raise DimensionError(f"initial tuple has {mem.P + 1} digits, update expects {upd.P + 1}")
    if psi.dim != table.N:
        raise DimensionError(f"data register has dim {psi.dim}, gates act on dim {table.N}")
    s = load_memory(table, mem, psi)
    shape = s.layout.factors
    amps = s.amplitudes
    for _ in range(steps):
        amps = _permute_control(upd.perm, amps, table.N).reshape(shape)
        amps = apply_blocks(table.stack(), amps)
    block = amps.reshape(-1, table.N)
    j = int(np.argmax(np.linalg.norm(block, axis=1)))
    return StateVector.from_unnormalized([table.N], block[j])
