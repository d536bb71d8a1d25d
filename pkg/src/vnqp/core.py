"""Dense state-vector substrate: registers, unitaries and tensor operations.

Composite spaces are ordered with the first factor as the most significant
mixed-radix digit, so a program register placed before a data register makes
conditional dynamics literally block-diagonal in the flat basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

#: Tolerance for validity checks (normalization, unitarity).
VALID_TOL = 1e-10
#: Tolerance for identities that hold up to rounding only.
EXACT_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when register layouts or operator sizes do not fit together."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered factor dimensions of a composite register."""

    factors: tuple[int, ...]

    def __init__(self, factors: Sequence[int]):
        factors = tuple(int(f) for f in factors)
        if not factors:
            raise DimensionError("a layout needs at least one factor")
        if any(f < 1 for f in factors):
            raise DimensionError(f"factor dimensions must be positive, got {factors}")
        object.__setattr__(self, "factors", factors)

    @property
    def total_dim(self) -> int:
        return prod(self.factors)

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    def index(self, digits: Sequence[int]) -> int:
        """Flat basis index of a digit tuple (first digit most significant)."""
        if len(digits) != len(self.factors):
            raise DimensionError(f"expected {len(self.factors)} digits, got {len(digits)}")
        idx = 0
        for d, f in zip(digits, self.factors):
            if not 0 <= d < f:
                raise DimensionError(f"digit {d} out of range for factor of dimension {f}")
            idx = idx * f + int(d)
        return idx

    def digits(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.total_dim:
            raise DimensionError(f"basis index {index} out of range [0, {self.total_dim})")
        out = []
        for f in reversed(self.factors):
            index, d = divmod(index, f)
            out.append(d)
        return tuple(reversed(out))

    def __add__(self, other: "RegisterLayout") -> "RegisterLayout":
        return RegisterLayout(self.factors + other.factors)


class StateVector:
    """Normalized pure state over a :class:`RegisterLayout`.

    Amplitudes are stored read-only; operations return new states.
    """

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout, amplitudes, tol: float = VALID_TOL):
        if not isinstance(layout, RegisterLayout):
            layout = RegisterLayout(layout)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != layout.total_dim:
            raise DimensionError(
                f"layout {layout.factors} needs {layout.total_dim} amplitudes, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > tol:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def basis(cls, layout, digits: Sequence[int] | int) -> "StateVector":
        """Computational basis state given by per-factor digits or a flat index."""
        if not isinstance(layout, RegisterLayout):
            layout = RegisterLayout(layout)
        idx = digits if isinstance(digits, (int, np.integer)) else layout.index(digits)
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[idx] = 1.0
        return cls(layout, amps)

    @classmethod
    def from_unnormalized(cls, layout, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(layout, amps / norm)

    @classmethod
    def random(cls, layout, rng: np.random.Generator) -> "StateVector":
        """Haar-random state (normalized complex Gaussian vector)."""
        if not isinstance(layout, RegisterLayout):
            layout = RegisterLayout(layout)
        n = layout.total_dim
        return cls.from_unnormalized(layout, rng.normal(size=n) + 1j * rng.normal(size=n))

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per factor."""
        return self.amplitudes.reshape(self.layout.factors)

    def __repr__(self) -> str:
        return f"StateVector(layout={self.layout.factors}, amplitudes={np.asarray(self.amplitudes)!r})"


class DenseUnitary:
    """Square complex matrix checked for unitarity on construction."""

    __slots__ = ("entries",)

    def __init__(self, entries, tol: float = VALID_TOL):
        mat = np.asarray(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise DimensionError(f"expected a non-empty square matrix, got shape {mat.shape}")
        dev = unitarity_deviation(mat)
        if dev > tol:
            raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")
        object.__setattr__(self, "entries", _frozen(mat))

    def __setattr__(self, name, value):
        raise AttributeError("DenseUnitary is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "DenseUnitary":
        return DenseUnitary(self.entries.conj().T)

    def __matmul__(self, other: "DenseUnitary") -> "DenseUnitary":
        return DenseUnitary(self.entries @ other.entries)

    def kron(self, other: "DenseUnitary") -> "DenseUnitary":
        return DenseUnitary(np.kron(self.entries, other.entries))

    def __repr__(self) -> str:
        return f"DenseUnitary({np.asarray(self.entries)!r})"


def unitarity_deviation(mat) -> float:
    """Max-abs entry of ``U^dag U - I``."""
    mat = np.asarray(mat, dtype=complex)
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))


def random_unitary(dim: int, rng: np.random.Generator) -> DenseUnitary:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return DenseUnitary(q * (d / np.abs(d)))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state ``a ⊗ b``; ``a`` supplies the more significant factors."""
    return StateVector(a.layout + b.layout, np.kron(a.amplitudes, b.amplitudes))


def apply(U: DenseUnitary, s: StateVector, targets: Sequence[int]) -> StateVector:
    """Apply ``U`` to the listed factors of ``s`` (identity on the rest).

    The first listed target is the most significant factor of ``U``'s
    own index, so ``apply(kron(A, B), s, [i, j])`` puts ``A`` on factor ``i``.
    """
    targets = [int(t) for t in targets]
    n = s.layout.n_factors
    if len(set(targets)) != len(targets):
        raise DimensionError(f"duplicate target factors in {targets}")
    if any(not 0 <= t < n for t in targets):
        raise DimensionError(f"target factors {targets} out of range for {n} factors")
    dims = [s.layout.factors[t] for t in targets]
    if prod(dims) != U.dim:
        raise DimensionError(f"operator of dim {U.dim} does not match target dims {dims}")
    psi = np.moveaxis(s.tensor(), targets, range(len(targets)))
    rest = psi.shape[len(targets):]
    out = (U.entries @ psi.reshape(U.dim, -1)).reshape(tuple(dims) + rest)
    out = np.moveaxis(out, range(len(targets)), targets)
    return StateVector(s.layout, out, tol=VALID_TOL)


def apply_dense(U: DenseUnitary, s: StateVector) -> StateVector:
    """Full-space matrix-vector product."""
    if U.dim != s.dim:
        raise DimensionError(f"operator of dim {U.dim} does not match state of dim {s.dim}")
    return StateVector(s.layout, U.entries @ s.amplitudes)


def inner(a: StateVector, b: StateVector) -> complex:
    if a.layout != b.layout:
        raise DimensionError(f"layout mismatch: {a.layout.factors} vs {b.layout.factors}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|^2`` clipped to [0, 1]."""
    return float(min(1.0, abs(inner(a, b)) ** 2))


def schmidt_coefficients(s: StateVector, cut: int) -> np.ndarray:
    n = s.layout.n_factors
    if not 1 <= cut < n:
        raise DimensionError(f"cut must satisfy 1 <= cut < {n}, got {cut}")
    left = prod(s.layout.factors[:cut])
    return np.linalg.svd(s.amplitudes.reshape(left, -1), compute_uv=False)


def schmidt_rank(s: StateVector, cut: int, tol: float = VALID_TOL) -> int:
    """Number of Schmidt coefficients above ``tol`` across factors ``[0, cut)`` | ``[cut, n)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return int(np.count_nonzero(schmidt_coefficients(s, cut) > tol))


def dft(Q: int) -> DenseUnitary:
    """Unitary discrete Fourier transform, entries ``exp(-2πi jk/Q)/√Q``."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    jk = np.outer(np.arange(Q), np.arange(Q)) % Q
    return DenseUnitary(np.exp(-2j * np.pi * jk / Q) / np.sqrt(Q), tol=EXACT_TOL)


def cyclic_shift_matrix(Q: int) -> np.ndarray:
    """Permutation ``|j> -> |j+1 mod Q>``."""
    return np.roll(np.eye(Q, dtype=complex), 1, axis=0)


def permutation_unitary(perm: Sequence[int]) -> DenseUnitary:
    """Unitary sending basis state ``|i>`` to ``|perm[i]>``."""
    perm = np.asarray(perm)
    mat = np.zeros((perm.size, perm.size), dtype=complex)
    mat[perm, np.arange(perm.size)] = 1.0
    return DenseUnitary(mat)


# Standard gates used throughout.
I2 = DenseUnitary(np.eye(2))
X = DenseUnitary([[0, 1], [1, 0]])
Y = DenseUnitary([[0, -1j], [1j, 0]])
Z = DenseUnitary([[1, 0], [0, -1]])
H = DenseUnitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
S = DenseUnitary([[1, 0], [0, 1j]])
T = DenseUnitary([[1, 0], [0, np.exp(1j * np.pi / 4)]])
CNOT = DenseUnitary([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])

PAULI = {1: X, 2: Y, 3: Z}
NAMED_GATES = {"I": I2, "X": X, "Y": Y, "Z": Z, "H": H, "S": S, "T": T}
