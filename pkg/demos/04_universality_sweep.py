# %% [markdown]
# # Universality on a grid
# Any single-qubit gate is a product of three axis rotations. Rounding
# the three parameters to a grid of Q points costs infidelity that
# falls roughly as 1/Q^2.

# %%
import numpy as np

from vnqp.core import H, StateVector, fidelity, random_unitary
from vnqp.hybrid import apply_hybrid_program
from vnqp.synth import CircuitIR, Cnot, OneQubit, compile_circuit, euler_decompose, precision_sweep

t = euler_decompose(H)
print("Hadamard triple", t.params, "phase", round(t.global_phase, 6))

rng = np.random.default_rng(0)
targets = [random_unitary(2, rng) for _ in range(200)]
rows = precision_sweep(targets, [16, 32, 64, 128, 256])
for a, b in zip(rows, rows[1:]):
    print(f"Q={b.Q:4d} worst {b.worst_infidelity:.3e} ratio vs Q={a.Q}: {a.worst_infidelity / b.worst_infidelity:.2f}")

# %%
prog = compile_circuit(CircuitIR(2, [OneQubit(0, H), Cnot(0, 1)]))
out = apply_hybrid_program(prog, StateVector.basis([2, 2], 0))
bell = StateVector([2, 2], np.array([1, 0, 0, 1]) / np.sqrt(2))
print("compiled Bell fidelity", round(fidelity(out, bell), 12))
