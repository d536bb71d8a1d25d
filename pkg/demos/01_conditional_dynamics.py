# %% [markdown]
# # Conditional dynamics
# A program register selects which gate acts on the data register.
# With the gate table (I, X) the processor is exactly a CNOT.

# %%
import numpy as np

from vnqp.core import CNOT, I2, X, StateVector, fidelity
from vnqp.qpu import GateTable, apply_qpu, build_qpu, load_program, no_programming_witness, probe_states

table = GateTable([I2, X])
print(build_qpu(table).matrix.entries.real)
print("equals CNOT:", np.array_equal(build_qpu(table).matrix.entries, CNOT.entries))

# %% [markdown]
# Programs in the basis run one gate each. A superposed program
# entangles program and data, so the two gates cannot be told apart
# without disturbing the program.

# %%
zero = StateVector.basis([2], 0)
for c in (0, 1):
    out = apply_qpu(table, load_program(table, c, zero))
    print(f"program {c}:", np.round(out.amplitudes, 3))

plus = StateVector([2], np.array([1, 1]) / np.sqrt(2))
out = apply_qpu(table, load_program(table, plus, zero))
bell = StateVector([2, 2], np.array([1, 0, 0, 1]) / np.sqrt(2))
print("superposed program -> Bell fidelity", round(fidelity(out, bell), 12))

# %%
for p in probe_states(2)[:4]:
    w = no_programming_witness(table, 0, 1, p)
    print("probe", np.round(p.amplitudes, 3), "schmidt rank", w.schmidt_rank)
