# %% [markdown]
# # Three-bus processor
# Program memory holds P instruction slots. Each step rotates the
# slots by one and fires the instruction now on the intermediate bus.

# %%
import numpy as np

from vnqp.core import H, I2, S, X, StateVector
from vnqp.qpu import GateTable
from vnqp.threebus import ProgramMemory, run_program, shift_unitary_power_is_identity

table = GateTable([I2, X, H, S])
psi = StateVector.basis([2], 0)

# execution order H, S, H: slots are listed last-to-fire first
mem = ProgramMemory.from_sequence(4, [2, 3, 2])
print("slots", mem.slots, "fires", mem.execution_order)
res = run_program(table, mem, psi)
print("data out", np.round(res.data.amplitudes, 6))
print("program restored:", res.program_restored)

# %%
want = H.entries @ S.entries @ H.entries @ psi.amplitudes
print("matches H S H |0>:", np.allclose(res.data.amplitudes, want))
print("shift^(P+1) = I for M=4, P=3:", shift_unitary_power_is_identity(4, 3))
