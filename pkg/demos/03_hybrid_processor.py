# %% [markdown]
# # Hybrid processor
# Continuous program variables on a grid of Q points drive qubit
# rotations. Position states pick one rotation angle; momentum states
# pick the angle given by their label after a Fourier transform.

# %%
import numpy as np

from vnqp.core import StateVector, dft, fidelity
from vnqp.hybrid import apply_momentum_qpu, apply_position_qpu, build_momentum_qpu, build_position_qpu, theta_matrix

Q = 8
F = np.kron(dft(Q).entries, np.eye(2))
conj = F.conj().T @ build_position_qpu(1, Q).matrix.entries @ F
print("duality error", np.max(np.abs(conj - build_momentum_qpu(1, Q).entries)))

# %%
k = 2
mom = StateVector.from_unnormalized([Q, 2], np.kron(np.exp(2j * np.pi * np.arange(Q) * k / Q), [1, 0]))
out = apply_momentum_qpu(1, mom)
want = StateVector.from_unnormalized([Q, 2], np.kron(mom.amplitudes.reshape(Q, 2)[:, 0], theta_matrix(1, k / Q)[:, 0]))
print("momentum label", k, "fires theta(k/Q):", round(fidelity(out, want), 12))

pos = StateVector.basis([Q, 2], (3, 0))
print("position 3:", np.round(apply_position_qpu(3, pos).amplitudes.reshape(Q, 2)[3], 4))
