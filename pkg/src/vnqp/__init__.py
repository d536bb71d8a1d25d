"""Simulator and compiler for von Neumann quantum processors.

Fixed circuits whose action on a data register is chosen by the state of a
program register: finite conditional dynamics, three-bus program
sequencing, and hybrid processors with continuous program variables.
"""

__version__ = "0.1.0"

from .core import (
    CNOT,
    H,
    I2,
    X,
    Y,
    Z,
    DenseUnitary,
    DimensionError,
    RegisterLayout,
    StateVector,
    apply,
    dft,
    fidelity,
    random_unitary,
    schmidt_rank,
    tensor,
)
from .hybrid import (
    Entangler,
    HybridLayer,
    HybridProgram,
    HybridState,
    RotationFamily,
    apply_hybrid_program,
    apply_hybrid_program_superposed,
    apply_momentum_qpu,
    build_momentum_qpu,
    build_position_qpu,
    theta_gate,
)
from .qpu import GateTable, QpuOperator, apply_qpu, build_qpu, extract_gate, no_programming_witness
from .synth import (
    CircuitIR,
    Cnot,
    EulerTriple,
    OneQubit,
    compile_circuit,
    euler_decompose,
    precision_sweep,
    quantize,
)
from .threebus import ProgramMemory, ReversibleIndexUpdate, run_program, run_with_update, shft, step
