"""funcprep: compile piece-wise polynomial functions into qubit circuits.

Pipeline: a coordinate-superposition unitary is lifted to a diagonal
block-encoding of the grid values, a phased alternating sequence maps those
values through bounded parity polynomials, and a weighted combination of the
four parity pieces assembles the target function's amplitudes, post-selected
on a constant number of flag qubits.  A dense statevector simulator and a
gate-census auditor verify every construction.
"""

from .circuit import (Circuit, CircuitBuilder, CircuitError, Gate, GateCensus,
                      GateKind, QubitLayout, adjoint, census, compose,
                      controlled, emit, parse, plain_layout)
from .simulator import (DegenerateProjectionError, SimulationOutcome,
                        StateVector, analyze, circuit_unitary, extract_block,
                        project_zero, run, verify_pure_ancillas)
from .primitives import (ControlPattern, SynthesisError, multi_control,
                         or_gate, reflection_zero)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
