"""Dense statevector execution, flag post-selection, and block extraction.

Gates are applied as in-place numpy kernels on a flat 2^width array; CCX runs
as a native 3-qubit kernel.  Qubit i is bit i of the basis index.  Everything
is deterministic: no sampling, fixed operation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, GateKind

MAX_WIDTH = 24
MAX_BLOCK_QUBITS = 12


class SimulationError(ValueError):
    pass


class DegenerateProjectionError(SimulationError):
    """Projection onto a sector whose probability is numerically zero."""


@dataclass(frozen=True)
class StateVector:
    width: int
    amplitudes: np.ndarray

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class SimulationOutcome:
    post_state: np.ndarray
    success_probability: float
    ancilla_leakage: float
    junk_norm: float


def _axis(width: int, q: int) -> int:
    return width - 1 - q


def _apply_gate(a: np.ndarray, width: int, g: Gate) -> None:
    """In-place kernel dispatch on the [2]*width view `a`."""
    k = g.kind
    t = _axis(width, g.target)
    if k is GateKind.CX:
        c = _axis(width, g.controls[0])
        sub = _take2(a, c, 1)
        _swap_halves(sub, t if c > t else t - 1)
        return
    if k is GateKind.CCX:
        c0 = _axis(width, g.controls[0])
        c1 = _axis(width, g.controls[1])
        hi, lo = (c0, c1) if c0 < c1 else (c1, c0)
        sub = _take2(_take2(a, hi, 1), lo - 1, 1)
        tt = t - (hi < t) - (lo < t)
        _swap_halves(sub, tt)
        return
    idx0 = (slice(None),) * t + (0,)
    idx1 = (slice(None),) * t + (1,)
    if k is GateKind.X:
        _swap_halves(a, t)
    elif k is GateKind.Z:
        a[idx1] *= -1.0
    elif k is GateKind.S:
        a[idx1] *= 1j
    elif k is GateKind.SDG:
        a[idx1] *= -1j
    elif k is GateKind.PHASE:
        a[idx1] *= np.exp(1j * g.angle)
    elif k is GateKind.RZ:
        a[idx0] *= np.exp(-0.5j * g.angle)
        a[idx1] *= np.exp(0.5j * g.angle)
    elif k is GateKind.H:
        x0 = a[idx0].copy()
        x1 = a[idx1]
        r = math.sqrt(0.5)
        a[idx0] = r * (x0 + x1)
        a[idx1] = r * (x0 - x1)
    elif k is GateKind.RY:
        ch, sh = math.cos(g.angle / 2), math.sin(g.angle / 2)
        x0 = a[idx0].copy()
        x1 = a[idx1]
        a[idx0] = ch * x0 - sh * x1
        a[idx1] = sh * x0 + ch * x1
    elif k is GateKind.RX:
        ch, sh = math.cos(g.angle / 2), math.sin(g.angle / 2)
        x0 = a[idx0].copy()
        x1 = a[idx1]
        a[idx0] = ch * x0 - 1j * sh * x1
        a[idx1] = -1j * sh * x0 + ch * x1
    elif k is GateKind.Y:
        x0 = a[idx0].copy()
        a[idx0] = -1j * a[idx1]
        a[idx1] = 1j * x0
    else:  # pragma: no cover
        raise SimulationError(f"no kernel for {k}")


def _take2(a: np.ndarray, axis: int, val: int) -> np.ndarray:
    return a[(slice(None),) * axis + (val,)]


def _swap_halves(a: np.ndarray, axis: int) -> None:
    i0 = (slice(None),) * axis + (0,)
    i1 = (slice(None),) * axis + (1,)
    tmp = a[i0].copy()
    a[i0] = a[i1]
    a[i1] = tmp


def run(c: Circuit, initial: int = 0) -> StateVector:
    """Apply the gate list to the given computational basis state."""
    width = c.width
    if width > MAX_WIDTH:
        raise SimulationError(f"width {width} exceeds the {MAX_WIDTH}-qubit cap")
    if not 0 <= initial < (1 << width):
        raise SimulationError("initial basis index out of range")
    amps = np.zeros(1 << width, dtype=np.complex128)
    amps[initial] = 1.0
    view = amps.reshape([2] * width)
    for g in c.gates:
        _apply_gate(view, width, g)
    return StateVector(width, amps)


def _mask_of(width: int, qubits) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def _zero_sector(state: StateVector, qubits) -> np.ndarray:
    mask = _mask_of(state.width, qubits)
    idx = np.arange(state.amplitudes.size)
    return (idx & mask) == 0


def project_zero(state: StateVector, qubits) -> tuple[StateVector, float]:
    """Project the listed qubits onto |0> and renormalize.

    Returns the conditional state and the pre-normalization squared norm.
    """
    qubits = tuple(qubits)
    if any(q >= state.width for q in qubits):
        raise SimulationError("projection qubit out of range")
    keep = _zero_sector(state, qubits)
    amps = np.where(keep, state.amplitudes, 0.0)
    prob = float(np.vdot(amps, amps).real)
    if prob < 1e-300:
        raise DegenerateProjectionError("projection probability below 1e-300")
    return StateVector(state.width, amps / math.sqrt(prob)), prob


def verify_pure_ancillas(state: StateVector, ancillas) -> float:
    """Squared norm of components where any listed ancilla is |1>."""
    mask = _mask_of(state.width, ancillas)
    if mask == 0:
        return 0.0
    idx = np.arange(state.amplitudes.size)
    bad = (idx & mask) != 0
    a = state.amplitudes[bad]
    return float(np.vdot(a, a).real)


def analyze(c: Circuit, initial: int = 0, flags=None, ancillas=None) -> SimulationOutcome:
    """Run, post-select the flag qubits on |0>, and audit the ancillas.

    ancilla_leakage is measured inside the kept (flag-zero) sector before
    renormalization; the junk branch outside that sector legitimately parks
    garbage on the work registers until it is discarded by post-selection.
    """
    lay = c.layout
    flags = tuple(lay.flags if flags is None else flags)
    ancillas = tuple((*lay.pure_ancillas, *lay.indicator) if ancillas is None else ancillas)
    state = run(c, initial)
    keep = _zero_sector(state, flags)
    kept = np.where(keep, state.amplitudes, 0.0)
    success = float(np.vdot(kept, kept).real)
    junk = state.norm_sq() - success
    leak_mask = _mask_of(state.width, ancillas)
    idx = np.arange(kept.size)
    leaked = kept[(idx & leak_mask) != 0]
    leakage = float(np.vdot(leaked, leaked).real)
    post = _main_slice(kept, lay)
    nrm = np.linalg.norm(post)
    if nrm > 0:
        post = post / nrm
    return SimulationOutcome(post, success, leakage, junk)


def _main_slice(amps: np.ndarray, lay) -> np.ndarray:
    """Main-register amplitudes with every other qubit at |0>."""
    n = len(lay.main)
    start = lay.main.start
    idx = (np.arange(1 << n) << start)
    return amps[idx].copy()


def extract_block(c: Circuit, flags, main) -> np.ndarray:
    """Matrix of <0_flags, j_main| U |0_flags, k_main> with ancillas at |0>.

    Column k comes from running the circuit on basis state k of the main
    register (all other qubits |0>).
    """
    main = tuple(main)
    if len(main) > MAX_BLOCK_QUBITS:
        raise SimulationError(f"block extraction capped at {MAX_BLOCK_QUBITS} main qubits")
    flags = tuple(flags)
    dim = 1 << len(main)
    block = np.empty((dim, dim), dtype=np.complex128)
    out_idx = np.zeros(dim, dtype=np.int64)
    for j in range(dim):
        v = 0
        for bit, q in enumerate(main):
            if (j >> bit) & 1:
                v |= 1 << q
        out_idx[j] = v
    for k in range(dim):
        state = run(c, int(out_idx[k]))
        block[:, k] = state.amplitudes[out_idx]
    return block


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full dense unitary; test-scale only."""
    if c.width > MAX_BLOCK_QUBITS:
        raise SimulationError("unitary reconstruction capped at 12 qubits")
    dim = 1 << c.width
    u = np.empty((dim, dim), dtype=np.complex128)
    for k in range(dim):
        u[:, k] = run(c, k).amplitudes
    return u
