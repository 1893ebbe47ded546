"""Reusable circuit constructions: multi-controls, zero reflections, OR.

Multi-controls follow the compute/fire/uncompute Toffoli ladder: with m
pattern bits the all-ones ladder costs 2m-3 Toffolis and m-2 pure ancillas.
Pattern zeros are handled by X conjugation of the affected controls.  The
phase-fire helpers additionally support a small number of leftover controls
without ancillas via the square-root cascade, which is what lets every
assembled pipeline stay within its fixed ancilla pool.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import (Circuit, CircuitBuilder, CircuitError, Gate, GateKind,
                      QubitLayout, controlled, plain_layout)


class SynthesisError(CircuitError):
    pass


@dataclass(frozen=True)
class ControlPattern:
    """Fire pattern: bits[i] applies to qubits[i] ('1' = control on one)."""

    bits: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1 or len(self.bits) != len(self.qubits):
            raise SynthesisError("pattern needs one bit per control qubit")
        if any(b not in "01" for b in self.bits):
            raise SynthesisError("pattern bits must be 0/1")
        if len(set(self.qubits)) != len(self.qubits):
            raise SynthesisError("duplicate control qubits")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def zeros(self) -> tuple[int, ...]:
        return tuple(q for b, q in zip(self.bits, self.qubits) if b == "0")


# ---------------------------------------------------------------------------
# low-level emitters shared by the larger builders

def append_and_chain(b: CircuitBuilder, controls: list[int], pool: list[int],
                     leave: int = 2) -> tuple[list[int], list[tuple[int, int, int]]]:
    """Fold controls pairwise into pool ancillas until `leave` remain (or the
    pool runs dry).  Returns (remaining controls, fold steps to uncompute)."""
    remaining = list(controls)
    steps: list[tuple[int, int, int]] = []
    free = list(pool)
    while len(remaining) > leave and free:
        slot = free.pop(0)
        b.ccx(remaining[0], remaining[1], slot)
        steps.append((remaining[0], remaining[1], slot))
        remaining = [slot] + remaining[2:]
    return remaining, steps


def undo_and_chain(b: CircuitBuilder, steps: list[tuple[int, int, int]]) -> None:
    for a, c, t in reversed(steps):
        b.ccx(a, c, t)


def append_multi_controlled_phase(b: CircuitBuilder, controls: list[int],
                                  target: int, angle: float,
                                  pool: list[int]) -> None:
    """Phase `angle` on |1...1> of (controls, target); ancilla-greedy."""
    remaining, steps = append_and_chain(b, list(controls), pool, leave=2)
    _phase_cascade(b, remaining, target, angle)
    undo_and_chain(b, steps)


def _phase_cascade(b: CircuitBuilder, controls: list[int], target: int,
                   angle: float) -> None:
    """Ancilla-free controlled phase on |1..1, target=1>; cost grows with
    the control count, so callers chain down to a handful first."""
    r = len(controls)
    if r == 0:
        b.phase(target, angle)
    elif r == 1:
        if _is_pi(angle):
            b.cz(controls[0], target)
        else:
            b.cp(controls[0], target, angle)
    elif r == 2 and _is_pi(angle):
        b.ccz(controls[0], controls[1], target)
    else:
        head, last = controls[:-1], controls[-1]
        b.cp(last, target, angle / 2)
        _x_cascade(b, head, last)
        b.cp(last, target, -angle / 2)
        _x_cascade(b, head, last)
        _phase_cascade(b, head, target, angle / 2)


def _x_cascade(b: CircuitBuilder, controls: list[int], target: int) -> None:
    r = len(controls)
    if r == 0:
        b.x(target)
    elif r == 1:
        b.cx(controls[0], target)
    elif r == 2:
        b.ccx(controls[0], controls[1], target)
    else:
        b.h(target)
        _phase_cascade(b, controls, target, math.pi)
        b.h(target)


def _is_pi(angle: float) -> bool:
    return abs(angle - math.pi) < 1e-15


def append_multi_controlled_x(b: CircuitBuilder, controls: list[int],
                              target: int, pool: list[int]) -> None:
    remaining, steps = append_and_chain(b, list(controls), pool, leave=2)
    _x_cascade(b, remaining, target)
    undo_and_chain(b, steps)


def append_multi_cry(b: CircuitBuilder, controls: list[int], target: int,
                     angle: float) -> None:
    """Multi-controlled RY without ancillas (used for <= 3 controls)."""
    r = len(controls)
    if r == 0:
        b.ry(target, angle)
    elif r == 1:
        b.cry(controls[0], target, angle)
    else:
        head, last = controls[:-1], controls[-1]
        b.cry(last, target, angle / 2)
        _x_cascade(b, head, last)
        b.cry(last, target, -angle / 2)
        _x_cascade(b, head, last)
        append_multi_cry(b, head, target, angle / 2)


def append_zero_reflection(b: CircuitBuilder, qubits: list[int],
                           pool: list[int], extra_controls=()) -> None:
    """I - 2|0..0><0..0| on `qubits` (phase -1 on all-zeros), optionally
    gated by extra control qubits that must read |1>."""
    qubits = list(qubits)
    for q in qubits:
        b.x(q)
    extra = list(extra_controls)
    if len(qubits) == 1 and not extra:
        b.z(qubits[0])
    else:
        controls = qubits[:-1] + extra
        remaining, steps = append_and_chain(b, controls, pool, leave=2)
        _phase_cascade(b, remaining, qubits[-1], math.pi)
        undo_and_chain(b, steps)
    for q in qubits:
        b.x(q)


# ---------------------------------------------------------------------------
# public constructors

def multi_control(u, pattern: ControlPattern, ancillas) -> Circuit:
    """Apply `u` (a Gate or Circuit) iff the control register matches the
    pattern; ladder ancillas are returned to |0>."""
    anc = list(ancillas)
    m = len(pattern)
    if m >= 3 and len(anc) < m - 2:
        raise SynthesisError(f"need at least {m - 2} ancillas for {m} controls")
    targets = _target_qubits(u)
    overlap = set(pattern.qubits) & targets | set(pattern.qubits) & set(anc) \
        | targets & set(anc)
    if overlap:
        raise SynthesisError(f"index collision on qubits {sorted(overlap)}")
    width = max([*pattern.qubits, *anc, *targets]) + 1
    b = CircuitBuilder(_ladder_layout(width, anc))
    for q in pattern.zeros:
        b.x(q)
    controls = list(pattern.qubits)
    if isinstance(u, Gate) and u.kind is GateKind.X and m >= 2:
        append_multi_controlled_x(b, controls, u.target, anc)
    elif isinstance(u, Gate):
        remaining, steps = append_and_chain(b, controls, anc, leave=2)
        _fire_gate(b, remaining, u)
        undo_and_chain(b, steps)
    else:
        remaining, steps = append_and_chain(b, controls, anc, leave=2)
        inner = u
        for c in remaining:
            inner = controlled(inner, c)
        b.extend(inner.gates)
        undo_and_chain(b, steps)
    for q in pattern.zeros:
        b.x(q)
    return b.build(stage="multi_control", pattern=pattern.bits)


def _fire_gate(b: CircuitBuilder, controls: list[int], u: Gate) -> None:
    if not controls:
        b.append(u)
        return
    if len(controls) == 1:
        b.extend(controlled(Circuit(plain_layout(u.target + 1), (u,)), controls[0]).gates)
        return
    if u.kind is GateKind.RY:
        append_multi_cry(b, controls, u.target, u.angle)
        return
    if u.kind is GateKind.X and len(controls) == 2:
        b.ccx(controls[0], controls[1], u.target)
        return
    inner = Circuit(plain_layout(u.target + 1), (u,))
    for c in controls:
        inner = controlled(inner, c)
    b.extend(inner.gates)


def _target_qubits(u) -> set[int]:
    if isinstance(u, Gate):
        return set(u.qubits)
    return {q for g in u.gates for q in g.qubits}


def _ladder_layout(width: int, anc: list[int]) -> QubitLayout:
    if anc and anc == list(range(min(anc), min(anc) + len(anc))) \
            and max(anc) == width - 1:
        return QubitLayout(main=range(min(anc)),
                           pure_ancillas=range(min(anc), width))
    return plain_layout(width)


def reflection_zero(qubits, ancillas) -> Circuit:
    """I - 2|0><0| over the given qubit range, identity elsewhere."""
    qubits = list(qubits)
    anc = list(ancillas)
    if len(anc) < len(qubits) - 2:
        raise SynthesisError("too few ancillas for the reflection ladder")
    width = max([*qubits, *anc], default=0) + 1
    b = CircuitBuilder(_ladder_layout(width, anc))
    append_zero_reflection(b, qubits, anc)
    return b.build(stage="reflection_zero")


def or_gate(a: int, bq: int, out: int) -> Circuit:
    """out <- a OR b on basis states; out supplied as |0>."""
    if len({a, bq, out}) != 3:
        raise SynthesisError("or_gate needs three distinct qubits")
    b = CircuitBuilder(plain_layout(max(a, bq, out) + 1))
    b.x(a)
    b.x(bq)
    b.ccx(a, bq, out)
    b.x(a)
    b.x(bq)
    b.x(out)
    return b.build(stage="or_gate")
