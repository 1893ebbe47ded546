"""Gate-level circuit IR: typed gates, register roles, gate census, QASM emission.

The gate alphabet is deliberately small (one-qubit rotations/Cliffords plus
CX and CCX).  Toffolis stay native in the IR; the census expands them into
the 6 CX + 8 one-qubit accounting so resource numbers match the cost model
used throughout the synthesis layers, while simulation stays cheap.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum


class GateKind(Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    PHASE = "u1"
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    CX = "cx"
    CCX = "ccx"


ROTATION_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE})
_CONTROL_COUNT = {GateKind.CX: 1, GateKind.CCX: 2}
_ADJOINT_KIND = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S}


class CircuitError(ValueError):
    """Malformed gate, layout, or circuit-level contract violation."""


@dataclass(frozen=True, slots=True)
class Gate:
    kind: GateKind
    target: int
    controls: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        want = _CONTROL_COUNT.get(self.kind, 0)
        if len(self.controls) != want:
            raise CircuitError(f"{self.kind.name} takes {want} controls, got {len(self.controls)}")
        qubits = (self.target, *self.controls)
        if len(set(qubits)) != len(qubits) or any(q < 0 for q in qubits):
            raise CircuitError(f"qubit indices must be distinct and non-negative: {qubits}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"{self.kind.name} needs a finite angle")
        elif self.angle is not None:
            raise CircuitError(f"{self.kind.name} carries no angle")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (*self.controls, self.target)

    def inverse(self) -> "Gate":
        if self.kind in ROTATION_KINDS:
            return Gate(self.kind, self.target, self.controls, -self.angle)
        kind = _ADJOINT_KIND.get(self.kind, self.kind)
        return Gate(kind, self.target, self.controls)


@dataclass(frozen=True, slots=True)
class QubitLayout:
    """Register roles over a contiguous block of qubit indices.

    Sub-circuits may leave any role empty; the full pipeline uses all of
    main / be_flag / qsvt_flag / lcu_select / indicator / pure_ancillas.
    """

    main: range
    be_flag: int | None = None
    qsvt_flag: int | None = None
    lcu_select: range = range(0)
    indicator: range = range(0)
    pure_ancillas: range = range(0)

    def __post_init__(self):
        seen: set[int] = set()
        for qs in (self.main, self._flag_list(), self.lcu_select, self.indicator,
                   self.pure_ancillas):
            for q in qs:
                if q in seen:
                    raise CircuitError(f"register roles overlap at qubit {q}")
                seen.add(q)
        if not seen:
            raise CircuitError("layout must cover at least one qubit")
        if seen != set(range(max(seen) + 1)):
            raise CircuitError("register union must be contiguous from 0")

    def _flag_list(self) -> list[int]:
        return [q for q in (self.be_flag, self.qsvt_flag) if q is not None]

    @property
    def width(self) -> int:
        return 1 + max(
            max(self.main, default=-1),
            max(self._flag_list(), default=-1),
            max(self.lcu_select, default=-1),
            max(self.indicator, default=-1),
            max(self.pure_ancillas, default=-1))

    @property
    def flags(self) -> tuple[int, ...]:
        """Qubits post-selected on |0>: block-encoding flag, phase flag, selector."""
        return tuple(self._flag_list()) + tuple(self.lcu_select)


def plain_layout(n_main: int, n_anc: int = 0) -> QubitLayout:
    return QubitLayout(main=range(n_main), pure_ancillas=range(n_main, n_main + n_anc))


@dataclass(frozen=True, slots=True)
class GateCensus:
    one_qubit_ops: int = 0
    cnots: int = 0
    toffolis_native: int = 0
    ancillas_used: int = 0

    def __add__(self, other: "GateCensus") -> "GateCensus":
        return GateCensus(self.one_qubit_ops + other.one_qubit_ops,
                          self.cnots + other.cnots,
                          self.toffolis_native + other.toffolis_native,
                          max(self.ancillas_used, other.ancillas_used))

    def as_dict(self) -> dict:
        return {"one_qubit_ops": self.one_qubit_ops, "cnots": self.cnots,
                "toffolis_native": self.toffolis_native,
                "ancillas_used": self.ancillas_used}


@dataclass(frozen=True)
class Circuit:
    layout: QubitLayout
    gates: tuple[Gate, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        width = self.layout.width
        for g in self.gates:
            if max(g.qubits) >= width:
                raise CircuitError(f"gate {g} exceeds layout width {width}")

    @property
    def width(self) -> int:
        return self.layout.width

    def __len__(self) -> int:
        return len(self.gates)


class CircuitBuilder:
    """Mutable gate-list accumulator; single-owner, built once."""

    def __init__(self, layout: QubitLayout):
        self.layout = layout
        self._gates: list[Gate] = []

    def append(self, gate: Gate) -> "CircuitBuilder":
        self._gates.append(gate)
        return self

    def extend(self, gates) -> "CircuitBuilder":
        self._gates.extend(gates)
        return self

    def build(self, **meta) -> Circuit:
        return Circuit(self.layout, tuple(self._gates), dict(meta))

    # -- elementary emitters ------------------------------------------------
    def h(self, q):        self.append(Gate(GateKind.H, q))
    def x(self, q):        self.append(Gate(GateKind.X, q))
    def y(self, q):        self.append(Gate(GateKind.Y, q))
    def z(self, q):        self.append(Gate(GateKind.Z, q))
    def s(self, q):        self.append(Gate(GateKind.S, q))
    def sdg(self, q):      self.append(Gate(GateKind.SDG, q))
    def rx(self, q, a):    self.append(Gate(GateKind.RX, q, (), float(a)))
    def ry(self, q, a):    self.append(Gate(GateKind.RY, q, (), float(a)))
    def rz(self, q, a):    self.append(Gate(GateKind.RZ, q, (), float(a)))
    def phase(self, q, a): self.append(Gate(GateKind.PHASE, q, (), float(a)))
    def cx(self, c, t):    self.append(Gate(GateKind.CX, t, (c,)))
    def ccx(self, a, b, t): self.append(Gate(GateKind.CCX, t, (a, b)))

    # -- composite emitters (materialized; census follows automatically) ----
    def cry(self, c, t, angle):
        """Controlled RY: 2 rotations + 2 CX."""
        self.ry(t, angle / 2.0)
        self.cx(c, t)
        self.ry(t, -angle / 2.0)
        self.cx(c, t)

    def crz(self, c, t, angle):
        self.rz(t, angle / 2.0)
        self.cx(c, t)
        self.rz(t, -angle / 2.0)
        self.cx(c, t)

    def cp(self, c, t, angle):
        """Controlled phase: 3 phase gates + 2 CX."""
        self.phase(c, angle / 2.0)
        self.phase(t, angle / 2.0)
        self.cx(c, t)
        self.phase(t, -angle / 2.0)
        self.cx(c, t)

    def cz(self, c, t):
        self.h(t)
        self.cx(c, t)
        self.h(t)

    def ccz(self, a, b, t):
        self.h(t)
        self.ccx(a, b, t)
        self.h(t)

    def global_phase_flip(self, q):
        """Multiply the whole state by -1 (RZ(2*pi) on any qubit)."""
        self.rz(q, 2.0 * math.pi)


def compose(a: Circuit, b: Circuit) -> Circuit:
    if a.layout != b.layout:
        raise CircuitError("compose requires identical layouts")
    return Circuit(a.layout, a.gates + b.gates, {**a.meta, **b.meta})


def adjoint(c: Circuit) -> Circuit:
    return Circuit(c.layout, tuple(g.inverse() for g in reversed(c.gates)), dict(c.meta))


# Toffoli decomposition used only when a CCX itself must acquire a control:
# H t; CX b t; Tdg t; CX a t; T t; CX b t; Tdg t; CX a t; T t; T b; H t;
# CX a b; T a; Tdg b; CX a b.
def _ccx_standard(a: int, b: int, t: int) -> list[Gate]:
    T = math.pi / 4
    P = GateKind.PHASE
    return [
        Gate(GateKind.H, t),
        Gate(GateKind.CX, t, (b,)), Gate(P, t, (), -T),
        Gate(GateKind.CX, t, (a,)), Gate(P, t, (), T),
        Gate(GateKind.CX, t, (b,)), Gate(P, t, (), -T),
        Gate(GateKind.CX, t, (a,)), Gate(P, t, (), T),
        Gate(P, b, (), T), Gate(GateKind.H, t),
        Gate(GateKind.CX, b, (a,)), Gate(P, a, (), T), Gate(P, b, (), -T),
        Gate(GateKind.CX, b, (a,)),
    ]


def _controlled_gate(g: Gate, ctrl: int) -> list[Gate]:
    k = g.kind
    out: list[Gate] = []
    if k is GateKind.X:
        return [Gate(GateKind.CX, g.target, (ctrl,))]
    if k is GateKind.CX:
        return [Gate(GateKind.CCX, g.target, (ctrl, g.controls[0]))]
    if k is GateKind.CCX:
        for sub in _ccx_standard(*g.controls, g.target):
            out.extend(_controlled_gate(sub, ctrl))
        return out
    b = _ListEmitter()
    t = g.target
    if k in (GateKind.RY, GateKind.RZ):
        emit = b.cry if k is GateKind.RY else b.crz
        emit(ctrl, t, g.angle)
    elif k is GateKind.RX:
        # conjugate into an RZ so the standard 2-rotation pattern applies
        b.ry(t, math.pi / 2)
        b.crz(ctrl, t, g.angle)
        b.ry(t, -math.pi / 2)
    elif k is GateKind.PHASE:
        b.cp(ctrl, t, g.angle)
    elif k is GateKind.H:
        # H = RY(pi/2) . Z, applied as Z first then RY
        b.cz(ctrl, t)
        b.cry(ctrl, t, math.pi / 2)
    elif k is GateKind.Z:
        b.cz(ctrl, t)
    elif k is GateKind.S:
        b.cp(ctrl, t, math.pi / 2)
    elif k is GateKind.SDG:
        b.cp(ctrl, t, -math.pi / 2)
    elif k is GateKind.Y:
        b.sdg(t)
        b.cx(ctrl, t)
        b.s(t)
    else:  # pragma: no cover
        raise CircuitError(f"cannot control {k}")
    return b._gates


class _ListEmitter(CircuitBuilder):
    def __init__(self):
        self._gates = []


def controlled(c: Circuit, ctrl: int) -> Circuit:
    """Wrap every gate of `c` in a control on `ctrl`.

    One-qubit rotations cost 2 rotations + 2 CX (RX adds a basis change);
    CX becomes CCX; a native CCX is first expanded to its standard
    CX/phase decomposition and then controlled gate by gate.
    """
    used = {q for g in c.gates for q in g.qubits}
    if ctrl in used:
        raise CircuitError(f"control qubit {ctrl} collides with circuit qubits")
    width = max(c.layout.width, ctrl + 1)
    layout = c.layout if width == c.layout.width else plain_layout(width)
    gates: list[Gate] = []
    for g in c.gates:
        gates.extend(_controlled_gate(g, ctrl))
    return Circuit(layout, tuple(gates), dict(c.meta))


def census(c: Circuit) -> GateCensus:
    """Count resources with CCX expanded as 6 CX + 8 one-qubit operations."""
    one_q = cx = ccx = 0
    anc = set(c.layout.pure_ancillas)
    used_anc: set[int] = set()
    for g in c.gates:
        if g.kind is GateKind.CCX:
            ccx += 1
            cx += 6
            one_q += 8
        elif g.kind is GateKind.CX:
            cx += 1
        else:
            one_q += 1
        used_anc.update(q for q in g.qubits if q in anc)
    return GateCensus(one_q, cx, ccx, len(used_anc))


# ---------------------------------------------------------------------------
# OpenQASM 2.0 emission / re-parsing

def _register_map(layout: QubitLayout) -> list[tuple[str, int]]:
    """qubit index -> (register name, offset) in emission order."""
    regs: list[tuple[str, int]] = [("", 0)] * layout.width
    for i, q in enumerate(layout.main):
        regs[q] = ("main", i)
    for i, q in enumerate(layout.flags):
        regs[q] = ("flags", i)
    for i, q in enumerate(layout.indicator):
        regs[q] = ("ind", i)
    for i, q in enumerate(layout.pure_ancillas):
        regs[q] = ("anc", i)
    return regs


def emit(c: Circuit) -> str:
    """Serialize to OpenQASM 2.0 restricted to the IR gate alphabet."""
    lay = c.layout
    regs = _register_map(lay)
    sizes = {"main": len(lay.main), "flags": len(lay.flags),
             "ind": len(lay.indicator), "anc": len(lay.pure_ancillas)}
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";']
    lines.append("// layout main=%s be=%s qsvt=%s lcu=%s ind=%s anc=%s" % (
        _rng(lay.main), lay.be_flag, lay.qsvt_flag, _rng(lay.lcu_select),
        _rng(lay.indicator), _rng(lay.pure_ancillas)))
    for name in ("main", "flags", "ind", "anc"):
        if sizes[name]:
            lines.append(f"qreg {name}[{sizes[name]}];")
    for g in c.gates:
        ops = ",".join(f"{regs[q][0]}[{regs[q][1]}]" for q in g.qubits)
        if g.kind in ROTATION_KINDS:
            lines.append(f"{g.kind.value}({g.angle!r}) {ops};")
        else:
            lines.append(f"{g.kind.value} {ops};")
    return "\n".join(lines) + "\n"


def _rng(r: range) -> str:
    return f"{r.start}:{r.stop}"


_QASM_GATE = re.compile(r"^(\w+)\s*(?:\(([^)]*)\))?\s+(.+);$")
_LAYOUT_LINE = re.compile(
    r"^// layout main=(\d+):(\d+) be=(\S+) qsvt=(\S+) lcu=(\d+):(\d+) "
    r"ind=(\d+):(\d+) anc=(\d+):(\d+)$")
_KIND_BY_NAME = {k.value: k for k in GateKind}


def parse(text: str) -> Circuit:
    """Re-parse emitted QASM; round-trips to an identical gate list."""
    layout: QubitLayout | None = None
    offsets: dict[str, int] = {}
    gates: list[Gate] = []
    for raw in text.splitlines():
        line = raw.strip()
        m = _LAYOUT_LINE.match(line)
        if m:
            v = m.groups()
            layout = QubitLayout(
                main=range(int(v[0]), int(v[1])),
                be_flag=None if v[2] == "None" else int(v[2]),
                qsvt_flag=None if v[3] == "None" else int(v[3]),
                lcu_select=range(int(v[4]), int(v[5])),
                indicator=range(int(v[6]), int(v[7])),
                pure_ancillas=range(int(v[8]), int(v[9])))
            regs = _register_map(layout)
            base: dict[str, list[int]] = {}
            for q, (name, off) in enumerate(regs):
                base.setdefault(name, []).append(q)
            offsets = {name: qs for name, qs in base.items()}
            continue
        if not line or line.startswith(("OPENQASM", "include", "qreg", "//")):
            continue
        m = _QASM_GATE.match(line)
        if m is None:
            raise CircuitError(f"unparseable QASM line: {line}")
        name, angle, args = m.groups()
        if name not in _KIND_BY_NAME:
            raise CircuitError(f"gate outside the alphabet: {name}")
        if layout is None:
            raise CircuitError("missing layout header")
        qubits = []
        for token in args.split(","):
            reg, idx = token.strip()[:-1].split("[")
            qubits.append(offsets[reg][int(idx)])
        kind = _KIND_BY_NAME[name]
        a = float(angle) if angle is not None else None
        gates.append(Gate(kind, qubits[-1], tuple(qubits[:-1]), a))
    if layout is None:
        raise CircuitError("missing layout header")
    return Circuit(layout, tuple(gates))
