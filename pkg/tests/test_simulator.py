import numpy as np
import pytest

from funcprep import (Circuit, CircuitBuilder, DegenerateProjectionError, Gate,
                      GateKind, QubitLayout, analyze, circuit_unitary,
                      extract_block, plain_layout, project_zero, run,
                      verify_pure_ancillas)
from funcprep.simulator import SimulationError, StateVector
from .test_circuit import random_circuit

I2 = np.eye(2)
MATS = {
    GateKind.H: np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    GateKind.X: np.array([[0, 1], [1, 0]]),
    GateKind.Y: np.array([[0, -1j], [1j, 0]]),
    GateKind.Z: np.diag([1, -1]),
    GateKind.S: np.diag([1, 1j]),
    GateKind.SDG: np.diag([1, -1j]),
}


def gate_matrix(g):
    if g.kind in MATS:
        return MATS[g.kind]
    t = g.angle
    if g.kind is GateKind.RX:
        return np.array([[np.cos(t / 2), -1j * np.sin(t / 2)],
                         [-1j * np.sin(t / 2), np.cos(t / 2)]])
    if g.kind is GateKind.RY:
        return np.array([[np.cos(t / 2), -np.sin(t / 2)],
                         [np.sin(t / 2), np.cos(t / 2)]])
    if g.kind is GateKind.RZ:
        return np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)])
    if g.kind is GateKind.PHASE:
        return np.diag([1, np.exp(1j * t)])
    raise AssertionError(g)


def dense_unitary(c):
    """Brute-force matrix oracle: explicit kron products, qubit i = bit i."""
    dim = 1 << c.width
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        if g.kind is GateKind.CX:
            m = np.eye(dim, dtype=complex)
            for k in range(dim):
                if (k >> g.controls[0]) & 1:
                    m[:, k] = 0
                    m[k ^ (1 << g.target), k] = 1
        elif g.kind is GateKind.CCX:
            m = np.eye(dim, dtype=complex)
            for k in range(dim):
                if all((k >> c_) & 1 for c_ in g.controls):
                    m[:, k] = 0
                    m[k ^ (1 << g.target), k] = 1
        else:
            ops = [I2] * c.width
            ops[g.target] = gate_matrix(g)
            m = np.array([[1.0]])
            for q in reversed(range(c.width)):   # qubit 0 = least significant
                m = np.kron(m, ops[q])
        u = m @ u
    return u


def test_empty_circuit_identity():
    sv = run(Circuit(plain_layout(3), ()))
    assert sv.amplitudes[0] == 1.0
    assert np.abs(sv.amplitudes[1:]).max() == 0.0


def test_hadamard():
    b = CircuitBuilder(plain_layout(1))
    b.h(0)
    sv = run(b.build())
    assert np.allclose(sv.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_run_matches_dense_oracle():
    rng = np.random.default_rng(10)
    c = random_circuit(rng, width=4, n_gates=20)
    u = dense_unitary(c)
    for k in (0, 5, 15):
        sv = run(c, k)
        assert np.linalg.norm(sv.amplitudes - u[:, k]) < 1e-12


def test_run_norm_preserved():
    rng = np.random.default_rng(11)
    c = random_circuit(rng, width=5, n_gates=400)
    sv = run(c)
    assert abs(sv.norm_sq() - 1.0) < 1e-12


def test_run_compose_consistency():
    from funcprep import compose
    rng = np.random.default_rng(12)
    a = random_circuit(rng, width=3, n_gates=15)
    b = random_circuit(rng, width=3, n_gates=15)
    sv_ab = run(compose(a, b), 3)
    mid = run(a, 3)
    amps = mid.amplitudes.reshape([2] * 3)
    from funcprep.simulator import _apply_gate
    for g in b.gates:
        _apply_gate(amps, 3, g)
    assert np.array_equal(sv_ab.amplitudes, amps.reshape(-1))


def test_width_guard():
    with pytest.raises(SimulationError):
        run(Circuit(plain_layout(25), ()))


def test_project_zero_trivial():
    sv = run(Circuit(plain_layout(2), ()))
    out, p = project_zero(sv, [1])
    assert p == 1.0
    assert np.array_equal(out.amplitudes, sv.amplitudes)


def test_project_zero_bell():
    b = CircuitBuilder(plain_layout(2))
    b.h(0)
    b.cx(0, 1)
    sv = run(b.build())
    out, p = project_zero(sv, [1])
    assert abs(p - 0.5) < 1e-12
    assert abs(out.amplitudes[0] - 1.0) < 1e-12


def test_project_zero_degenerate():
    b = CircuitBuilder(plain_layout(1))
    b.x(0)
    with pytest.raises(DegenerateProjectionError):
        project_zero(run(b.build()), [0])


def test_verify_pure_ancillas():
    sv = run(Circuit(plain_layout(3), ()))
    assert verify_pure_ancillas(sv, [1, 2]) == 0.0
    b = CircuitBuilder(plain_layout(3))
    b.x(2)
    assert verify_pure_ancillas(run(b.build()), [2]) == 1.0


def test_extract_block_identity():
    lay = QubitLayout(main=range(2), be_flag=2)
    blk = extract_block(Circuit(lay, ()), flags=[2], main=range(2))
    assert np.abs(blk - np.eye(4)).max() == 0.0


def test_extract_block_flagged_x():
    lay = QubitLayout(main=range(2), be_flag=2)
    b = CircuitBuilder(lay)
    b.x(2)
    blk = extract_block(b.build(), flags=[2], main=range(2))
    assert np.abs(blk).max() == 0.0


def test_extract_block_adjoint_dagger():
    from funcprep import adjoint
    rng = np.random.default_rng(13)
    lay = QubitLayout(main=range(2), be_flag=2)
    b = CircuitBuilder(lay)
    b.extend(random_circuit(rng, width=3, n_gates=20).gates)
    c = b.build()
    blk = extract_block(c, flags=[2], main=range(2))
    blk_dag = extract_block(adjoint(c), flags=[2], main=range(2))
    assert np.abs(blk_dag - blk.conj().T).max() < 1e-12


def test_circuit_unitary_agrees_with_oracle():
    rng = np.random.default_rng(14)
    c = random_circuit(rng, width=3, n_gates=25)
    assert np.abs(circuit_unitary(c) - dense_unitary(c)).max() < 1e-12


def test_analyze_accounting():
    lay = QubitLayout(main=range(2), be_flag=2, pure_ancillas=range(3, 4))
    b = CircuitBuilder(lay)
    b.h(0)
    b.h(2)          # flag in superposition: success 1/2
    out = analyze(b.build())
    assert abs(out.success_probability - 0.5) < 1e-12
    assert abs(out.success_probability + out.junk_norm - 1.0) < 1e-12
    assert out.ancilla_leakage == 0.0
    assert np.allclose(out.post_state, [1 / np.sqrt(2), 1 / np.sqrt(2), 0, 0])
