"""Dense state-vector execution with gate timing and pre-gate noise injection.

The global basis index packs qubit 0 as its least significant bit; registers
occupy contiguous ascending qubit ranges, so a register's value reads directly
off the packed bits.  Time advances in scheduled layers (parallel disjoint
gates, layer duration = longest member); each touched qubit optionally
receives a sampled error rotation parameterized by the idle time since its
last action, applied before the gate.  Classical cycles between circuits
accrue neither time nor error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import GateOp, Schedule, schedule
from .noise import MEASUREMENT_TIME, NoiseParams, sample_error_matrices

__all__ = [
    "DEFAULT_CAPACITY",
    "RegisterLayout",
    "QuantumState",
    "zero_state",
    "basis_state",
    "reinitialize",
    "apply_gate",
    "apply_gates_untimed",
    "run_circuit",
    "measure_register",
    "dump_amplitudes",
]

DEFAULT_CAPACITY = 24

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_HADAMARD = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit assignment: group register, two position registers, ancilla."""

    group_bits: int
    position1_bits: int
    position2_bits: int
    ancilla_bits: int = 0
    capacity: int = DEFAULT_CAPACITY

    def __post_init__(self) -> None:
        if self.group_bits < 1 or self.position1_bits < 1:
            raise ValueError("group and position registers need at least one qubit")
        if self.position1_bits != self.position2_bits:
            raise ValueError("position registers must have equal width")
        max_ancilla = max(self.position1_bits - 2, 0)
        if not 0 <= self.ancilla_bits <= max_ancilla:
            raise ValueError(f"ancilla count must be in [0, {max_ancilla}]")
        if self.total > self.capacity:
            raise ValueError(f"{self.total} qubits exceed the capacity of {self.capacity}")

    @property
    def total(self) -> int:
        return self.group_bits + self.position1_bits + self.position2_bits + self.ancilla_bits

    @property
    def group(self) -> tuple[int, ...]:
        return tuple(range(self.group_bits))

    @property
    def pos1(self) -> tuple[int, ...]:
        return tuple(range(self.group_bits, self.group_bits + self.position1_bits))

    @property
    def pos2(self) -> tuple[int, ...]:
        base = self.group_bits + self.position1_bits
        return tuple(range(base, base + self.position2_bits))

    @property
    def ancilla(self) -> tuple[int, ...]:
        base = self.group_bits + self.position1_bits + self.position2_bits
        return tuple(range(base, base + self.ancilla_bits))


class QuantumState:
    """Amplitudes plus per-qubit last-action timestamps and a global clock."""

    __slots__ = ("num_qubits", "amps", "last_action", "now")

    def __init__(self, num_qubits: int, amps: np.ndarray | None = None):
        self.num_qubits = num_qubits
        if amps is None:
            amps = np.zeros(1 << num_qubits, dtype=np.complex128)
            amps[0] = 1.0
        self.amps = amps
        self.last_action = np.zeros(num_qubits, dtype=float)
        self.now = 0.0

    def norm(self) -> float:
        return float(np.sqrt(np.real(np.vdot(self.amps, self.amps))))

    def copy(self) -> "QuantumState":
        out = QuantumState(self.num_qubits, self.amps.copy())
        out.last_action = self.last_action.copy()
        out.now = self.now
        return out

    def _nd(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.num_qubits)


def zero_state(num_qubits: int) -> QuantumState:
    return QuantumState(num_qubits)


def basis_state(num_qubits: int, index: int) -> QuantumState:
    state = QuantumState(num_qubits)
    state.amps[0] = 0.0
    state.amps[index] = 1.0
    return state


def reinitialize(state: QuantumState, index: int) -> QuantumState:
    """Classically re-prepare a basis state; no time or error accrues."""
    state.amps.fill(0.0)
    state.amps[index] = 1.0
    state.last_action[:] = state.now
    return state


def _idx(nq: int, fixed: dict[int, int]) -> tuple:
    sel: list = [slice(None)] * nq
    for q, bit in fixed.items():
        sel[nq - 1 - q] = bit
    return tuple(sel)


def _apply_2x2(nd: np.ndarray, nq: int, q: int, u: np.ndarray, controls: tuple[int, ...] = ()):
    fixed = {c: 1 for c in controls}
    fixed[q] = 0
    i0 = _idx(nq, fixed)
    fixed[q] = 1
    i1 = _idx(nq, fixed)
    v0 = nd[i0]
    v1 = nd[i1]
    new0 = u[0, 0] * v0 + u[0, 1] * v1
    new1 = u[1, 0] * v0 + u[1, 1] * v1
    nd[i0] = new0
    nd[i1] = new1


def _flip(nd: np.ndarray, nq: int, q: int, controls: tuple[int, ...]):
    fixed = {c: 1 for c in controls}
    fixed[q] = 0
    i0 = _idx(nq, fixed)
    fixed[q] = 1
    i1 = _idx(nq, fixed)
    tmp = nd[i0].copy()
    nd[i0] = nd[i1]
    nd[i1] = tmp


def _phase(nd: np.ndarray, nq: int, qubits: tuple[int, ...], factor: complex):
    nd[_idx(nq, {q: 1 for q in qubits})] *= factor


def _apply_gate_unitary(state: QuantumState, gate: GateOp) -> None:
    nd = state._nd()
    nq = state.num_qubits
    kind = gate.kind
    if kind == "X" or kind == "CNOT" or kind == "MCX":
        _flip(nd, nq, gate.targets[0], gate.controls)
    elif kind == "Z" or kind == "CZ" or kind == "MCZ":
        _phase(nd, nq, gate.support, -1.0)
    elif kind == "P" or kind == "CP":
        _phase(nd, nq, gate.support, np.exp(1j * gate.param))
    elif kind == "H":
        _apply_2x2(nd, nq, gate.targets[0], _HADAMARD)
    elif kind == "SWAP":
        q1, q2 = gate.targets
        i01 = _idx(nq, {q1: 0, q2: 1})
        i10 = _idx(nq, {q1: 1, q2: 0})
        tmp = nd[i01].copy()
        nd[i01] = nd[i10]
        nd[i10] = tmp
    else:  # pragma: no cover
        raise ValueError(f"unhandled gate kind {kind}")


def _run_layer(
    state: QuantumState,
    layer,
    duration: float,
    noise: NoiseParams | None,
    rng: np.random.Generator | None,
) -> None:
    t0 = state.now
    if noise is not None:
        if rng is None:
            raise ValueError("noisy execution needs an RNG")
        touched = [q for g in layer for q in g.support]
        elapsed = t0 - state.last_action[touched]
        mats = sample_error_matrices(elapsed, noise, rng)
        nd = state._nd()
        k = 0
        for g in layer:
            for q in g.support:
                _apply_2x2(nd, state.num_qubits, q, mats[k])
                k += 1
            _apply_gate_unitary(state, g)
    else:
        for g in layer:
            _apply_gate_unitary(state, g)
    for g in layer:
        end = t0 + g.duration
        for q in g.support:
            state.last_action[q] = end
    state.now = t0 + duration


def apply_gate(
    state: QuantumState,
    gate: GateOp,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
) -> QuantumState:
    """Apply one gate as its own layer.

    Multi-controlled composites are permitted only without noise and advance
    neither the clock nor the timestamps (they carry no duration).
    """
    if gate.duration is None:
        if noise is not None:
            raise ValueError(f"decompose {gate.kind} before noisy execution")
        _apply_gate_unitary(state, gate)
        return state
    _run_layer(state, (gate,), gate.duration, noise, rng)
    return state


def apply_gates_untimed(state: QuantumState, gates) -> QuantumState:
    """Apply gates (composites allowed) without clock or noise bookkeeping."""
    for g in gates:
        _apply_gate_unitary(state, g)
    return state


def run_circuit(
    state: QuantumState,
    circuit,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
) -> QuantumState:
    """Run a Schedule or gate list; gate lists with composites run untimed."""
    if isinstance(circuit, Schedule):
        for layer, duration in zip(circuit.layers, circuit.durations):
            _run_layer(state, layer, duration, noise, rng)
        return state
    gates = list(circuit)
    if all(g.duration is not None for g in gates):
        return run_circuit(state, schedule(gates), noise, rng)
    if noise is not None:
        raise ValueError("decompose multi-controlled gates before noisy execution")
    for g in gates:
        _apply_gate_unitary(state, g)
    return state


def measure_register(
    state: QuantumState,
    qubits,
    rng: np.random.Generator,
    noise: NoiseParams | None = None,
) -> int:
    """Projectively measure a register (ascending qubit list); returns its value.

    Pending idle error is applied to the measured qubits first when noise is
    on; the clock then advances by the measurement duration.
    """
    qubits = tuple(qubits)
    if any(b - a <= 0 for a, b in zip(qubits, qubits[1:])):
        raise ValueError("register qubits must be strictly ascending")
    nq = state.num_qubits
    if noise is not None:
        elapsed = state.now - state.last_action[list(qubits)]
        mats = sample_error_matrices(elapsed, noise, rng)
        nd = state._nd()
        for q, mat in zip(qubits, mats):
            _apply_2x2(nd, nq, q, mat)
    probs = np.abs(state.amps) ** 2
    other_axes = tuple(nq - 1 - q for q in range(nq) if q not in qubits)
    marg = probs.reshape((2,) * nq).sum(axis=other_axes).ravel() if other_axes else probs
    total = marg.sum()
    u = rng.random() * total
    outcome = int(np.searchsorted(np.cumsum(marg), u, side="right"))
    outcome = min(outcome, len(marg) - 1)
    # project and renormalize
    nd = state._nd()
    fixed = {q: (outcome >> i) & 1 for i, q in enumerate(qubits)}
    sel = _idx(nq, fixed)
    kept = nd[sel] / math.sqrt(marg[outcome])
    state.amps.fill(0.0)
    nd[sel] = kept
    end = state.now + MEASUREMENT_TIME
    state.last_action[list(qubits)] = end
    state.now = end
    return outcome


def dump_amplitudes(state: QuantumState) -> str:
    """Debug text dump: one line per basis index with real and imaginary parts."""
    lines = [f"{i} {float(a.real)!r} {float(a.imag)!r}" for i, a in enumerate(state.amps)]
    return "\n".join(lines) + "\n"
