"""Compiled executor for repeatedly applied circuits.

A circuit that runs thousands of times per experiment (every Grover step is
the same block) is precompiled into flat op arrays consumed by one numba
kernel per application.  For noisy execution the idle times between touches
are schedule constants except for each qubit's first touch, so the whole
error stream can be sampled in a single vectorized draw per application.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


from .gates import GateOp, Schedule
from .noise import NoiseParams

__all__ = ["CompiledCircuit", "compile_gates", "compile_schedule", "run_compiled"]

# op kinds
_FLIP = 0   # X/CNOT/MCX: toggle target where control mask is set
_PHASE = 1  # Z/CZ/MCZ/P/CP: multiply masked states by a phase
_DENSE = 2  # 2x2 unitary on one qubit (H, error rotations)
_SWAP = 3   # exchange two qubits

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_H_MATRIX = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)


class _Ops:
    """Op-stream accumulator; dynamic slots hold per-call error matrices."""

    def __init__(self) -> None:
        self.rows: list[tuple[int, int, int, int, complex, int, bool]] = []
        self.static_mats: list[np.ndarray] = []
        self.n_dynamic = 0

    def gate(self, g: GateOp) -> None:
        kind = g.kind
        if kind in ("X", "CNOT", "MCX"):
            cm = sum(1 << c for c in g.controls)
            self.rows.append((_FLIP, g.targets[0], 0, cm, 0j, -1, False))
        elif kind in ("Z", "CZ", "MCZ"):
            cm = sum(1 << q for q in g.support)
            self.rows.append((_PHASE, 0, 0, cm, -1.0 + 0j, -1, False))
        elif kind in ("P", "CP"):
            cm = sum(1 << q for q in g.support)
            self.rows.append((_PHASE, 0, 0, cm, np.exp(1j * g.param), -1, False))
        elif kind == "H":
            self.static_mats.append(_H_MATRIX)
            self.rows.append((_DENSE, g.targets[0], 0, 0, 0j, len(self.static_mats) - 1, False))
        elif kind == "SWAP":
            self.rows.append((_SWAP, g.targets[0], g.targets[1], 0, 0j, -1, False))
        else:  # pragma: no cover
            raise ValueError(f"cannot compile {kind}")

    def error_slot(self, qubit: int) -> int:
        slot = self.n_dynamic
        self.rows.append((_DENSE, qubit, 0, 0, 0j, slot, True))
        self.n_dynamic += 1
        return slot


@dataclass
class CompiledCircuit:
    """Flat op stream plus the noise/timing plan of one circuit."""

    num_qubits: int
    kinds: np.ndarray
    qa: np.ndarray
    qb: np.ndarray
    cmask: np.ndarray
    phase: np.ndarray
    mat_idx: np.ndarray
    mats: np.ndarray          # slots [0, n_dynamic) rewritten per noisy call
    n_dynamic: int
    touch_q: np.ndarray       # per error slot: which qubit
    touch_first: np.ndarray   # first touch -> elapsed depends on entry clock
    touch_const: np.ndarray   # constant idle time for later touches
    touch_start: np.ndarray   # layer start offset of the touch
    touched_qubits: np.ndarray
    touched_end: np.ndarray   # last-action offsets written back after a run
    total_duration: float


def _pack(num_qubits: int, ops: _Ops, noise_plan=None) -> CompiledCircuit:
    nd = ops.n_dynamic
    mats = np.empty((nd + len(ops.static_mats), 2, 2), dtype=np.complex128)
    for i, m in enumerate(ops.static_mats):
        mats[nd + i] = m
    mat_idx = np.array(
        [slot if dyn else (nd + slot if slot >= 0 else -1)
         for (_, _, _, _, _, slot, dyn) in ops.rows],
        dtype=np.int64,
    )
    if noise_plan is None:
        empty_i = np.empty(0, dtype=np.int64)
        noise_plan = (empty_i, np.empty(0, dtype=bool), np.empty(0), np.empty(0),
                      empty_i, np.empty(0), 0.0)
    touch_q, touch_first, touch_const, touch_start, touched_q, touched_end, total = noise_plan
    return CompiledCircuit(
        num_qubits=num_qubits,
        kinds=np.array([r[0] for r in ops.rows], dtype=np.int64),
        qa=np.array([r[1] for r in ops.rows], dtype=np.int64),
        qb=np.array([r[2] for r in ops.rows], dtype=np.int64),
        cmask=np.array([r[3] for r in ops.rows], dtype=np.int64),
        phase=np.array([r[4] for r in ops.rows], dtype=np.complex128),
        mat_idx=mat_idx,
        mats=mats,
        n_dynamic=nd,
        touch_q=touch_q,
        touch_first=touch_first,
        touch_const=touch_const,
        touch_start=touch_start,
        touched_qubits=touched_q,
        touched_end=touched_end,
        total_duration=float(total),
    )


def compile_gates(gates, num_qubits: int) -> CompiledCircuit:
    """Untimed compilation; composites are allowed (mask-encoded)."""
    ops = _Ops()
    for g in gates:
        ops.gate(g)
    return _pack(num_qubits, ops)


def compile_schedule(sched: Schedule, num_qubits: int) -> CompiledCircuit:
    """Timed compilation with one error slot per (gate, touched qubit).

    Idle times are constants of the schedule except each qubit's first touch,
    whose elapsed time depends on the caller's clock at entry.
    """
    ops = _Ops()
    touch_q: list[int] = []
    touch_first: list[bool] = []
    touch_const: list[float] = []
    touch_start: list[float] = []
    last_end: dict[int, float] = {}
    t = 0.0
    for layer, duration in zip(sched.layers, sched.durations):
        for g in layer:
            for q in g.support:
                touch_q.append(q)
                touch_first.append(q not in last_end)
                touch_const.append(t - last_end.get(q, 0.0))
                touch_start.append(t)
                ops.error_slot(q)
            ops.gate(g)
            for q in g.support:
                last_end[q] = t + g.duration
        t += duration
    touched = np.array(sorted(last_end), dtype=np.int64)
    ends = np.array([last_end[int(q)] for q in touched], dtype=float)
    plan = (
        np.array(touch_q, dtype=np.int64),
        np.array(touch_first, dtype=bool),
        np.array(touch_const, dtype=float),
        np.array(touch_start, dtype=float),
        touched,
        ends,
        float(sched.total_duration),
    )
    return _pack(num_qubits, ops, plan)


@njit(cache=True)
def _exec(amps, kinds, qa, qb, cmask, phase, mat_idx, mats):  # pragma: no cover
    dim = amps.size
    for k in range(kinds.size):
        kind = kinds[k]
        if kind == _FLIP:
            tbit = np.int64(1) << qa[k]
            cm = cmask[k]
            for i in range(dim):
                if (i & cm) == cm and (i & tbit) == 0:
                    j = i | tbit
                    tmp = amps[i]
                    amps[i] = amps[j]
                    amps[j] = tmp
        elif kind == _PHASE:
            cm = cmask[k]
            ph = phase[k]
            for i in range(dim):
                if (i & cm) == cm:
                    amps[i] = amps[i] * ph
        elif kind == _DENSE:
            tbit = np.int64(1) << qa[k]
            u = mats[mat_idx[k]]
            u00 = u[0, 0]
            u01 = u[0, 1]
            u10 = u[1, 0]
            u11 = u[1, 1]
            for i in range(dim):
                if (i & tbit) == 0:
                    j = i | tbit
                    a = amps[i]
                    b = amps[j]
                    amps[i] = u00 * a + u01 * b
                    amps[j] = u10 * a + u11 * b
        else:  # swap
            b1 = np.int64(1) << qa[k]
            b2 = np.int64(1) << qb[k]
            for i in range(dim):
                if (i & b1) == b1 and (i & b2) == 0:
                    j = (i ^ b1) | b2
                    tmp = amps[i]
                    amps[i] = amps[j]
                    amps[j] = tmp


def _fill_error_mats(plan: CompiledCircuit, elapsed: np.ndarray,
                     noise: NoiseParams, rng: np.random.Generator) -> None:
    draws = rng.standard_normal((plan.n_dynamic, 3))
    v = draws * np.sqrt(elapsed[:, None] * noise.variance_rates()[None, :])
    r = np.sqrt(np.sum(v * v, axis=1))
    c = np.cos(r)
    s = np.ones_like(r)
    nz = r > 0
    s[nz] = np.sin(r[nz]) / r[nz]
    mats = plan.mats
    mats[: plan.n_dynamic, 0, 0] = c + 1j * s * v[:, 2]
    mats[: plan.n_dynamic, 0, 1] = s * (v[:, 1] + 1j * v[:, 0])
    mats[: plan.n_dynamic, 1, 0] = s * (-v[:, 1] + 1j * v[:, 0])
    mats[: plan.n_dynamic, 1, 1] = c - 1j * s * v[:, 2]


def run_compiled(
    state,
    plan: CompiledCircuit,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
):
    """Apply a compiled circuit to a QuantumState, with optional noise/timing."""
    if plan.n_dynamic:
        if noise is None or rng is None:
            raise ValueError("this plan was compiled with noise slots; pass noise and rng")
        t0 = state.now
        elapsed = plan.touch_const.copy()
        first = plan.touch_first
        elapsed[first] = t0 + plan.touch_start[first] - state.last_action[plan.touch_q[first]]
        _fill_error_mats(plan, elapsed, noise, rng)
    _exec(state.amps, plan.kinds, plan.qa, plan.qb, plan.cmask, plan.phase,
          plan.mat_idx, plan.mats)
    if plan.total_duration or plan.n_dynamic:
        t0 = state.now
        state.last_action[plan.touched_qubits] = t0 + plan.touched_end
        state.now = t0 + plan.total_duration
    return state
