"""Gate primitives, durations, and parallel-layer scheduling.

Durations are in single-qubit gate-time units: 1 for one-qubit gates, 2 for
two-qubit gates.  Multi-controlled gates carry no duration of their own and
must be decomposed before timed (noisy) execution.  Qubit 0 is the least
significant bit of every register value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "GateOp",
    "Schedule",
    "schedule",
    "x",
    "h",
    "z",
    "p",
    "cnot",
    "cz",
    "cp",
    "swap",
    "mcx",
    "mcz",
    "dump_circuit",
    "parse_circuit",
]

_ARITIES = {
    # kind: (n_targets, n_controls or None for >=1, takes_param)
    "X": (1, 0, False),
    "H": (1, 0, False),
    "Z": (1, 0, False),
    "P": (1, 0, True),
    "CNOT": (1, 1, False),
    "CZ": (1, 1, False),
    "CP": (1, 1, True),
    "SWAP": (2, 0, False),
    "MCX": (1, None, False),
    "MCZ": (1, None, False),
}


@dataclass(frozen=True)
class GateOp:
    """One gate: kind, target qubits, control qubits, optional phase angle."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    param: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _ARITIES:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets, n_controls, _ = _ARITIES[self.kind]
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} target(s), got {self.targets}")
        if n_controls is None:
            if len(self.controls) < 1:
                raise ValueError(f"{self.kind} needs at least one control")
        elif len(self.controls) != n_controls:
            raise ValueError(f"{self.kind} takes {n_controls} control(s), got {self.controls}")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubits in {self}")
        if any(q < 0 for q in qubits):
            raise ValueError("negative qubit index")

    @property
    def support(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def is_multicontrolled(self) -> bool:
        return self.kind in ("MCX", "MCZ") and len(self.support) > 2

    @property
    def duration(self) -> float | None:
        """Time units, or None for gates that must be decomposed first."""
        if self.is_multicontrolled:
            return None
        return 1.0 if len(self.support) == 1 else 2.0


def x(q: int) -> GateOp:
    return GateOp("X", (q,))


def h(q: int) -> GateOp:
    return GateOp("H", (q,))


def z(q: int) -> GateOp:
    return GateOp("Z", (q,))


def p(theta: float, q: int) -> GateOp:
    return GateOp("P", (q,), param=theta)


def cnot(control: int, target: int) -> GateOp:
    return GateOp("CNOT", (target,), (control,))


def cz(a: int, b: int) -> GateOp:
    return GateOp("CZ", (b,), (a,))


def cp(theta: float, a: int, b: int) -> GateOp:
    return GateOp("CP", (b,), (a,), param=theta)


def swap(a: int, b: int) -> GateOp:
    return GateOp("SWAP", (a, b))


def mcx(controls, target: int) -> GateOp:
    controls = tuple(controls)
    if len(controls) == 1:
        return cnot(controls[0], target)
    return GateOp("MCX", (target,), controls)


def mcz(qubits) -> GateOp:
    """Phase -1 on the all-ones state of ``qubits`` (symmetric in its qubits)."""
    qubits = tuple(qubits)
    if len(qubits) == 1:
        return z(qubits[0])
    if len(qubits) == 2:
        return cz(qubits[0], qubits[1])
    return GateOp("MCZ", (qubits[-1],), qubits[:-1])


@dataclass(frozen=True)
class Schedule:
    """Greedy left-to-right layering; disjoint-support gates share a layer."""

    layers: tuple[tuple[GateOp, ...], ...]
    durations: tuple[float, ...]
    total_duration: float


def schedule(gates) -> Schedule:
    """Layer a fully decomposed circuit; layer duration is its longest gate."""
    frontier: dict[int, int] = {}
    layers: list[list[GateOp]] = []
    durations: list[float] = []
    for gate in gates:
        if gate.duration is None:
            raise ValueError(f"cannot schedule non-decomposed gate {gate}")
        layer = max((frontier.get(q, 0) for q in gate.support), default=0)
        if layer == len(layers):
            layers.append([])
            durations.append(0.0)
        layers[layer].append(gate)
        durations[layer] = max(durations[layer], gate.duration)
        for q in gate.support:
            frontier[q] = layer + 1
    return Schedule(
        layers=tuple(tuple(layer) for layer in layers),
        durations=tuple(durations),
        total_duration=float(math.fsum(durations)),
    )


def dump_circuit(gates) -> str:
    """Plain-text gate list, one gate per line: kind, controls, targets[, param]."""
    lines = []
    for g in gates:
        ctl = ",".join(map(str, g.controls)) if g.controls else "-"
        tgt = ",".join(map(str, g.targets))
        if _ARITIES[g.kind][2]:
            lines.append(f"{g.kind} {ctl} {tgt} {g.param!r}")
        else:
            lines.append(f"{g.kind} {ctl} {tgt}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> list[GateOp]:
    """Inverse of dump_circuit."""
    gates = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind, ctl, tgt = parts[0], parts[1], parts[2]
        controls = () if ctl == "-" else tuple(int(c) for c in ctl.split(","))
        targets = tuple(int(t) for t in tgt.split(","))
        param = float(parts[3]) if len(parts) > 3 else 0.0
        gates.append(GateOp(kind, targets, controls, param))
    return gates
