"""Pauli-twirl single-qubit error channel with T1/Tphi/T2 and timing constants.

Before each gate, every touched qubit receives exp(i vx X + i vy Y + i vz Z)
with Gaussian coefficients whose variances grow linearly in the idle time
since the qubit's last action: Var = elapsed / (2 T), with T = T1, Tphi, T2
for the x, y, z axes respectively.  The 1/2 makes the small-time decay of the
ground-state population match a 1/T1 rate; it is a model choice and the test
suite is calibrated against this module's own sampled channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gates import GateOp

__all__ = [
    "NoiseParams",
    "SQGT",
    "TWO_QUBIT_TIME",
    "MEASUREMENT_TIME",
    "derive_tphi",
    "sample_error_unitary",
    "error_rotation_matrix",
    "gate_duration",
]

SQGT = 1.0
TWO_QUBIT_TIME = 2.0
MEASUREMENT_TIME = 10.0


def derive_tphi(t1: float, t2: float, clamp: bool = False) -> float:
    """Dephasing time from 1/Tphi = 1/T2 - 1/(2 T1); infinity disables an axis.

    T2 > 2*T1 is unphysical and rejected unless ``clamp`` floors the dephasing
    rate at zero; single-axis sweeps that pin the other time at ~infinity
    need the clamp.
    """
    if t1 <= 0 or t2 <= 0:
        raise ValueError("T1 and T2 must be positive")
    rate = (0.0 if math.isinf(t2) else 1.0 / t2) - (0.0 if math.isinf(t1) else 0.5 / t1)
    if rate < 0 and not clamp:
        raise ValueError(f"T2={t2} exceeds 2*T1={2 * t1}: negative dephasing rate")
    return math.inf if rate <= 0 else 1.0 / rate


@dataclass(frozen=True)
class NoiseParams:
    """Hardware times in single-qubit gate-time units; tphi is derived."""

    t1: float
    t2: float
    clamp_dephasing: bool = False
    tphi: float = field(init=False)
    sqgt: float = SQGT
    two_qubit_time: float = TWO_QUBIT_TIME
    measurement_time: float = MEASUREMENT_TIME

    def __post_init__(self) -> None:
        object.__setattr__(self, "tphi", derive_tphi(self.t1, self.t2, self.clamp_dephasing))

    @classmethod
    def single_axis_sweep(cls, t1: float, t2: float) -> "NoiseParams":
        """Accept the unphysical T2 > 2*T1 by flooring the dephasing rate at zero."""
        return cls(t1=t1, t2=t2, clamp_dephasing=True)

    def variance_rates(self) -> np.ndarray:
        """Per-unit-time variances of (vx, vy, vz)."""
        def rate(t: float) -> float:
            return 0.0 if math.isinf(t) else 0.5 / t

        return np.array([rate(self.t1), rate(self.tphi), rate(self.t2)])


def error_rotation_matrix(vx: float, vy: float, vz: float) -> np.ndarray:
    """exp(i vx X + i vy Y + i vz Z) as an exact 2x2 unitary."""
    r = math.sqrt(vx * vx + vy * vy + vz * vz)
    if r == 0.0:
        return np.eye(2, dtype=np.complex128)
    c = math.cos(r)
    s = math.sin(r) / r
    return np.array(
        [
            [c + 1j * s * vz, s * (vy + 1j * vx)],
            [s * (-vy + 1j * vx), c - 1j * s * vz],
        ],
        dtype=np.complex128,
    )


def sample_error_unitary(
    elapsed: float, params: NoiseParams, rng: np.random.Generator
) -> np.ndarray:
    """Draw one error unitary for a qubit idle for ``elapsed`` time units."""
    if elapsed < 0:
        raise ValueError("elapsed time must be nonnegative")
    sigma = np.sqrt(elapsed * params.variance_rates())
    vx, vy, vz = rng.standard_normal(3) * sigma
    return error_rotation_matrix(vx, vy, vz)


def sample_error_matrices(
    elapsed: np.ndarray, params: NoiseParams, rng: np.random.Generator
) -> np.ndarray:
    """Batch of error unitaries, shape (k, 2, 2), one per elapsed entry."""
    k = len(elapsed)
    v = rng.standard_normal((k, 3)) * np.sqrt(
        np.asarray(elapsed)[:, None] * params.variance_rates()[None, :]
    )
    r = np.sqrt(np.sum(v * v, axis=1))
    c = np.cos(r)
    s = np.ones_like(r)
    nz = r > 0
    s[nz] = np.sin(r[nz]) / r[nz]
    out = np.empty((k, 2, 2), dtype=np.complex128)
    out[:, 0, 0] = c + 1j * s * v[:, 2]
    out[:, 0, 1] = s * (v[:, 1] + 1j * v[:, 0])
    out[:, 1, 0] = s * (-v[:, 1] + 1j * v[:, 0])
    out[:, 1, 1] = c - 1j * s * v[:, 2]
    return out


def gate_duration(gate: GateOp | str) -> float:
    """Duration in time units: 1 (one-qubit), 2 (two-qubit), 10 (measurement)."""
    if isinstance(gate, str):
        if gate == "measure":
            return MEASUREMENT_TIME
        raise ValueError(f"unknown timed operation {gate!r}")
    d = gate.duration
    if d is None:
        raise ValueError(f"multi-controlled gate {gate.kind} must be decomposed first")
    return d
