"""Shared test oracles, independent of the package's engine internals.

Dense matrices are built from integer bit arithmetic so the strided
state-vector kernels are checked against a second implementation.
"""

from __future__ import annotations

import math

import numpy as np

SQH = 1.0 / math.sqrt(2.0)


def gate_matrix(g, nq: int) -> np.ndarray:
    dim = 1 << nq
    M = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> q) & 1 for q in range(nq)]
        ctrl_on = all(bits[c] for c in g.controls)
        kind = g.kind
        if kind in ("X", "CNOT", "MCX"):
            row = col ^ (1 << g.targets[0]) if ctrl_on else col
            M[row, col] = 1.0
        elif kind in ("Z", "CZ", "MCZ"):
            on = ctrl_on and all(bits[t] for t in g.targets)
            M[col, col] = -1.0 if on else 1.0
        elif kind in ("P", "CP"):
            on = ctrl_on and all(bits[t] for t in g.targets)
            M[col, col] = np.exp(1j * g.param) if on else 1.0
        elif kind == "H":
            t = g.targets[0]
            M[col ^ (1 << t), col] += SQH
            M[col, col] += SQH if bits[t] == 0 else -SQH
        elif kind == "SWAP":
            q1, q2 = g.targets
            d = bits[q1] ^ bits[q2]
            M[col ^ (d << q1) ^ (d << q2), col] = 1.0
        else:
            raise ValueError(kind)
    return M


def circuit_matrix(gates, nq: int) -> np.ndarray:
    M = np.eye(1 << nq, dtype=complex)
    for g in gates:
        M = gate_matrix(g, nq) @ M
    return M


def clean_ancilla_columns(nq: int, ancilla) -> list[int]:
    """Basis columns whose ancilla bits are all zero."""
    return [c for c in range(1 << nq) if all(not (c >> a) & 1 for a in ancilla)]


def ks_statistic(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    grid.sort()
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.abs(fa - fb).max())


def ks_critical(n: int, m: int, alpha_coeff: float = 1.628) -> float:
    """Two-sample critical value; 1.628 is the 1% coefficient."""
    return alpha_coeff * math.sqrt((n + m) / (n * m))


class FixedNormals:
    """Generator stand-in yielding prescribed standard normals (uniforms untouched)."""

    def __init__(self, value: float, rng: np.random.Generator):
        self.value = value
        self._rng = rng

    def standard_normal(self, size):
        return np.full(size, self.value)

    def normal(self, loc, scale):
        return loc + scale * self.value

    def random(self, *args, **kwargs):
        return self._rng.random(*args, **kwargs)

    def integers(self, *args, **kwargs):
        return self._rng.integers(*args, **kwargs)
