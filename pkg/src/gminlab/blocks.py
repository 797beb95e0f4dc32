"""Symmetry-adapted basis machinery for one-dimensional representations.

A Hamiltonian commuting with a cyclic group action block-diagonalizes in the
basis of character-weighted orbit sums.  Blocks are indexed by the
representation label alpha; rows and columns by orbit representatives whose
adapted state survives (non-free orbits can produce zero-norm states, which
are excluded).  Desk scale only: dense matrices throughout.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .groups import GroupSpec, LookupTable, ProblemInstance, build_lookup, group_apply

__all__ = [
    "BlockIndex",
    "SymmetryBlock",
    "SymmetryError",
    "character",
    "build_block",
    "block_spectra",
    "validate_symmetry",
    "cycle_adjacency",
    "heisenberg_chain",
    "xy_chain",
    "HAMILTONIANS",
]

_NORM_TOL = 1e-8


class SymmetryError(ValueError):
    """The matrix does not commute with the group action."""


@dataclass(frozen=True)
class BlockIndex:
    """Representation label alpha of a cyclic group, in [0, |G|)."""

    alpha: int
    group_size: int

    def __post_init__(self) -> None:
        if not 0 <= self.alpha < self.group_size:
            raise ValueError(f"alpha {self.alpha} out of range [0, {self.group_size})")


def character(spec: GroupSpec, alpha: int, x: int) -> complex:
    """Character exp(2 pi i alpha x / |G|) of the alpha-th representation."""
    if spec.kind == "two_gen":
        raise ValueError("characters implemented for cyclic (single-generator) groups only")
    if not 0 <= alpha < spec.size or not 0 <= x < spec.size:
        raise ValueError("alpha and x must lie in [0, |G|)")
    return cmath.exp(2j * cmath.pi * alpha * x / spec.size)


@dataclass(frozen=True)
class SymmetryBlock:
    """One alpha block: its surviving representatives and dense matrix."""

    alpha: int
    representatives: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    norms: tuple[float, ...]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _generator_perms(instance: ProblemInstance) -> list[tuple[str, np.ndarray]]:
    spec = instance.group
    vs = np.arange(instance.n_values)
    if spec.kind == "two_gen":
        out = []
        for name, g in (("g1", spec.g1), ("g2", spec.g2)):
            out.append((name, np.asarray(g, dtype=np.int64)))
        return out
    gen = np.fromiter(
        (group_apply(spec, 1, int(v), instance.n_position_bits) for v in vs),
        dtype=np.int64,
        count=instance.n_values,
    ) if spec.size > 1 else vs.copy()
    return [("generator", gen)]


def validate_symmetry(H: np.ndarray, instance: ProblemInstance, tol: float = 1e-10) -> None:
    """Require H[g(u), g(v)] == H[u, v] for every group generator."""
    for name, perm in _generator_perms(instance):
        dev = np.abs(H[np.ix_(perm, perm)] - H).max()
        if dev > tol:
            raise SymmetryError(
                f"matrix does not commute with the group action ({name}: deviation {dev:.2e})"
            )


def _adapted_vector(instance: ProblemInstance, lookup: LookupTable, alpha: int,
                    rep: int) -> np.ndarray:
    """Unnormalized sum_x chi*(x) |g(x) rep> over the full group."""
    spec = instance.group
    vec = np.zeros(instance.n_values, dtype=complex)
    for x in range(spec.size):
        chi = character(spec, alpha, x)
        vec[group_apply(spec, x, rep, instance.n_position_bits)] += chi.conjugate()
    return vec


def build_block(
    H: np.ndarray,
    instance: ProblemInstance,
    alpha: int,
    representatives=None,
    lookup: LookupTable | None = None,
) -> SymmetryBlock:
    """Dense block of H in the alpha sector.

    Free orbits use the character-weighted orbit sum directly: the entry at
    (rep_v, rep_u) is sum over v in orbit(rep_v) of chi_alpha(x_v) H[v, rep_u]
    with g(x_v) v = rep_v.  Orbits with nontrivial stabilizers fall back to
    explicitly built adapted vectors; zero-norm combinations are dropped.
    """
    H = np.asarray(H)
    validate_symmetry(H, instance)
    spec = instance.group
    if lookup is None:
        lookup = build_lookup(instance)
    if representatives is None:
        reps = [int(r) for r in lookup.representatives()]
    else:
        reps = list(representatives)
    all_free = bool(np.all(lookup.orbit_size[reps] == spec.size)) and representatives is None
    if all_free:
        cols = []
        kept = reps
        norms = [1.0 / np.sqrt(spec.size)] * len(reps)
        chi = np.array([character(spec, alpha, int(x)) for x in range(spec.size)])
        chi_of = chi[lookup.x_rep]
        block = np.empty((len(reps), len(reps)), dtype=complex)
        for j, rep_u in enumerate(reps):
            weighted = H[:, rep_u] * chi_of
            for i, rep_v in enumerate(reps):
                members = np.flatnonzero(lookup.v_rep == rep_v)
                block[i, j] = weighted[members].sum()
        return SymmetryBlock(alpha=alpha, representatives=tuple(reps),
                             matrix=block, norms=tuple(norms))
    vectors = []
    kept = []
    norms = []
    for rep in reps:
        vec = _adapted_vector(instance, lookup, alpha, rep)
        norm = np.linalg.norm(vec)
        if norm < _NORM_TOL:
            continue
        vectors.append(vec / norm)
        kept.append(rep)
        norms.append(float(norm))
    if not vectors:
        return SymmetryBlock(alpha=alpha, representatives=(),
                             matrix=np.zeros((0, 0), dtype=complex), norms=())
    W = np.column_stack(vectors)
    return SymmetryBlock(alpha=alpha, representatives=tuple(kept),
                         matrix=W.conj().T @ H @ W, norms=tuple(norms))


def block_spectra(H: np.ndarray, instance: ProblemInstance) -> np.ndarray:
    """Sorted union of all block eigenvalues (with multiplicity)."""
    lookup = build_lookup(instance)
    values = []
    for alpha in range(instance.group.size):
        blk = build_block(H, instance, alpha, lookup=lookup)
        if blk.matrix.size:
            values.append(blk.eigenvalues())
    return np.sort(np.concatenate(values))


# ---------------------------------------------------------------------------
# test Hamiltonians


def cycle_adjacency(n_values: int) -> np.ndarray:
    """Adjacency matrix of the n-cycle (circulant, commutes with addition)."""
    H = np.zeros((n_values, n_values))
    idx = np.arange(n_values)
    H[idx, (idx + 1) % n_values] = 1.0
    H[(idx + 1) % n_values, idx] = 1.0
    return H


def _spin_chain(n_sites: int, jz: float) -> np.ndarray:
    """Nearest-neighbor spin chain with periodic boundary, bit i = site i."""
    dim = 1 << n_sites
    H = np.zeros((dim, dim))
    for state in range(dim):
        for i in range(n_sites):
            j = (i + 1) % n_sites
            bi = (state >> i) & 1
            bj = (state >> j) & 1
            if bi == bj:
                H[state, state] += 0.25 * jz
            else:
                H[state, state] -= 0.25 * jz
                flipped = state ^ (1 << i) ^ (1 << j)
                H[flipped, state] += 0.5
    return H


def heisenberg_chain(n_sites: int) -> np.ndarray:
    return _spin_chain(n_sites, jz=1.0)


def xy_chain(n_sites: int) -> np.ndarray:
    return _spin_chain(n_sites, jz=0.0)


HAMILTONIANS = {
    "cycle-adjacency": cycle_adjacency,
    "heisenberg": heisenberg_chain,
    "xy": xy_chain,
}
