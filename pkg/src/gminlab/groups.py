"""Finite groups acting on integer position labels: orbits and classical solvers.

Positions are their own integer labels; the orbit representative of v is the
smallest label reachable from v under the group action, together with the
smallest group index that maps v onto it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupSpec",
    "ProblemInstance",
    "OrbitResult",
    "LookupTable",
    "group_apply",
    "orbit_on_the_fly",
    "build_lookup",
]


def _perm_order(perm: tuple[int, ...]) -> int:
    """Order of a permutation given as a value map (lcm of cycle lengths)."""
    n = len(perm)
    seen = [False] * n
    order = 1
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            v = perm[v]
            length += 1
        order = math.lcm(order, length)
    return order


def _check_perm(perm: tuple[int, ...], what: str) -> None:
    n = len(perm)
    if n == 0 or (n & (n - 1)) != 0:
        raise ValueError(f"{what} must act on a power-of-two position set, got {n} entries")
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{what} is not a permutation of 0..{n - 1}")


@dataclass(frozen=True)
class GroupSpec:
    """A built-in group together with its indexed action on position labels.

    kinds:
      - "add":     addition modulo ``size`` (requires size == |V|, a power of two)
      - "spin":    cyclic rotation of the n-bit string, one shift per site
                   (size == number of sites)
      - "cycle":   single-cycle abelian group generated by ``generator``
      - "two_gen": two non-commuting generators plus an order bit; redundant
                   index states are permitted

    The quantum encoding (``index_bits``) additionally requires ``size`` to be
    a power of two; purely classical use accepts any positive size.
    """

    kind: str
    size: int
    generator: tuple[int, ...] | None = None
    g1: tuple[int, ...] | None = None
    g2: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("add", "spin", "cycle", "two_gen"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("group size must be positive")
        if self.kind == "add" and (self.size & (self.size - 1)) != 0:
            raise ValueError("add group size must be a power of two")
        if self.kind == "cycle":
            if self.generator is None:
                raise ValueError("cycle group needs a generator permutation")
            _check_perm(self.generator, "generator")
            if _perm_order(self.generator) != self.size:
                raise ValueError("generator order must equal the group size")
        if self.kind == "two_gen":
            if self.g1 is None or self.g2 is None:
                raise ValueError("two_gen group needs both generator permutations")
            for name, g in (("g1", self.g1), ("g2", self.g2)):
                _check_perm(g, name)
                order = _perm_order(g)
                if order & (order - 1) != 0:
                    raise ValueError(f"{name} order must be a power of two, got {order}")
            if len(self.g1) != len(self.g2):
                raise ValueError("g1 and g2 must act on the same position set")
            expected = 2 * _perm_order(self.g1) * _perm_order(self.g2)
            if self.size != expected:
                raise ValueError(f"two_gen size must be {expected} (g1/g2 powers plus order bit)")

    # -- constructors ------------------------------------------------------

    @classmethod
    def add_mod(cls, n_values: int) -> "GroupSpec":
        return cls(kind="add", size=n_values)

    @classmethod
    def spin_translation(cls, n_sites: int) -> "GroupSpec":
        return cls(kind="spin", size=n_sites)

    @classmethod
    def single_cycle(cls, generator: tuple[int, ...]) -> "GroupSpec":
        return cls(kind="cycle", size=_perm_order(tuple(generator)), generator=tuple(generator))

    @classmethod
    def two_generator(cls, g1: tuple[int, ...], g2: tuple[int, ...]) -> "GroupSpec":
        g1 = tuple(g1)
        g2 = tuple(g2)
        size = 2 * _perm_order(g1) * _perm_order(g2)
        return cls(kind="two_gen", size=size, g1=g1, g2=g2)

    # -- quantum encoding --------------------------------------------------

    @property
    def index_bits(self) -> int:
        """Number of qubits of the group register (requires power-of-two size)."""
        if self.size & (self.size - 1) != 0:
            raise ValueError(f"group of size {self.size} has no power-of-two index register")
        return self.size.bit_length() - 1

    @property
    def sub_index_bits(self) -> tuple[int, int]:
        """(m1, m2) sub-register widths of a two_gen group index."""
        if self.kind != "two_gen":
            raise ValueError("sub_index_bits only applies to two_gen groups")
        assert self.g1 is not None and self.g2 is not None
        m1 = _perm_order(self.g1).bit_length() - 1
        m2 = _perm_order(self.g2).bit_length() - 1
        return m1, m2


@dataclass(frozen=True)
class ProblemInstance:
    """A group action on the position set [0, 2**n_position_bits)."""

    group: GroupSpec
    n_position_bits: int

    def __post_init__(self) -> None:
        if self.n_position_bits < 1:
            raise ValueError("need at least one position bit")
        n_values = 1 << self.n_position_bits
        g = self.group
        if g.kind == "add" and g.size != n_values:
            raise ValueError("add group size must equal the number of positions")
        if g.kind == "spin" and g.size != self.n_position_bits:
            raise ValueError("spin translation needs one shift per site")
        if g.kind == "cycle" and len(g.generator or ()) != n_values:
            raise ValueError("generator must act on the full position set")
        if g.kind == "two_gen" and len(g.g1 or ()) != n_values:
            raise ValueError("generators must act on the full position set")

    @property
    def n_values(self) -> int:
        return 1 << self.n_position_bits


@dataclass(frozen=True)
class OrbitResult:
    """Minimum label in an orbit, a connecting group index, and the orbit size."""

    v_rep: int
    x_rep: int
    orbit_size: int


def _check_range(spec: GroupSpec, x: int, v: int, n_values: int) -> None:
    if not 0 <= x < spec.size:
        raise ValueError(f"group index {x} out of range [0, {spec.size})")
    if not 0 <= v < n_values:
        raise ValueError(f"position {v} out of range [0, {n_values})")


def _rotate_right(v: int, shift: int, n_bits: int) -> int:
    """Cyclic rotation of an n-bit string toward less-significant bits."""
    shift %= n_bits
    mask = (1 << n_bits) - 1
    return ((v >> shift) | (v << (n_bits - shift))) & mask


def _perm_apply_times(perm: tuple[int, ...], times: int, v: int) -> int:
    for _ in range(times):
        v = perm[v]
    return v


def group_apply(spec: GroupSpec, x: int, v: int, n_position_bits: int | None = None) -> int:
    """Apply the x-th group element to position v, returning g(x)*v."""
    if spec.kind == "add":
        _check_range(spec, x, v, spec.size)
        return (x + v) % spec.size
    if spec.kind == "spin":
        n_bits = spec.size if n_position_bits is None else n_position_bits
        _check_range(spec, x, v, 1 << n_bits)
        return _rotate_right(v, x, n_bits)
    if spec.kind == "cycle":
        assert spec.generator is not None
        _check_range(spec, x, v, len(spec.generator))
        return _perm_apply_times(spec.generator, x, v)
    # two_gen: index is x1 | x2 << m1 | order << (m1 + m2), x1 least significant
    assert spec.g1 is not None and spec.g2 is not None
    _check_range(spec, x, v, len(spec.g1))
    m1, m2 = spec.sub_index_bits
    x1 = x & ((1 << m1) - 1)
    x2 = (x >> m1) & ((1 << m2) - 1)
    order = x >> (m1 + m2)
    if order == 0:
        return _perm_apply_times(spec.g2, x2, _perm_apply_times(spec.g1, x1, v))
    return _perm_apply_times(spec.g1, x1, _perm_apply_times(spec.g2, x2, v))


def _generator_value_map(instance: ProblemInstance) -> np.ndarray:
    """Value map of g(1) for single-generator kinds, as an int array."""
    spec = instance.group
    n_values = instance.n_values
    if spec.kind == "add":
        return (np.arange(n_values) + 1) % n_values
    if spec.kind == "spin":
        vs = np.arange(n_values)
        n = instance.n_position_bits
        return ((vs >> 1) | ((vs & 1) << (n - 1))) & (n_values - 1)
    if spec.kind == "cycle":
        return np.asarray(spec.generator, dtype=np.int64)
    raise ValueError(f"{spec.kind} group has no single generator")


def orbit_on_the_fly(instance: ProblemInstance, v: int) -> OrbitResult:
    """Walk the full orbit of v to find its representative.

    Memory O(1) apart from the visited-value set used to report the orbit
    size; ties in the representative index break toward the smallest x.
    """
    spec = instance.group
    _check_range(spec, 0, v, instance.n_values)
    if spec.kind == "two_gen":
        best, x_best = v, 0
        values = set()
        for x in range(spec.size):
            u = group_apply(spec, x, v, instance.n_position_bits)
            values.add(u)
            if u < best:
                best, x_best = u, x
        return OrbitResult(v_rep=best, x_rep=x_best, orbit_size=len(values))
    gen = _generator_value_map(instance)
    best, x_best = v, 0
    cur = v
    values = {v}
    for x in range(1, spec.size):
        cur = int(gen[cur])
        values.add(cur)
        if cur < best:
            best, x_best = cur, x
    return OrbitResult(v_rep=best, x_rep=x_best, orbit_size=len(values))


class CapacityError(ValueError):
    """Raised when a lookup table would exceed the configured size guard."""


@dataclass(frozen=True)
class LookupTable:
    """Orbit representatives for every position, |V| entries."""

    instance: ProblemInstance
    v_rep: np.ndarray = field(repr=False)
    x_rep: np.ndarray = field(repr=False)
    orbit_size: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.v_rep)

    def __getitem__(self, v: int) -> OrbitResult:
        return OrbitResult(
            v_rep=int(self.v_rep[v]),
            x_rep=int(self.x_rep[v]),
            orbit_size=int(self.orbit_size[v]),
        )

    def representatives(self) -> np.ndarray:
        """Sorted distinct orbit representatives."""
        return np.unique(self.v_rep)


def build_lookup(instance: ProblemInstance, max_positions: int = 1 << 16) -> LookupTable:
    """Tabulate orbit_on_the_fly for every position label.

    Refuses instances whose table would exceed ``max_positions`` entries.
    """
    n_values = instance.n_values
    if n_values > max_positions:
        raise CapacityError(
            f"lookup table of {n_values} entries exceeds the {max_positions}-entry guard"
        )
    spec = instance.group
    vs = np.arange(n_values, dtype=np.int64)
    best = vs.copy()
    x_rep = np.zeros(n_values, dtype=np.int64)
    if spec.kind == "two_gen":
        # indexed words need not close under composition, so image sets are
        # not equivalence classes: count each image set directly
        images = [{int(v)} for v in vs]
        for x in range(1, spec.size):
            cur = np.fromiter(
                (group_apply(spec, x, int(v), instance.n_position_bits) for v in vs),
                dtype=np.int64,
                count=n_values,
            )
            for v in range(n_values):
                images[v].add(int(cur[v]))
            improved = cur < best
            best[improved] = cur[improved]
            x_rep[improved] = x
        sizes = np.array([len(s) for s in images], dtype=np.int64)
        return LookupTable(instance=instance, v_rep=best, x_rep=x_rep, orbit_size=sizes)
    gen = _generator_value_map(instance)
    cur = vs.copy()
    for x in range(1, spec.size):
        cur = gen[cur]
        improved = cur < best
        best[improved] = cur[improved]
        x_rep[improved] = x
    # true group action: orbit size = multiplicity of the shared representative
    reps, inverse, counts = np.unique(best, return_inverse=True, return_counts=True)
    return LookupTable(instance=instance, v_rep=best, x_rep=x_rep, orbit_size=counts[inverse])
