"""Circuit blocks: uniform-state reflection, phase comparator, group actions.

Every block restores its ancilla to |0> and touches only its declared
support.  Builders emit composite multi-controlled gates; ``decompose_block``
rewrites a block into one- and two-qubit gates, spending the block's free
(clean, otherwise untouched) ancilla to shorten multi-controlled gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gates import GateOp, cnot, cp, cz, h, mcx, mcz, p, schedule, x, z
from .groups import GroupSpec

__all__ = [
    "CircuitBlock",
    "GateCostReport",
    "build_us",
    "build_phcomp",
    "build_group_action",
    "decompose_multicontrolled",
    "decompose_block",
    "cost_report",
    "increment_gates",
]


@dataclass(frozen=True)
class CircuitBlock:
    """An ordered gate list with its declared support and ancilla bookkeeping.

    ``ancilla_used`` hold intermediate values while the block runs (and are
    returned to |0>); ``free_ancilla`` stay clean throughout and may back
    multi-controlled gate decompositions.
    """

    name: str
    gates: tuple[GateOp, ...]
    support: frozenset[int]
    ancilla_used: tuple[int, ...] = ()
    free_ancilla: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        touched = {q for g in self.gates for q in g.support}
        if not touched <= self.support:
            raise ValueError(f"gates of {self.name} touch qubits outside the declared support")

    @property
    def ancilla_count(self) -> int:
        return len(self.ancilla_used) + len(self.free_ancilla)


@dataclass(frozen=True)
class GateCostReport:
    one_qubit_count: int
    two_qubit_count: int
    scheduled_duration: float


def _resolve(count: int, explicit, start: int) -> tuple[int, ...]:
    if explicit is not None:
        return tuple(explicit)
    return tuple(range(start, start + count))


# ---------------------------------------------------------------------------
# reflection about the uniform superposition


def build_us(m: int, ancilla: int = 0, *, group_qubits=None, ancilla_qubits=None) -> CircuitBlock:
    """I - 2|s><s| on an m-qubit register: H*X sandwich around a full MCZ.

    Ancilla, when provided, stay clean and only shorten the decomposition.
    """
    if m < 1:
        raise ValueError("need at least one group qubit")
    group = _resolve(m, group_qubits, 0)
    anc = _resolve(ancilla, ancilla_qubits, m)
    gates = (
        [h(q) for q in group]
        + [x(q) for q in group]
        + [mcz(group)]
        + [x(q) for q in group]
        + [h(q) for q in group]
    )
    return CircuitBlock(
        name=f"us[{m}]",
        gates=tuple(gates),
        support=frozenset(group) | frozenset(anc),
        free_ancilla=anc,
    )


# ---------------------------------------------------------------------------
# phase comparator


def build_phcomp(
    n: int,
    ancilla: int = 0,
    *,
    a_qubits=None,
    b_qubits=None,
    ancilla_qubits=None,
) -> CircuitBlock:
    """Strict less-than comparator: amplitude of |a>|b> gains -1 iff a < b.

    Bitwise sweep from the most significant position: after NOT-ing the a
    register, the phase condition at bit i is (-a_i AND b_i) AND all more
    significant (continue) bits -a_j XOR b_j, which live on the b qubits after
    a CNOT.  Ancilla chain pairwise ANDs of (continue) bits so the phase gates
    stay three qubits wide; at most n-2 ancilla are useful.
    """
    if n < 1:
        raise ValueError("need at least one position bit")
    a_reg = _resolve(n, a_qubits, 0)
    b_reg = _resolve(n, b_qubits, n)
    anc = _resolve(ancilla, ancilla_qubits, 2 * n)
    if len(anc) > max(n - 2, 0):
        raise ValueError(f"at most {max(n - 2, 0)} ancilla are usable for n={n}")

    gates: list[GateOp] = [x(q) for q in a_reg]
    conj: list[int] = []  # qubits whose AND equals all (continue) bits so far
    chain: list[tuple[int, int, int]] = []
    cnots: list[GateOp] = []
    ai = 0
    for i in range(n - 1, -1, -1):
        gates.append(mcz((a_reg[i], b_reg[i], *conj)))
        if i == 0:
            break
        g = cnot(a_reg[i], b_reg[i])
        gates.append(g)
        cnots.append(g)
        conj.append(b_reg[i])
        if len(conj) == 2 and ai < len(anc):
            aq = anc[ai]
            ai += 1
            gates.append(mcx((conj[0], conj[1]), aq))
            chain.append((conj[0], conj[1], aq))
            conj = [aq]
    for c1, c2, aq in reversed(chain):
        gates.append(mcx((c1, c2), aq))
    gates.extend(reversed(cnots))
    gates.extend(x(q) for q in a_reg)
    return CircuitBlock(
        name=f"phcomp[{n},anc={len(anc)}]",
        gates=tuple(gates),
        support=frozenset(a_reg) | frozenset(b_reg) | frozenset(anc),
        ancilla_used=anc[:ai],
        free_ancilla=anc[ai:],
    )


# ---------------------------------------------------------------------------
# group action operators


def _decrement_gates(control: int | None, sub, chain_anc) -> tuple[list[GateOp], int]:
    """Controlled subtract-one on ``sub`` (ascending significance).

    Written as the decrementer because the AND chain then reads only settled
    bits; the incrementer is the same list reversed (all gates self-inverse).
    Returns (gates, number of chain ancilla consumed).
    """
    s = list(sub)
    length = len(s)
    pre = (control,) if control is not None else ()
    ops: list[GateOp] = [cnot(control, s[0]) if control is not None else x(s[0])]
    if length >= 2:
        ops.append(mcx(pre + (s[0],), s[1]))
    chain: list[tuple[int, int, int]] = []
    summary: int | None = None
    covered = 0
    ai = 0
    for j in range(2, length):
        if ai < len(chain_anc):
            aq = chain_anc[ai]
            ai += 1
            c1, c2 = (s[0], s[1]) if summary is None else (summary, s[j - 1])
            ops.append(mcx((c1, c2), aq))
            chain.append((c1, c2, aq))
            summary = aq
            covered = j
            ops.append(mcx(pre + (summary,), s[j]))
        else:
            lower = (summary,) + tuple(s[covered:j]) if summary is not None else tuple(s[0:j])
            ops.append(mcx(pre + lower, s[j]))
    for c1, c2, aq in reversed(chain):
        ops.append(mcx((c1, c2), aq))
    return ops, ai


def increment_gates(sub, chain_anc=()) -> list[GateOp]:
    """Add-one modulo 2**len(sub) on a register (qubit 0 least significant)."""
    dec, _ = _decrement_gates(None, sub, chain_anc)
    return list(reversed(dec))


def _cswap(control: int, q1: int, q2: int) -> list[GateOp]:
    return [cnot(q2, q1), mcx((control, q1), q2), cnot(q2, q1)]


def _controlled_rotation(control: int, pos, shift: int) -> list[GateOp]:
    """Controlled cyclic rotation of qubit contents toward less-significant bits."""
    n = len(pos)
    shift %= n
    if shift == 0:
        return []
    gates: list[GateOp] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        cycle = []
        j = start
        while not seen[j]:
            seen[j] = True
            cycle.append(j)
            j = (j + shift) % n
        for a, b in zip(cycle, cycle[1:]):
            gates.extend(_cswap(control, pos[a], pos[b]))
    return gates


def _adjacent_transposition(ctrl: int, pos, u: int, w: int) -> list[GateOp]:
    """Swap basis states u, w differing in exactly one bit (mixed-polarity MCX)."""
    diff = u ^ w
    t = diff.bit_length() - 1
    wraps = [x(pos[j]) for j in range(len(pos)) if j != t and not (u >> j) & 1]
    controls = (ctrl,) + tuple(pos[j] for j in range(len(pos)) if j != t)
    return wraps + [mcx(controls, pos[t])] + wraps


def _controlled_transposition(ctrl: int, pos, u: int, w: int) -> list[GateOp]:
    """Swap arbitrary basis states u, w via a Gray-code conjugation path."""
    path = [u]
    cur = u
    diff = u ^ w
    for j in range(len(pos)):
        if (diff >> j) & 1:
            cur ^= 1 << j
            path.append(cur)
    gates: list[GateOp] = []
    for i in range(len(path) - 2):
        gates.extend(_adjacent_transposition(ctrl, pos, path[i], path[i + 1]))
    middle = _adjacent_transposition(ctrl, pos, path[-2], path[-1])
    return gates + middle + list(reversed(gates))


def _controlled_permutation(ctrl: int, pos, perm) -> list[GateOp]:
    """Controlled |v> -> |perm[v]> from cycle-ordered basis transpositions."""
    n_values = len(perm)
    gates: list[GateOp] = []
    seen = [False] * n_values
    for start in range(n_values):
        if seen[start]:
            continue
        cycle = []
        v = start
        while not seen[v]:
            seen[v] = True
            cycle.append(v)
            v = perm[v]
        if len(cycle) < 2:
            continue
        for a, b in reversed(list(zip(cycle, cycle[1:]))):
            gates.extend(_controlled_transposition(ctrl, pos, a, b))
    return gates


def _perm_power(perm: tuple[int, ...], k: int) -> tuple[int, ...]:
    out = list(range(len(perm)))
    for _ in range(k):
        out = [perm[v] for v in out]
    return tuple(out)


def _cycle_action_gates(generator, group_qubits, pos, chain_anc) -> tuple[list[GateOp], int]:
    gates: list[GateOp] = []
    for i, g_qubit in enumerate(group_qubits):
        gates.extend(_controlled_permutation(g_qubit, pos, _perm_power(generator, 1 << i)))
    return gates, 0


def _with_extra_control(gate: GateOp, ctrl: int) -> list[GateOp]:
    kind = gate.kind
    if kind in ("X", "CNOT", "MCX"):
        return [mcx((ctrl,) + gate.controls, gate.targets[0])]
    if kind in ("Z", "CZ", "MCZ"):
        return [mcz(gate.support + (ctrl,))]
    if kind == "SWAP":
        return _cswap(ctrl, gate.targets[0], gate.targets[1])
    raise ValueError(f"cannot add a control to {kind}")


def _forward_action_gates(spec: GroupSpec, group_qubits, pos, chain_anc) -> tuple[list[GateOp], int]:
    """Gate list of |x>|v> -> |x>|g(x) v| built from controlled generator powers."""
    m = spec.index_bits
    if len(group_qubits) != m:
        raise ValueError(f"group register needs {m} qubits")
    used = 0
    gates: list[GateOp] = []
    if spec.kind == "add":
        if spec.size != 1 << len(pos):
            raise ValueError("addition group must match the position-register size")
        for i, g_qubit in enumerate(group_qubits):
            dec, ai = _decrement_gates(g_qubit, pos[i:], chain_anc)
            used = max(used, ai)
            gates.extend(reversed(dec))
        return gates, used
    if spec.kind == "spin":
        for i, g_qubit in enumerate(group_qubits):
            gates.extend(_controlled_rotation(g_qubit, pos, 1 << i))
        return gates, 0
    if spec.kind == "cycle":
        assert spec.generator is not None
        return _cycle_action_gates(spec.generator, group_qubits, pos, chain_anc)
    # two non-commuting generators with an order qubit (most significant index bit)
    assert spec.g1 is not None and spec.g2 is not None
    m1, m2 = spec.sub_index_bits
    q1 = group_qubits[:m1]
    q2 = group_qubits[m1 : m1 + m2]
    order_q = group_qubits[m1 + m2]
    b1, _ = _cycle_action_gates(spec.g1, q1, pos, ()) if m1 else ([], 0)
    b2, _ = _cycle_action_gates(spec.g2, q2, pos, ()) if m2 else ([], 0)

    def ctl(block):
        return [cg for g in block for cg in _with_extra_control(g, order_q)]

    gates = [x(order_q)] + ctl(b1) + ctl(b2) + [x(order_q)] + ctl(b2) + ctl(b1)
    return gates, 0


def build_group_action(
    spec: GroupSpec,
    inverse: bool = False,
    ancilla: int = 0,
    *,
    group_qubits=None,
    position_qubits=None,
    ancilla_qubits=None,
    n_position_bits: int | None = None,
) -> CircuitBlock:
    """Group action operator on (group register, position register).

    All emitted gates are self-inverse permutation gates, so the inverse
    operator is the same list reversed.  For the addition group the power
    blocks drop their low bits (adding 2**i never touches bits below i), and
    chain ancilla keep the carry conjunctions short.
    """
    m = spec.index_bits
    if spec.kind == "add":
        n = m
    elif spec.kind == "spin":
        n = spec.size
    else:
        n = (len(spec.generator or spec.g1 or ())).bit_length() - 1
    if n_position_bits is not None and n_position_bits != n:
        raise ValueError(f"{spec.kind} group of size {spec.size} acts on {n}-bit positions")
    group = _resolve(m, group_qubits, 0)
    pos = _resolve(n, position_qubits, m)
    anc = _resolve(ancilla, ancilla_qubits, m + n)
    if len(anc) > max(n - 2, 0):
        raise ValueError(f"at most {max(n - 2, 0)} ancilla are usable for n={n}")
    gates, used = _forward_action_gates(spec, group, pos, anc)
    if inverse:
        gates = list(reversed(gates))
    return CircuitBlock(
        name=f"gaction[{spec.kind},{'inv' if inverse else 'fwd'}]",
        gates=tuple(gates),
        support=frozenset(group) | frozenset(pos) | frozenset(anc),
        ancilla_used=anc[:used],
        free_ancilla=anc[used:],
    )


# ---------------------------------------------------------------------------
# multi-controlled gate decomposition


def _ccx_gates(a: int, b: int, t: int) -> list[GateOp]:
    half = math.pi / 2
    return [h(t), cp(half, b, t), cnot(a, b), cp(-half, b, t), cnot(a, b), cp(half, a, t), h(t)]


def _ccz_gates(a: int, b: int, t: int) -> list[GateOp]:
    half = math.pi / 2
    return [cp(half, b, t), cnot(a, b), cp(-half, b, t), cnot(a, b), cp(half, a, t)]


def _mcp_gates(controls, t: int, theta: float) -> list[GateOp]:
    """theta phase on the all-ones state of controls+target, no ancilla."""
    controls = list(controls)
    if not controls:
        return [p(theta, t)]
    if len(controls) == 1:
        return [cp(theta, controls[0], t)]
    last = controls[-1]
    rest = controls[:-1]
    flip = _mcx_bare(rest, last)
    return (
        [cp(theta / 2, last, t)]
        + flip
        + [cp(-theta / 2, last, t)]
        + flip
        + _mcp_gates(rest, t, theta / 2)
    )


def _mcx_bare(controls, t: int) -> list[GateOp]:
    controls = list(controls)
    if len(controls) == 1:
        return [cnot(controls[0], t)]
    if len(controls) == 2:
        return _ccx_gates(controls[0], controls[1], t)
    return [h(t)] + _mcp_gates(controls, t, math.pi) + [h(t)]


def _chain_controls(controls, ancilla) -> tuple[list[int], list[GateOp], list[GateOp]]:
    """AND-chain controls into clean ancilla until at most two remain."""
    eff = list(controls)
    compute: list[GateOp] = []
    uncompute: list[GateOp] = []
    chain: list[tuple[int, int, int]] = []
    for aq in ancilla:
        if len(eff) <= 2:
            break
        c1, c2 = eff[0], eff[1]
        compute.extend(_ccx_gates(c1, c2, aq))
        chain.append((c1, c2, aq))
        eff = [aq] + eff[2:]
    for c1, c2, aq in reversed(chain):
        uncompute.extend(_ccx_gates(c1, c2, aq))
    return eff, compute, uncompute


def decompose_multicontrolled(gate: GateOp, available_ancilla=()) -> list[GateOp]:
    """Rewrite an MCX/MCZ into one- and two-qubit gates.

    Clean ancilla (disjoint from the gate) absorb controls pairwise; any
    leftover width falls back to the recursive controlled-phase construction.
    Ancilla are returned to |0>.
    """
    if gate.kind not in ("MCX", "MCZ"):
        if gate.duration is not None:  # already one- or two-qubit
            return [gate]
        raise ValueError(f"{gate.kind} is not a multi-controlled gate")
    anc = [a for a in available_ancilla if a not in gate.support]
    target = gate.targets[0]
    if gate.kind == "MCX":
        controls = list(gate.controls)
        if len(controls) == 1:
            return [cnot(controls[0], target)]
        if len(controls) == 2:
            return _ccx_gates(controls[0], controls[1], target)
        eff, compute, uncompute = _chain_controls(controls, anc)
        if len(eff) == 2:
            body = _ccx_gates(eff[0], eff[1], target)
        else:
            body = _mcx_bare(eff, target)
        return compute + body + uncompute
    qubits = gate.support
    if len(qubits) == 1:
        return [z(target)]
    if len(qubits) == 2:
        return [cz(qubits[0], qubits[1])]
    if len(qubits) == 3:
        return _ccz_gates(qubits[0], qubits[1], target)
    eff, compute, uncompute = _chain_controls(list(qubits[:-1]), anc)
    if len(eff) == 2:
        body = _ccz_gates(eff[0], eff[1], target)
    else:
        body = _mcp_gates(eff, target, math.pi)
    return compute + body + uncompute


def decompose_block(block: CircuitBlock) -> CircuitBlock:
    """Expand composites into one- and two-qubit gates using the free ancilla."""
    gates: list[GateOp] = []
    for g in block.gates:
        if g.is_multicontrolled:
            gates.extend(decompose_multicontrolled(g, block.free_ancilla))
        else:
            gates.append(g)
    return CircuitBlock(
        name=block.name + ":dec",
        gates=tuple(gates),
        support=block.support,
        ancilla_used=block.ancilla_used,
        free_ancilla=block.free_ancilla,
    )


def concat_blocks(name: str, blocks) -> CircuitBlock:
    """Sequential composition; ancilla bookkeeping is the per-part union."""
    gates: list[GateOp] = []
    support: frozenset[int] = frozenset()
    used: list[int] = []
    free: set[int] | None = None
    for b in blocks:
        gates.extend(b.gates)
        support |= b.support
        used.extend(q for q in b.ancilla_used if q not in used)
        free = set(b.free_ancilla) if free is None else free & set(b.free_ancilla)
    return CircuitBlock(
        name=name,
        gates=tuple(gates),
        support=support,
        ancilla_used=tuple(used),
        free_ancilla=tuple(sorted(free or ())),
    )


def cost_report(block: CircuitBlock) -> GateCostReport:
    """Exact one-/two-qubit counts and scheduled duration of a decomposed block."""
    ones = twos = 0
    for g in block.gates:
        width = len(g.support)
        if g.is_multicontrolled:
            raise ValueError("cost_report needs a decomposed block")
        if width == 1:
            ones += 1
        else:
            twos += 1
    duration = schedule(block.gates).total_duration if block.gates else 0.0
    return GateCostReport(one_qubit_count=ones, two_qubit_count=twos, scheduled_duration=duration)
