"""The minimization driver: oracle assembly, budgeted search loop, budgets.

One trial alternates quantum search (prepare |0>|v>|v_best>, spread the group
register, p Grover steps, measure) with a classical check of the measured
index.  The best-known value only ever decreases; the sampling ceiling t
ramps down by beta on improvement and up by gamma otherwise.  The check step
counts as one effective oracle call, so a step with p Grover calls costs
p + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import CircuitBlock, build_group_action, build_phcomp, build_us, concat_blocks, decompose_block
from .compiled import compile_gates, compile_schedule, run_compiled
from .engine import (
    DEFAULT_CAPACITY,
    QuantumState,
    RegisterLayout,
    measure_register,
    reinitialize,
    zero_state,
)
from .gates import Schedule, h, schedule
from .groups import ProblemInstance, group_apply, orbit_on_the_fly
from .noise import MEASUREMENT_TIME, NoiseParams

__all__ = [
    "GminConfig",
    "TrialResult",
    "GminRunner",
    "run_gmin",
    "build_oracle",
    "build_grov",
    "oracle_budget",
    "budget_bound_sum",
    "HARD_STOP_ALPHA",
]

# run-until-solution cap on effective calls, in units of sqrt(|G|)
HARD_STOP_ALPHA = 45.0 / 2.0


@dataclass(frozen=True)
class GminConfig:
    """Loop parameters; beta/gamma defaults are the near-optimal survey values."""

    alpha: float = 5.7
    beta: float = 0.95
    gamma: float = 1.15
    strategy: str = "ideal"
    ell: float = 1.0
    run_until_solution: bool = False
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")
        if not 1.0 < self.gamma < 4.0 / 3.0:
            raise ValueError("gamma must be in (1, 4/3)")
        if self.ell <= 0:
            raise ValueError("ell must be positive")
        if self.strategy not in ("ideal", "sem", "aem"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one trial; calls_to_solution is None if the minimum was missed."""

    v_best: int
    x_best: int
    calls_to_solution: int | None
    total_effective_calls: int
    total_all_calls: int
    runtime_units: float
    succeeded: bool
    errors_detected: int = 0


def oracle_budget(a: float, epsilon: float, N: int) -> int:
    """Effective-call budget ceil(a * sqrt(-ln eps) * sqrt(N)) for failure rate eps."""
    if a <= 0:
        raise ValueError("rate parameter must be positive")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("failure probability must be in (0, 1]")
    return math.ceil(a * math.sqrt(-math.log(epsilon)) * math.sqrt(N))


def budget_bound_sum(N: int) -> float:
    """Average-calls upper-bound sum (9/4) N / ((k+1) sqrt(k(N-k))), k = 1..N-1.

    The k = N term of the underlying derivation is degenerate (zero
    denominator) and is excluded.  The ratio to sqrt(N) approaches the 45/8
    asymptote from below.
    """
    if N < 4:
        raise ValueError("need N >= 4")
    k = np.arange(1, N, dtype=float)
    return float(np.sum(2.25 * N / ((k + 1.0) * np.sqrt(k * (N - k)))))


def build_oracle(
    instance: ProblemInstance,
    layout: RegisterLayout,
    decomposed: bool = False,
) -> CircuitBlock:
    """Sign flip on |x>|v>|w> exactly when g(x)v < w; positions are restored.

    Group action forward, phase comparison between the position registers,
    group action inverse.
    """
    anc = layout.ancilla
    action = build_group_action(
        instance.group,
        group_qubits=layout.group,
        position_qubits=layout.pos1,
        ancilla_qubits=anc,
    )
    comp = build_phcomp(
        layout.position1_bits,
        a_qubits=layout.pos1,
        b_qubits=layout.pos2,
        ancilla_qubits=anc,
    )
    inverse = build_group_action(
        instance.group,
        inverse=True,
        group_qubits=layout.group,
        position_qubits=layout.pos1,
        ancilla_qubits=anc,
    )
    parts = [action, comp, inverse]
    if decomposed:
        parts = [decompose_block(b) for b in parts]
    return concat_blocks("oracle", parts)


def build_grov(
    instance: ProblemInstance,
    layout: RegisterLayout,
    decomposed: bool = False,
) -> CircuitBlock:
    """One Grover step: the oracle followed by the group-register reflection."""
    us = build_us(layout.group_bits, group_qubits=layout.group, ancilla_qubits=layout.ancilla)
    if decomposed:
        us = decompose_block(us)
    return concat_blocks("grov", [build_oracle(instance, layout, decomposed), us])


class GminRunner:
    """Prebuilt circuits for one instance; trials are independent given RNGs.

    The ideal engine applies composite gates and accounts run-time from the
    decomposed schedule; the noisy engine executes the decomposed schedule
    with per-gate error injection and reads run-time off the state clock.
    """

    def __init__(
        self,
        instance: ProblemInstance,
        config: GminConfig,
        noise: NoiseParams | None = None,
        ancilla: int = 0,
        capacity: int = DEFAULT_CAPACITY,
    ):
        m = instance.group.index_bits
        n = instance.n_position_bits
        self.instance = instance
        self.config = config
        self.noise = noise
        self.layout = RegisterLayout(m, n, n, ancilla, capacity)
        self.group_size = instance.group.size
        grov_dec = build_grov(instance, self.layout, decomposed=True)
        self.grov_schedule: Schedule = schedule(grov_dec.gates)
        self.grov_duration = self.grov_schedule.total_duration
        self.grov_composite = build_grov(instance, self.layout).gates
        self.v_layer = schedule([h(q) for q in self.layout.group])
        self._pos_and_ancilla = self.layout.pos1 + self.layout.pos2 + self.layout.ancilla
        total = self.layout.total
        if noise is None:
            self._grov_plan = compile_gates(self.grov_composite, total)
            self._v_plan = compile_gates([h(q) for q in self.layout.group], total)
        else:
            self._grov_plan = compile_schedule(self.grov_schedule, total)
            self._v_plan = compile_schedule(self.v_layer, total)

    # -- engine steps --------------------------------------------------------

    def _prepare(self, state: QuantumState, v: int, v_best: int) -> None:
        m = self.layout.group_bits
        n = self.layout.position1_bits
        index = (v << m) | (v_best << (m + n))
        reinitialize(state, index)

    def _spread(self, state: QuantumState, rng: np.random.Generator) -> None:
        run_compiled(state, self._v_plan, self.noise, rng)

    def _grov(self, state: QuantumState, rng: np.random.Generator) -> None:
        run_compiled(state, self._grov_plan, self.noise, rng)

    def _measure(self, state: QuantumState, qubits, rng: np.random.Generator) -> int:
        return measure_register(state, qubits, rng, self.noise)

    # -- the search loop -----------------------------------------------------

    def run_trial(self, v: int, rng: np.random.Generator) -> TrialResult:
        cfg = self.config
        spec = self.instance.group
        n_bits = self.instance.n_position_bits
        true_min = orbit_on_the_fly(self.instance, v).v_rep
        sqrt_g = math.sqrt(self.group_size)
        cap = math.ceil((HARD_STOP_ALPHA if cfg.run_until_solution else cfg.alpha) * sqrt_g)

        state = zero_state(self.layout.total)
        v_best, x_best = v, 0
        t = 1.0
        c = 0
        calls_sol = 0 if v_best == true_min else None
        runtime = 0.0

        while c < cap and not (cfg.run_until_solution and v_best == true_min):
            p = int(rng.integers(0, math.ceil(t)))
            c += p + 1
            self._prepare(state, v, v_best)
            self._spread(state, rng)
            for _ in range(p):
                self._grov(state, rng)
            x = self._measure(state, self.layout.group, rng)
            runtime += 1.0 + p * self.grov_duration + MEASUREMENT_TIME
            fx = group_apply(spec, x, v, n_bits)
            if fx < v_best:
                v_best, x_best = fx, x
                t = max(1.0, cfg.beta * t)
            else:
                t = min(cfg.gamma * t, sqrt_g)
            if calls_sol is None and v_best == true_min:
                calls_sol = c

        succeeded = v_best == true_min
        if group_apply(spec, x_best, v, n_bits) != v_best:
            raise AssertionError("certificate violation: x_best does not map v to v_best")
        return TrialResult(
            v_best=v_best,
            x_best=x_best,
            calls_to_solution=calls_sol,
            total_effective_calls=c,
            total_all_calls=c,
            runtime_units=state.now if self.noise is not None else runtime,
            succeeded=succeeded,
        )


def run_gmin(
    instance: ProblemInstance,
    v: int,
    config: GminConfig,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
    ancilla: int = 0,
) -> TrialResult:
    """One trial of the minimization loop (ideal engine, or SEM when noisy)."""
    if rng is None:
        rng = np.random.default_rng(config.master_seed)
    return GminRunner(instance, config, noise=noise, ancilla=ancilla).run_trial(v, rng)
