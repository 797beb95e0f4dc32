"""Active error mitigation: measure-and-check search loop plus its predictor.

After every Grover step the position registers (and any shared ancilla) are
measured; a mismatch against the classically known values flags the iteration
as errored, aborts the remaining steps, and the group register is measured
and checked anyway - the salvage is nearly free.  Errored steps count only
against the hard-stop total c2, never the effective budget c1, and the step
count p is reused (not re-sampled) after an error so short searches gain no
survivorship bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import zero_state
from .gmin import HARD_STOP_ALPHA, GminConfig, GminRunner, TrialResult
from .groups import ProblemInstance, group_apply, orbit_on_the_fly
from .noise import MEASUREMENT_TIME, NoiseParams

__all__ = [
    "AemAnalyticParams",
    "AemRunner",
    "run_gmin_aem",
    "aem_success_predict",
    "simulate_abstract_channel",
    "abstract_channel_expectation",
]


class AemRunner(GminRunner):
    """Algorithm loop with per-step position checks; shares the prebuilt circuits."""

    def run_trial(self, v: int, rng: np.random.Generator) -> TrialResult:
        cfg = self.config
        spec = self.instance.group
        n_bits = self.instance.n_position_bits
        mask = (1 << n_bits) - 1
        true_min = orbit_on_the_fly(self.instance, v).v_rep
        g_size = self.group_size
        sqrt_g = math.sqrt(g_size)
        c1_cap = math.ceil((HARD_STOP_ALPHA if cfg.run_until_solution else cfg.alpha) * sqrt_g)
        c2_cap = cfg.ell * g_size

        state = zero_state(self.layout.total)
        v_best, x_best = v, 0
        t = 1.0
        c1 = c2 = 0
        p = 0
        good = True
        errors = 0
        calls_sol = 0 if v_best == true_min else None
        runtime = 0.0

        while (
            c1 < c1_cap
            and c2 < c2_cap
            and not (cfg.run_until_solution and v_best == true_min)
        ):
            if good:
                p = int(rng.integers(0, math.ceil(t)))
            else:
                good = True
            self._prepare(state, v, v_best)
            self._spread(state, rng)
            runtime += 1.0
            for i in range(1, p + 1):
                self._grov(state, rng)
                w = self._measure(state, self._pos_and_ancilla, rng)
                runtime += self.grov_duration + MEASUREMENT_TIME
                v1 = w & mask
                v2 = (w >> n_bits) & mask
                anc = w >> (2 * n_bits)
                if v1 != v or v2 != v_best or anc != 0:
                    good = False
                    c2 += i + 1
                    errors += 1
                    break
            x = self._measure(state, self.layout.group, rng)
            runtime += MEASUREMENT_TIME
            if good:
                c1 += p + 1
                c2 += p + 1
            fx = group_apply(spec, x, v, n_bits)
            if fx < v_best:
                v_best, x_best = fx, x
                t = max(1.0, cfg.beta * t)
            elif good:
                t = min(cfg.gamma * t, sqrt_g)
            if calls_sol is None and v_best == true_min:
                calls_sol = c1

        succeeded = v_best == true_min
        if group_apply(spec, x_best, v, n_bits) != v_best:
            raise AssertionError("certificate violation: x_best does not map v to v_best")
        return TrialResult(
            v_best=v_best,
            x_best=x_best,
            calls_to_solution=calls_sol,
            total_effective_calls=c1,
            total_all_calls=c2,
            runtime_units=state.now if self.noise is not None else runtime,
            succeeded=succeeded,
            errors_detected=errors,
        )


def run_gmin_aem(
    instance: ProblemInstance,
    v: int,
    config: GminConfig,
    noise: NoiseParams | None = None,
    rng: np.random.Generator | None = None,
    ancilla: int = 0,
) -> TrialResult:
    """One trial of the actively mitigated loop."""
    if rng is None:
        rng = np.random.default_rng(config.master_seed)
    return AemRunner(instance, config, noise=noise, ancilla=ancilla).run_trial(v, rng)


# ---------------------------------------------------------------------------
# analytic performance model


@dataclass(frozen=True)
class AemAnalyticParams:
    """Inputs of the asymptotic success estimate for p mitigated Grover calls.

    delta scales the coherence time against the sqrt(N) search cost; sigma is
    the per-call no-error probability, exp(-4/(delta sqrt(N))) when derived
    from delta; e is the fraction of detected errors that leave the group
    register intact (1 is the optimistic case).
    """

    delta: float
    e: float
    sigma: float
    theta: float
    p: int
    N: int

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ValueError("delta must be positive (inf = noiseless limit)")
        if not 0.0 <= self.e <= 1.0:
            raise ValueError("e must be in [0, 1]")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError("sigma must be in [0, 1]")
        if self.p < 0:
            raise ValueError("p must be nonnegative")

    @classmethod
    def from_delta(cls, delta: float, N: int, k: int = 1, p: int | None = None,
                   e: float = 1.0) -> "AemAnalyticParams":
        if p is None:
            p = math.floor(math.pi / 4 * math.sqrt(N))
        sigma = math.exp(-4.0 / (delta * math.sqrt(N)))
        theta = math.asin(math.sqrt(k / N))
        return cls(delta=delta, e=e, sigma=sigma, theta=theta, p=p, N=N)


def aem_success_predict(params: AemAnalyticParams) -> float:
    """Asymptotic success probability with measure-and-check salvage.

    (1 - e/(1+d^2)) sigma^p sin^2((2p+1)theta) + (e d^2/(1+d^2)) (1-sigma^p)/2.

    delta = inf is the noiseless limit (sigma = 1 under the coupled scaling),
    where the estimate reduces to the plain amplified probability.
    """
    if math.isinf(params.delta):
        coherent, salvage = 1.0, params.e
    else:
        d2 = params.delta**2
        coherent = 1.0 - params.e / (1.0 + d2)
        salvage = params.e * d2 / (1.0 + d2)
    sp = params.sigma**params.p
    amplified = math.sin((2 * params.p + 1) * params.theta) ** 2
    return coherent * sp * amplified + salvage * (1.0 - sp) / 2.0


def abstract_channel_expectation(sigma: float, e: float, p: int, k: int, N: int) -> float:
    """Exact success expectation of the abstract channel model (finite sums).

    Independent of the asymptotic predictor: no small-angle or large-N
    approximations, so it oracles both the Monte-Carlo sampler and the
    predictor's documented gap.
    """
    theta = math.asin(math.sqrt(k / N))
    total = sigma**p * math.sin((2 * p + 1) * theta) ** 2
    for i in range(1, p + 1):
        err_here = sigma ** (i - 1) * (1.0 - sigma)
        salvage = math.sin((2 * (i - 1) + 1) * theta) ** 2
        total += err_here * (e * salvage + (1.0 - e) * k / N)
    return total


def simulate_abstract_channel(
    sigma: float,
    e: float,
    p: int,
    k: int,
    N: int,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo of the abstract mitigated-call model; returns success rate.

    Each of the p calls is noiseless with probability sigma.  On the first
    error: with probability e only the position registers are hit - the check
    detects it and the group register still holds the state after the
    preceding good calls, so the salvage measurement succeeds at the plain
    amplified rate; otherwise the whole system is replaced by the maximally
    mixed state and the group outcome is uniform on [0, N).
    """
    if not 0.0 <= sigma <= 1.0 or not 0.0 <= e <= 1.0:
        raise ValueError("sigma and e must be probabilities")
    theta = math.asin(math.sqrt(k / N))
    if sigma < 1.0:
        first_error = rng.geometric(1.0 - sigma, size=trials)
    else:
        first_error = np.full(trials, p + 1)
    clean = first_error > p
    n_good = np.where(clean, p, first_error - 1)
    success_prob = np.sin((2 * n_good + 1) * theta) ** 2
    position_hit = rng.random(trials) < e
    mixed = ~clean & ~position_hit
    success_prob = np.where(mixed, k / N, success_prob)
    wins = rng.random(trials) < success_prob
    return float(np.mean(wins))
