"""Timing probe for the state-vector engine and the compiled executor.

Example:
    python scripts/benchmark_engine.py --n 4 --t1 700
"""

import argparse
import time

import numpy as np

from gminlab.compiled import compile_schedule, run_compiled
from gminlab.engine import RegisterLayout, run_circuit, zero_state
from gminlab.gates import schedule
from gminlab.gmin import GminConfig, GminRunner, build_grov
from gminlab.groups import GroupSpec, ProblemInstance
from gminlab.noise import NoiseParams


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--ancilla", type=int, default=0)
    parser.add_argument("--t1", type=float, default=700.0)
    parser.add_argument("--t2", type=float, default=700.0)
    parser.add_argument("--reps", type=int, default=50)
    args = parser.parse_args()

    inst = ProblemInstance(GroupSpec.add_mod(1 << args.n), args.n)
    layout = RegisterLayout(args.n, args.n, args.n, args.ancilla)
    grov = build_grov(inst, layout, decomposed=True)
    sched = schedule(grov.gates)
    noise = NoiseParams(t1=args.t1, t2=args.t2)
    rng = np.random.default_rng(0)
    print(f"{layout.total} qubits, {len(grov.gates)} decomposed gates, "
          f"duration {sched.total_duration} time units")

    state = zero_state(layout.total)
    t0 = time.time()
    for _ in range(args.reps):
        run_circuit(state, sched, noise=noise, rng=rng)
    print(f"reference engine: {(time.time() - t0) / args.reps * 1e3:.2f} ms per step")

    plan = compile_schedule(sched, layout.total)
    state = zero_state(layout.total)
    run_compiled(state, plan, noise, rng)  # trigger compilation
    t0 = time.time()
    for _ in range(args.reps):
        run_compiled(state, plan, noise, rng)
    print(f"compiled executor: {(time.time() - t0) / args.reps * 1e3:.2f} ms per step")

    cfg = GminConfig(run_until_solution=True, ell=50.0)
    runner = GminRunner(inst, cfg, noise=noise, ancilla=args.ancilla)
    t0 = time.time()
    trials = 10
    for i in range(trials):
        trial_rng = np.random.default_rng(np.random.SeedSequence([7, i]))
        runner.run_trial(int(trial_rng.integers(0, 1 << args.n)), trial_rng)
    print(f"noisy trial: {(time.time() - t0) / trials * 1e3:.0f} ms average")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
