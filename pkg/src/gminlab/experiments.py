"""Batch execution, CSV emission, manifests, and figure-reproduction profiles.

Trials are deterministic per (master seed, trial index) and independent of
worker count or execution order, so identical configs reproduce identical
CSVs byte for byte.  Plots are always rendered from the emitted CSVs, never
from in-memory state.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .aem import AemRunner
from .blocks import HAMILTONIANS, block_spectra
from .config import ExperimentConfig
from .fitting import (
    FitDomainError,
    RateFit,
    SuccessCurve,
    estimate_success_curve,
    fit_rate_parameter,
)
from .gmin import GminConfig, GminRunner, TrialResult
from .groups import GroupSpec, ProblemInstance
from .mc import run_gmin_mc, survey_beta_gamma
from .noise import NoiseParams

__all__ = [
    "BatchSpec",
    "run_trial_batch",
    "run_experiment",
    "write_trials_csv",
    "write_curve_csv",
    "write_ratefit_csv",
    "write_survey_csv",
]


# ---------------------------------------------------------------------------
# trial batches


@dataclass(frozen=True)
class BatchSpec:
    """Picklable description of one trial batch (workers rebuild the runner)."""

    group: str
    n: int
    strategy: str = "ideal"
    alpha: float = 5.7
    beta: float = 0.95
    gamma: float = 1.15
    ell: float = 1.0
    run_until_solution: bool = True
    t1: float = math.inf
    t2: float = math.inf
    clamp_dephasing: bool = False
    ancilla: int = 0
    master_seed: int = 0

    def instance(self) -> ProblemInstance:
        if self.group == "add":
            return ProblemInstance(GroupSpec.add_mod(1 << self.n), self.n)
        if self.group == "spin":
            return ProblemInstance(GroupSpec.spin_translation(self.n), self.n)
        raise ValueError(f"unknown group {self.group!r}")

    def noise(self) -> NoiseParams | None:
        if math.isinf(self.t1) and math.isinf(self.t2):
            return None
        return NoiseParams(t1=self.t1, t2=self.t2, clamp_dephasing=self.clamp_dephasing)

    def gmin_config(self) -> GminConfig:
        return GminConfig(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            strategy=self.strategy,
            ell=self.ell,
            run_until_solution=self.run_until_solution,
            master_seed=self.master_seed,
        )


def trial_seed(master_seed: int, index: int) -> int:
    """Stable per-trial seed recorded in trials.csv."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


@dataclass(frozen=True)
class RunReport:
    """Aggregates of a trial batch; always recomputable from the rows."""

    trials: int
    mean_runtime: float
    success_rate: float
    total_c1: int
    total_c2: int


def summarize(results: list[TrialResult]) -> RunReport:
    return RunReport(
        trials=len(results),
        mean_runtime=float(np.mean([r.runtime_units for r in results])),
        success_rate=float(np.mean([r.succeeded for r in results])),
        total_c1=sum(r.total_effective_calls for r in results),
        total_c2=sum(r.total_all_calls for r in results),
    )


def _make_runner(spec: BatchSpec):
    cls = AemRunner if spec.strategy == "aem" else GminRunner
    return cls(spec.instance(), spec.gmin_config(), noise=spec.noise(), ancilla=spec.ancilla)


def _run_chunk(spec: BatchSpec, start: int, stop: int) -> list[TrialResult]:
    runner = _make_runner(spec)
    n_values = spec.instance().n_values
    out = []
    for i in range(start, stop):
        rng = np.random.default_rng(np.random.SeedSequence([spec.master_seed, i]))
        v = int(rng.integers(0, n_values))
        out.append(runner.run_trial(v, rng))
    return out


def run_trial_batch(spec: BatchSpec, trials: int, jobs: int = 0) -> list[TrialResult]:
    """Run trials 0..trials-1; results identical for any worker count."""
    jobs = jobs if jobs > 0 else (os.cpu_count() or 1)
    jobs = min(jobs, trials)
    if jobs == 1:
        return _run_chunk(spec, 0, trials)
    chunk = max(1, math.ceil(trials / (jobs * 4)))
    bounds = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_run_chunk, *zip(*[(spec, a, b) for a, b in bounds])))
    return [r for part in parts for r in part]


# ---------------------------------------------------------------------------
# CSV emission


def _write_rows(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_trials_csv(path: Path, results: list[TrialResult], spec: BatchSpec) -> None:
    rows = []
    for i, r in enumerate(results):
        rows.append(
            [
                i,
                trial_seed(spec.master_seed, i),
                spec.n,
                spec.strategy,
                "" if r.calls_to_solution is None else r.calls_to_solution,
                r.total_effective_calls,
                r.total_all_calls,
                repr(r.runtime_units),
                r.succeeded,
            ]
        )
    _write_rows(
        path,
        ["trial_id", "seed", "n", "strategy", "calls_to_solution", "c1", "c2",
         "runtime_units", "succeeded"],
        rows,
    )


def write_curve_csv(path: Path, curve: SuccessCurve) -> None:
    rows = [[int(t), repr(float(p)), curve.M, curve.N] for t, p in zip(curve.T, curve.P)]
    _write_rows(path, ["T", "P", "M", "N"], rows)


def read_curve_csv(path: Path) -> SuccessCurve:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    T = np.array([int(r["T"]) for r in rows])
    P = np.array([float(r["P"]) for r in rows])
    return SuccessCurve(T=T, P=P, M=int(rows[0]["M"]), N=int(rows[0]["N"]))


def write_ratefit_csv(path: Path, rows: list[tuple[int, RateFit]]) -> None:
    _write_rows(
        path,
        ["N", "a", "a_err", "r2", "a_eff", "a_eff_err"],
        [
            [N, repr(f.a), repr(f.a_err), repr(f.r2), repr(f.a_eff), repr(f.a_eff_err)]
            for N, f in rows
        ],
    )


def write_survey_csv(path: Path, rows) -> None:
    _write_rows(
        path,
        ["beta", "gamma", "N", "a", "a_err", "r2"],
        [
            [repr(beta), repr(gamma), N, repr(fit.a), repr(fit.a_err), repr(fit.r2)]
            for beta, gamma, N, _trials, fit in rows
        ],
    )


def write_manifest(out: Path, config_dict: dict) -> None:
    canonical = json.dumps(config_dict, sort_keys=True, default=str)
    manifest = {
        "config": config_dict,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "versions": {"gminlab": __version__, "numpy": np.__version__},
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def curve_from_results(results: list[TrialResult], N: int) -> SuccessCurve:
    calls = [math.inf if r.calls_to_solution is None else r.calls_to_solution for r in results]
    return estimate_success_curve(calls, N)


def _safe_fit(curve: SuccessCurve) -> RateFit | None:
    try:
        return fit_rate_parameter(curve)
    except FitDomainError:
        return None


# ---------------------------------------------------------------------------
# plotting (from CSVs only)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_curves(curve_csvs: list[Path], out_png: Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in curve_csvs:
        curve = read_curve_csv(path)
        ax.plot(curve.T, curve.P, label=f"N={curve.N}")
    ax.set_xlabel("effective oracle calls T")
    ax.set_ylabel("success probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def plot_ratefit(ratefit_csv: Path, out_png: Path, column: str = "a") -> None:
    plt = _pyplot()
    with open(ratefit_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    N = np.array([int(r["N"]) for r in rows])
    val = np.array([float(r[column]) for r in rows])
    err_col = {"a": "a_err", "a_eff": "a_eff_err"}.get(column)
    fig, ax = plt.subplots(figsize=(6, 4))
    if err_col:
        ax.errorbar(np.log2(N), val, yerr=[float(r[err_col]) for r in rows], marker="o")
    ax.set_xlabel("log2 N")
    ax.set_ylabel(column)
    if all("r2" in r for r in rows):
        inset = ax.inset_axes([0.55, 0.15, 0.4, 0.3])
        inset.plot(np.log2(N), [float(r["r2"]) for r in rows], marker=".")
        inset.set_ylabel("R^2", fontsize=8)
        inset.tick_params(labelsize=7)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def plot_survey(survey_csv: Path, out_png: Path) -> None:
    plt = _pyplot()
    with open(survey_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    betas = sorted({float(r["beta"]) for r in rows})
    gammas = sorted({float(r["gamma"]) for r in rows})
    grid = np.full((len(betas), len(gammas)), np.nan)
    for r in rows:
        grid[betas.index(float(r["beta"])), gammas.index(float(r["gamma"]))] = float(r["a"])
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(grid, origin="lower", aspect="auto",
                   extent=(gammas[0], gammas[-1], betas[0], betas[-1]))
    fig.colorbar(im, ax=ax, label="rate parameter a")
    ax.set_xlabel("gamma")
    ax.set_ylabel("beta")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def plot_sweep(sweep_csv: Path, out_png: Path, ycol: str) -> None:
    plt = _pyplot()
    with open(sweep_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    fig, ax = plt.subplots(figsize=(6, 4))
    series: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for r in rows:
        key = (r["varied"], r["strategy"])
        if r[ycol]:
            series.setdefault(key, []).append((float(r["value"]), float(r[ycol])))
    for (varied, strategy), pts in sorted(series.items()):
        pts.sort()
        style = "-" if strategy == "aem" else "--"
        ax.plot([p[0] for p in pts], [p[1] for p in pts], style,
                marker="o", label=f"{strategy} vs {varied}")
    ax.set_xscale("log")
    ax.set_xlabel("decoherence time (SQGT units)")
    ax.set_ylabel(ycol)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# commands


def _curve_fit_outputs(out: Path, results: list[TrialResult], spec: BatchSpec, N: int) -> None:
    write_trials_csv(out / "trials.csv", results, spec)
    curve = curve_from_results(results, N)
    write_curve_csv(out / "curve.csv", curve)
    fit = _safe_fit(curve)
    if fit is not None:
        write_ratefit_csv(out / "ratefit.csv", [(N, fit)])
    plot_curves([out / "curve.csv"], out / "curve.png")


def cmd_run(config: ExperimentConfig) -> Path:
    out = Path(config.out)
    spec = BatchSpec(
        group=config.group,
        n=config.n,
        strategy=config.strategy,
        alpha=config.alpha,
        beta=config.beta,
        gamma=config.gamma,
        ell=config.ell,
        t1=config.t1,
        t2=config.t2,
        ancilla=config.ancilla,
        master_seed=config.seed,
    )
    results = run_trial_batch(spec, config.trials, config.jobs)
    write_manifest(out, config.as_dict())
    N = spec.instance().group.size
    _curve_fit_outputs(out, results, spec, N)
    return out


def cmd_mc(config: ExperimentConfig) -> Path:
    out = Path(config.out)
    N = 1 << config.n
    rng = np.random.default_rng(np.random.SeedSequence([config.seed]))
    calls = run_gmin_mc(N, beta=config.beta, gamma=config.gamma, rng=rng,
                        trials=config.trials)
    write_manifest(out, config.as_dict())
    curve = estimate_success_curve(calls, N)
    write_curve_csv(out / "curve.csv", curve)
    fit = _safe_fit(curve)
    if fit is not None:
        write_ratefit_csv(out / "ratefit.csv", [(N, fit)])
    plot_curves([out / "curve.csv"], out / "curve.png")
    return out


def cmd_survey(config: ExperimentConfig, beta_grid=None, gamma_grid=None) -> Path:
    out = Path(config.out)
    beta_grid = beta_grid or [0.8, 0.85, 0.9, 0.95, 1.0]
    gamma_grid = gamma_grid or [1.05, 1.1125, 1.175, 1.2375, 1.3]
    rows = survey_beta_gamma(beta_grid, gamma_grid, 1 << config.n, config.trials,
                             seed=config.seed)
    write_manifest(out, {**config.as_dict(), "beta_grid": beta_grid, "gamma_grid": gamma_grid})
    write_survey_csv(out / "survey.csv", rows)
    plot_survey(out / "survey.csv", out / "survey.png")
    return out


def cmd_fit(curve_paths: list[Path], out: Path) -> Path:
    rows = []
    for path in curve_paths:
        curve = read_curve_csv(path)
        rows.append((curve.N, fit_rate_parameter(curve)))
    write_ratefit_csv(out / "ratefit.csv", rows)
    return out


def cmd_blocks(config: ExperimentConfig) -> Path:
    out = Path(config.out)
    rows = []
    for N in (8, 64, 256):
        inst = ProblemInstance(GroupSpec.add_mod(N), N.bit_length() - 1)
        H = HAMILTONIANS["cycle-adjacency"](N)
        dev = float(np.abs(block_spectra(H, inst) - np.sort(np.linalg.eigvalsh(H))).max())
        rows.append(["cycle-adjacency", "add", N.bit_length() - 1, N, repr(dev), dev < 1e-8])
    for sites in range(4, 9):
        inst = ProblemInstance(GroupSpec.spin_translation(sites), sites)
        for name in ("heisenberg", "xy"):
            H = HAMILTONIANS[name](sites)
            dev = float(np.abs(block_spectra(H, inst) - np.sort(np.linalg.eigvalsh(H))).max())
            rows.append([name, "spin", sites, 1 << sites, repr(dev), dev < 1e-8])
    write_manifest(out, config.as_dict())
    _write_rows(out / "blocks.csv", ["hamiltonian", "group", "n", "dim", "max_dev", "pass"], rows)
    return out


# ---------------------------------------------------------------------------
# figure-reproduction profiles


def _scaled(base: int, scale: float, floor: int = 50) -> int:
    return max(floor, int(round(base * scale)))


def reproduce_fig7(config: ExperimentConfig, scale: float = 1.0) -> Path:
    """Rate parameter versus group size from the classical Monte-Carlo."""
    out = Path(config.out)
    rows = []
    for exp in range(8, 17):
        N = 1 << exp
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, exp]))
        calls = run_gmin_mc(N, beta=config.beta, gamma=config.gamma, rng=rng,
                            trials=_scaled(20000, scale))
        curve = estimate_success_curve(calls, N)
        rows.append((N, fit_rate_parameter(curve)))
        write_curve_csv(out / f"curve_N{N}.csv", curve)
    write_manifest(out, {**config.as_dict(), "profile": "fig7", "scale": scale})
    write_ratefit_csv(out / "ratefit.csv", rows)
    plot_ratefit(out / "ratefit.csv", out / "fig7.png", column="a")
    return out


def reproduce_fig8(config: ExperimentConfig, scale: float = 1.0) -> Path:
    """Rate-parameter surface over the (beta, gamma) grid."""
    config = ExperimentConfig(**{**config.as_dict(), "n": 12,
                                 "trials": _scaled(4000, scale)})
    return cmd_survey(config)


def reproduce_fig9(config: ExperimentConfig, scale: float = 1.0,
                   extended: bool = False) -> Path:
    """Success curves of the full ideal simulation for n = 4, 5 (optionally 6)."""
    out = Path(config.out)
    plan = [(4, 10000), (5, 10000)] + ([(6, 4000)] if extended else [])
    rows = []
    curve_paths = []
    for n, base_trials in plan:
        spec = BatchSpec(group="add", n=n, strategy="ideal", master_seed=config.seed)
        results = run_trial_batch(spec, _scaled(base_trials, scale), config.jobs)
        N = 1 << n
        curve = curve_from_results(results, N)
        path = out / f"curve_n{n}.csv"
        write_curve_csv(path, curve)
        curve_paths.append(path)
        fit = _safe_fit(curve)
        if fit is not None:
            rows.append((N, fit))
    write_manifest(out, {**config.as_dict(), "profile": "fig9", "scale": scale})
    write_ratefit_csv(out / "ratefit.csv", rows)
    plot_curves(curve_paths, out / "fig9.png")
    plot_ratefit(out / "ratefit.csv", out / "fig9_rate.png", column="a_eff")
    return out


_SWEEP_TIMES = (100.0, 300.0, 700.0, 2000.0)


def _sweep_rows(config: ExperimentConfig, n: int, trials: int, strategies,
                varied: str, values, fixed_other: float) -> list[list]:
    rows = []
    for strategy in strategies:
        for value in values:
            t1, t2 = (value, fixed_other) if varied == "t1" else (fixed_other, value)
            spec = BatchSpec(
                group="add", n=n, strategy=strategy, ell=config.ell,
                t1=t1, t2=t2, clamp_dephasing=True, ancilla=config.ancilla,
                master_seed=config.seed,
            )
            results = run_trial_batch(spec, trials, config.jobs)
            N = 1 << n
            fit = _safe_fit(curve_from_results(results, N))
            report = summarize(results)
            rows.append([
                n, varied, value, strategy,
                "" if fit is None else repr(fit.a_eff),
                "" if fit is None else repr(fit.a_eff_err),
                repr(report.mean_runtime), repr(report.success_rate),
            ])
    return rows


def reproduce_fig10(config: ExperimentConfig, scale: float = 1.0) -> Path:
    """SEM versus AEM under separate bit-flip and phase-flip sweeps at n=4."""
    out = Path(config.out)
    trials = _scaled(2000, scale)
    config = ExperimentConfig(**{**config.as_dict(), "ell": max(config.ell, 50.0)})
    rows = _sweep_rows(config, 4, trials, ("sem", "aem"), "t1", _SWEEP_TIMES, 1e9)
    rows += _sweep_rows(config, 4, trials, ("sem", "aem"), "t2", _SWEEP_TIMES, 1e9)
    write_manifest(out, {**config.as_dict(), "profile": "fig10", "scale": scale})
    _write_rows(out / "fig10.csv",
                ["n", "varied", "value", "strategy", "a_eff", "a_eff_err",
                 "mean_runtime", "succeeded_frac"], rows)
    plot_sweep(out / "fig10.csv", out / "fig10_rate.png", "a_eff")
    plot_sweep(out / "fig10.csv", out / "fig10_runtime.png", "mean_runtime")
    return out


def reproduce_fig13(config: ExperimentConfig, scale: float = 1.0,
                    extended: bool = False) -> Path:
    """Realistic hardware point T1 = T2 = 700 with maximum ancilla."""
    out = Path(config.out)
    rows = []
    sizes = [4, 5] if extended else [4]
    for n in sizes:
        trials = _scaled(2000 if n == 4 else 500, scale)
        for strategy, t in (("ideal", math.inf), ("sem", 700.0), ("aem", 700.0)):
            spec = BatchSpec(
                group="add", n=n, strategy=strategy, ell=max(config.ell, 50.0),
                t1=t, t2=t, ancilla=n - 2, master_seed=config.seed,
            )
            results = run_trial_batch(spec, trials, config.jobs)
            fit = _safe_fit(curve_from_results(results, 1 << n))
            report = summarize(results)
            rows.append([
                n, "t", 700.0 if strategy != "ideal" else "", strategy,
                "" if fit is None else repr(fit.a_eff),
                "" if fit is None else repr(fit.a_eff_err),
                repr(report.mean_runtime), repr(report.success_rate),
            ])
    write_manifest(out, {**config.as_dict(), "profile": "fig13", "scale": scale})
    _write_rows(out / "fig13.csv",
                ["n", "varied", "value", "strategy", "a_eff", "a_eff_err",
                 "mean_runtime", "succeeded_frac"], rows)
    return out


REPRODUCE = {
    "fig7": reproduce_fig7,
    "fig8": reproduce_fig8,
    "fig9": reproduce_fig9,
    "fig10": reproduce_fig10,
    "fig13": reproduce_fig13,
}


def run_experiment(command: str, config: ExperimentConfig, **kwargs) -> Path:
    """Dispatch a CLI command; returns the artifact directory."""
    if command == "run":
        return cmd_run(config)
    if command == "mc":
        return cmd_mc(config)
    if command == "survey":
        return cmd_survey(config, kwargs.get("beta_grid"), kwargs.get("gamma_grid"))
    if command == "blocks":
        return cmd_blocks(config)
    if command == "reproduce":
        fig = kwargs["figure"]
        if fig not in REPRODUCE:
            raise ValueError(f"unknown figure {fig!r}; choose from {sorted(REPRODUCE)}")
        extra = {}
        if fig in ("fig9", "fig13") and kwargs.get("extended"):
            extra["extended"] = True
        return REPRODUCE[fig](config, scale=kwargs.get("scale", 1.0), **extra)
    raise ValueError(f"unknown command {command!r}")
