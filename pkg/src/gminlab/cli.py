"""Command-line harness.

Subcommands: run (full simulation), mc (classical Monte-Carlo), survey
(beta-gamma grid), fit (refit stored curves), blocks (symmetry-block
validation), reproduce (figure profiles).  A `key = value` config file can
seed any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from .config import config_from, load_config_file
from .experiments import cmd_fit, run_experiment

__all__ = ["main", "build_parser"]


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="key = value config file")
    sub.add_argument("--group", choices=("add", "spin"))
    sub.add_argument("--n", type=int, help="log2 group size (add) or sites (spin)")
    sub.add_argument("--strategy", choices=("ideal", "sem", "aem"))
    sub.add_argument("--alpha", type=float, help="oracle budget parameter")
    sub.add_argument("--beta", type=float, help="ramp-down factor on improvement")
    sub.add_argument("--gamma", type=float, help="ramp-up factor on failure")
    sub.add_argument("--ell", type=float, help="AEM hard-stop coefficient")
    sub.add_argument("--t1", type=float, help="bit-flip time in SQGT units (inf = off)")
    sub.add_argument("--t2", type=float, help="phase-flip time in SQGT units (inf = off)")
    sub.add_argument("--ancilla", type=int, help="shared ancilla count, 0..n-2")
    sub.add_argument("--trials", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", type=str, help="artifact directory")
    sub.add_argument("--jobs", type=int, help="worker processes (0 = all CPUs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gminlab",
        description="Grover-minimization lab: simulation, mitigation, baselines.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("run", "full state-vector simulation of the minimization loop"),
        ("mc", "classical Monte-Carlo with the closed-form search law"),
        ("survey", "rate parameter over a beta-gamma grid"),
        ("blocks", "symmetry-block spectrum validation"),
    ):
        sub = commands.add_parser(name, help=help_text)
        _add_common(sub)
        if name == "survey":
            sub.add_argument("--beta-grid", type=str, help="comma list of beta values")
            sub.add_argument("--gamma-grid", type=str, help="comma list of gamma values")

    fit = commands.add_parser("fit", help="refit stored curve.csv files")
    fit.add_argument("curves", nargs="+", type=Path)
    fit.add_argument("--out", type=str, default="out")

    rep = commands.add_parser("reproduce", help="run a figure-reproduction profile")
    rep.add_argument("figure", choices=("fig7", "fig8", "fig9", "fig10", "fig13"))
    rep.add_argument("--scale", type=float, default=1.0,
                     help="trial-count multiplier relative to the full profile")
    rep.add_argument("--extended", action="store_true",
                     help="also run the larger optional group size (fig9, fig13)")
    _add_common(rep)

    return parser


def _overrides(args: argparse.Namespace) -> dict:
    keys = ("group", "n", "strategy", "alpha", "beta", "gamma", "ell", "t1", "t2",
            "ancilla", "trials", "seed", "out", "jobs")
    return {k: getattr(args, k, None) for k in keys}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fit":
        out = cmd_fit(args.curves, Path(args.out))
        print(f"wrote {out / 'ratefit.csv'}")
        return 0
    file_values = load_config_file(args.config) if getattr(args, "config", None) else None
    config = config_from(file_values, _overrides(args))
    kwargs = {}
    if args.command == "survey":
        if args.beta_grid:
            kwargs["beta_grid"] = [float(v) for v in args.beta_grid.split(",")]
        if args.gamma_grid:
            kwargs["gamma_grid"] = [float(v) for v in args.gamma_grid.split(",")]
    if args.command == "reproduce":
        kwargs["figure"] = args.figure
        kwargs["scale"] = args.scale
        kwargs["extended"] = args.extended
    out = run_experiment(args.command, config, **kwargs)
    print(f"artifacts in {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
