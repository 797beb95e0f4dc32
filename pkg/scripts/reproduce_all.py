"""Run every figure-reproduction profile into one artifact tree.

Example:
    python scripts/reproduce_all.py --scale 0.1 --out out/repro --jobs 0
"""

import argparse
from pathlib import Path

from gminlab.cli import main as gminlab_main

PROFILES = ("fig7", "fig8", "fig9", "fig10", "fig13")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=float, default=0.1)
    parser.add_argument("--out", type=str, default="out/repro")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=0)
    parser.add_argument("--only", choices=PROFILES, nargs="*")
    args = parser.parse_args()
    for figure in args.only or PROFILES:
        out = Path(args.out) / figure
        print(f"== {figure} -> {out}")
        gminlab_main([
            "reproduce", figure, "--scale", str(args.scale),
            "--seed", str(args.seed), "--jobs", str(args.jobs),
            "--out", str(out),
        ])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
