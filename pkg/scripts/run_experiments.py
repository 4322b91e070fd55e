"""Run the full experiment grid through the CLI and store one JSON report per run.

Usage: python scripts/run_experiments.py [--out results] [--precision-bits 53]

Prints one line per run and exits non-zero if any run failed.
"""

import argparse
import sys
from pathlib import Path

from sharpconst.cli import main as cli_main

GRID = [
    ["experiment", "ratio", "--N", "3", "--k", "1", "--assert", "0.005"],
    ["experiment", "ratio", "--N", "4", "--k", "2", "--assert", "0.005"],
    ["experiment", "ratio", "--N", "5", "--k", "1", "--assert", "0.005"],
    ["experiment", "ratio", "--N", "5", "--k", "3", "--assert", "0.005"],
    ["experiment", "ratio", "--N", "6", "--k", "2", "--assert", "0.005"],
    ["experiment", "ratio", "--N", "6", "--k", "4", "--assert", "0.005"],
    ["experiment", "weak-delta", "--N", "2", "--k", "1", "--assert", "0.01"],
    ["experiment", "weak-delta", "--N", "4", "--k", "2", "--assert", "0.01"],
    ["experiment", "weak-delta", "--N", "6", "--k", "2", "--assert", "0.01"],
    ["experiment", "seminorm", "--N", "2", "--m", "1", "--assert", "0.01"],
    ["experiment", "seminorm", "--N", "4", "--m", "2", "--p", "2", "--assert", "0.01"],
    ["experiment", "seminorm", "--N", "3", "--m", "1", "--p", "3", "--assert", "0.01"],
    ["experiment", "seminorm-dm", "--m", "1", "--assert", "0.01"],
    ["experiment", "seminorm-dm", "--m", "2", "--assert", "0.01"],
    ["experiment", "moser", "--N", "4", "--m", "2", "--beta-scale", "1.1"],
    ["experiment", "moser", "--N", "4", "--m", "2", "--beta-scale", "0.5"],
    ["verify", "oracle", "--max-N", "8", "--max-m", "5"],
    ["verify", "pointwise", "--N", "3", "--m", "1", "--count", "5"],
    ["verify", "pointwise", "--N", "6", "--m", "4", "--k", "2", "--count", "5"],
    ["verify", "fundamental", "--N", "2", "--count", "5"],
    ["verify", "fundamental", "--N", "4", "--count", "5"],
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--precision-bits", default=None)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for argv in GRID:
        name = "_".join(a.lstrip("-").replace(".", "p") for a in argv if a != "--assert")
        extra = ["--out", str(out / f"{name}.json")]
        if args.precision_bits:
            extra += ["--precision-bits", args.precision_bits]
        status = cli_main(argv + extra)
        failures += status != 0
        print(f"{'PASS' if status == 0 else f'FAIL({status})'}  {' '.join(argv)}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
