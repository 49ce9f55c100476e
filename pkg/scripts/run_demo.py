#!/usr/bin/env python3
"""Run the whole benchmark on the bundled demo dataset.

Checks the dataset, materializes the project, extracts facts, runs the
detectors, then executes experiments RUB, P and R and prints their summary
tables.  Everything lands under --workspace (default: ./demo-workspace).
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from misuselab.cli import main  # noqa: E402

REPO = Path(__file__).resolve().parent.parent


def run(argv: list[str]) -> None:
    code = main(argv)
    if code != 0:
        raise SystemExit(f"step failed with exit code {code}: {' '.join(argv)}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workspace", default="demo-workspace")
    parser.add_argument("--dataset", default=str(REPO / "dataset"))
    parser.add_argument("--seed", default="7")
    args = parser.parse_args()

    base = ["--dataset", args.dataset, "--workspace", args.workspace]
    run(["validate-dataset", "--dataset", args.dataset])
    run(["checkout", *base])
    run(["extract", *base])
    run(["detect", *base, "--detector", "all"])
    run(["exp", "rub", *base])
    run(["exp", "p", *base, "--seed", args.seed])
    run(["exp", "r", *base, "--seed", args.seed])
    print(f"\nworkspace ready under {args.workspace}; serve reviews with:")
    print(f"  misuselab serve --workspace {args.workspace} --tokens scripts/reviewers.yml")
