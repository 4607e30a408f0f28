#!/usr/bin/env python3
"""Experiment runner for mutforge checkouts without an installed console script."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mutforge.cli import main as cli_main  # noqa: E402
from mutforge.config import load_run_config  # noqa: E402
from mutforge.study.fixtures import discover_bug_cases  # noqa: E402


def main() -> int:
    """Main entry point for the experiment runner."""
    parser = argparse.ArgumentParser(description="Run the mutforge experiment grid")

    parser.add_argument(
        "--config",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "config" / "run.example.toml",
        help="Run configuration (defaults to config/run.example.toml)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        help="Master seed"
    )
    parser.add_argument(
        "--dry-run",
        action="store_true",
        help="Print the grid without running it"
    )

    args = parser.parse_args()
    cfg = load_run_config(args.config, seed=args.seed)
    bugs = list(cfg.bugs) or [p.name for p in discover_bug_cases(cfg.bugs_dir)]

    print("Experiment Configuration:")
    print(f"  Bugs: {len(bugs)} from {cfg.bugs_dir}")
    print(f"  Generators: {', '.join(g.id for g in cfg.generators) or 'none'}")
    print(f"  Seed: {cfg.seed}")
    print(f"  Output: {cfg.out_dir}")

    if args.dry_run:
        print("\n[DRY RUN] No cells were run.")
        return 0

    argv = ["experiment", "--config", str(args.config)]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
