"""Run every config in configs/ and print the headline metric of each."""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from dualgraph.harness import ExperimentConfig, run_experiment

HEADLINE = {
    "execution": "max_receivers",
    "silent-sets": "silent_fraction",
    "exception-set": "exceptions",
    "ring-coloring": "exceptions",
    "isolation": "win",
    "bit-reveal": "win",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=Path(__file__).resolve().parents[1] / "configs", type=Path)
    ap.add_argument("--out", default="runs")
    ap.add_argument("--trials", type=int, help="cap the trial count of every config")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    for path in sorted(args.configs.glob("*.json")):
        cfg = ExperimentConfig.load(path)
        if args.trials:
            cfg.trials = min(cfg.trials, args.trials)
        start = time.monotonic()
        stats = run_experiment(cfg, jobs=args.jobs, output_dir=args.out)
        row = stats.metric(HEADLINE[cfg.kind])
        ci = f" [{row['wilson_low']:.4f}, {row['wilson_high']:.4f}]" if row["wilson_low"] != "" else ""
        print(f"{cfg.name:<26} {row['metric']:<16} mean={row['mean']:.4f}{ci}  "
              f"trials={cfg.trials}  exit={stats.exit_code}  {time.monotonic() - start:.1f}s")


if __name__ == "__main__":
    main()
