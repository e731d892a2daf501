"""Fraction of silent point sets on the CDS hard network for a range of round counts.

The criterion round count floor(sqrt(n) / (2 log2 n)) is tiny at desk scale,
so this sweeps f upward to show where the fraction actually drops.
"""

from __future__ import annotations

import argparse

from dualgraph.harness import ExperimentConfig, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--rounds", type=int, nargs="+", default=[0, 1, 2, 4, 8, 16, 32])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--algorithm", default="decay-cds")
    args = ap.parse_args()

    for f in args.rounds:
        cfg = ExperimentConfig(
            kind="silent-sets", name=f"silent_{args.n}_{f}", network={"n": args.n},
            adversary={"kind": "threshold", "c": 3.0}, algorithm=args.algorithm,
            rounds={"preset": "fixed", "value": f}, trials=args.trials, seed=12,
        )
        row = run_experiment(cfg, write=False).metric("silent_fraction")
        print(f"f={f:>3}  silent fraction mean={row['mean']:.3f}  min={row['min']:.3f}")


if __name__ == "__main__":
    main()
