"""Exception-set size of the MIS-based ring colouring player as n grows.

Fits |X| ~ a * g * (log2 n)^beta by least squares on the per-n means.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from dualgraph.harness import ExperimentConfig, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--rounds", type=int, default=16)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--accounting", choices=["mis_phase", "full"], default="mis_phase")
    ap.add_argument("--c", type=float, default=3.0)
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args()

    means = []
    for n in args.sizes:
        cfg = ExperimentConfig(
            kind="exception-set", name=f"exceptions_{n}", network={"n": n},
            adversary={"kind": "threshold", "c": args.c}, algorithm="decay-mis",
            rounds={"preset": "fixed", "value": args.rounds}, trials=args.trials, seed=args.seed,
            params={"accounting": args.accounting},
        )
        stats = run_experiment(cfg, write=False)
        x = stats.metric("exceptions")
        means.append(x["mean"])
        print(f"n={n:>5}  |X| mean={x['mean']:.1f}  min={x['min']:.0f}  max={x['max']:.0f}  "
              f"per g*log2(n)={x['mean'] / (args.rounds * math.log2(n)):.3f}")
    if len(args.sizes) >= 2:
        beta, log_a = np.polyfit(np.log(np.log2(args.sizes)), np.log(np.array(means) / args.rounds), 1)
        print(f"fit: a={math.exp(log_a):.3f}  beta={beta:.3f}")


if __name__ == "__main__":
    main()
