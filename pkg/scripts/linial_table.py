"""Table of chi(B(t, m)) with the size of each view graph and how the bounds were certified."""

from __future__ import annotations

import argparse
import time

from dualgraph import linial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, default=1)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--budget", type=float, default=600.0)
    args = ap.parse_args()

    start = time.monotonic()
    try:
        results = linial.view_graph_chromatic_numbers(args.t, args.m, time_budget=args.budget)
    except linial.ColoringBudgetExceeded as exc:
        print(f"budget exhausted at {exc.frontier}")
        return
    print(f"{'m':>3} {'|V|':>6} {'|E|':>7} {'chi':>4}  lower bound")
    for m, res in results.items():
        vg = linial.build_view_graph(args.t, m)
        assert res.proper(vg.adjacency)
        print(f"{m:>3} {len(vg.vertices):>6} {vg.num_edges:>7} {res.chi:>4}  {res.lower_bound_source}")
    print(f"{time.monotonic() - start:.1f}s")


if __name__ == "__main__":
    main()
