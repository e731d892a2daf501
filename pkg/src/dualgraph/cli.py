"""Command-line entry point: ``dualgraph {run,build-net,play-game,linial,verify}``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import games, harness, linial, reductions
from .algorithms import make_algorithm
from .model import DualGraph
from .structures import verify_cds, verify_mis


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = harness.ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    stats = harness.run_experiment(cfg, jobs=args.jobs, output_dir=args.out)
    for row in stats.summary:
        print(f"{row['metric']:>24}  mean={row['mean']:.6g}  max={row['max']:.6g}")
    print(f"records: {stats.records_path}")
    print(f"summary: {stats.summary_path}")
    for trial, msg in stats.invariant_violations:
        print(f"invariant violation in trial {trial}: {msg}", file=sys.stderr)
    return stats.exit_code


def cmd_build_net(args: argparse.Namespace) -> int:
    extra: dict = {"kind": args.kind}
    if args.kind == "cds-hard":
        alg = make_algorithm(args.algorithm, args.n)
        layout = reductions.build_cds_hard_network(alg, args.n)
        problems = reductions.check_hard_layout(layout, alg)
        graph, extra = layout.graph, layout.roles()
        extra["algorithm"] = args.algorithm
        if problems:
            print("\n".join(problems), file=sys.stderr)
            return 2
    elif args.kind == "barbell":
        graph = reductions.barbell_graph(args.k, args.t)
        extra.update(k=args.k, t=args.t, bridge=list(reductions.bridge(args.k, args.t)))
    elif args.kind == "g-kappa":
        bits = [int(ch) for ch in args.kappa] if args.kappa else list(games.random_bits(args.k, args.seed))
        graph = reductions.build_g_kappa(bits)
        extra.update(kappa=bits, sets={i: list(reductions.g_kappa_set(len(bits), i)) for i in range(1, len(bits) + 1)})
    else:
        graph = harness.build_network({"builder": "ring", "n": args.n, "ids": args.ids}, args.seed)
        extra.update(ids=args.ids)
    graph.save(args.out, roles=extra)
    print(f"wrote {graph!r} to {args.out}")
    return 0


def cmd_play_game(args: argparse.Namespace) -> int:
    if args.game == "isolation":
        k, r = args.k or 64, args.rounds or 16
        if args.player == "cds-reduction":
            alg = make_algorithm("decay-cds", k)
            make = lambda s: reductions.IsolationPlayerFromCDS(alg, args.f, s)
        else:
            make = lambda s: games.PLAYERS["isolation"][args.player](s)
        play = lambda s: games.play_isolation(make(s), k, r, s)
        bound = r / k
    elif args.game == "bit-reveal":
        k, t = args.k or 16, args.rounds or 8
        if args.player == "mis-reduction":
            alg = make_algorithm("decay-mis", 6 * k)
            make = lambda s: reductions.BitRevealPlayerFromMIS(alg, t, s)
        else:
            make = lambda s: games.PLAYERS["bit-reveal"][args.player](s, t=t)
        play = lambda s: games.play_bit_revealing(make(s), k, t, s)
        bound = 2.0 ** -(k - t)
    else:
        n, g = args.n or 64, args.rounds or 16
        alg = make_algorithm("decay-mis", n)
        play = lambda s: games.play_selective_ring_coloring(
            reductions.ColoringPlayer(alg, g, 3.0, s), games.BlockShuffleReferee(args.epsilon, s), n, args.budget or n
        )
        bound = None
    wr = games.win_rate(play, args.trials, args.seed)
    lo, hi = wr.wilson
    _emit({"game": args.game, "player": args.player, "wins": wr.wins, "trials": wr.trials,
           "rate": wr.rate, "wilson": [lo, hi], "bound": bound}, args.out)
    return 0


def cmd_linial(args: argparse.Namespace) -> int:
    start = time.monotonic()
    rows = []
    try:
        results = linial.view_graph_chromatic_numbers(args.t, args.m, time_budget=args.budget)
        frontier = None
    except linial.ColoringBudgetExceeded as exc:
        results, frontier = {}, exc.frontier
    for m, res in results.items():
        vg = linial.build_view_graph(args.t, m)
        rows.append({"m": m, "vertices": len(vg.vertices), "edges": vg.num_edges, "chi": res.chi,
                     "proper": res.proper(vg.adjacency), "lower_bound": res.lower_bound_source,
                     "nodes_searched": res.nodes_searched})
        print(f"m={m:>3}  |V|={len(vg.vertices):>6}  |E|={vg.num_edges:>7}  chi={res.chi}  ({res.lower_bound_source})")
    doc = {"t": args.t, "results": rows, "frontier": frontier, "seconds": round(time.monotonic() - start, 2)}
    if frontier:
        print(f"budget exhausted: {frontier}", file=sys.stderr)
    if args.out:
        _emit(doc, args.out)
    return 0 if frontier is None else 1


def cmd_verify(args: argparse.Namespace) -> int:
    graph = DualGraph.load(args.graph)
    doc = json.loads(Path(args.set).read_text())
    members = doc["members"] if isinstance(doc, dict) else doc
    report = verify_mis(graph, members) if args.kind == "mis" else verify_cds(graph, members)
    print(json.dumps(report.to_json(), sort_keys=True))
    return 0 if report.valid else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dualgraph", description="Dual graph radio model experiments")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--out", help=f"output directory (default ${harness.OUTPUT_ENV} or ./runs)")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("build-net", help="write a constructed network as JSON")
    b.add_argument("--kind", choices=["cds-hard", "barbell", "g-kappa", "ring"], required=True)
    b.add_argument("--n", type=int, default=64)
    b.add_argument("--k", type=int, default=16)
    b.add_argument("--t", type=int, default=1)
    b.add_argument("--kappa", help="bit string for g-kappa, e.g. 0110")
    b.add_argument("--ids", choices=["identity", "random"], default="identity")
    b.add_argument("--algorithm", default="decay-cds")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build_net)

    g = sub.add_parser("play-game", help="estimate a player's win rate")
    g.add_argument("--game", choices=["isolation", "bit-reveal", "ring-coloring"], required=True)
    g.add_argument("--player", default="uniform")
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--rounds", type=int, help="r for isolation, t for bit-reveal, g for ring colouring")
    g.add_argument("--f", type=int, default=8, help="simulated rounds for the reduction players")
    g.add_argument("--epsilon", type=float, default=1.0)
    g.add_argument("--budget", type=int)
    g.add_argument("--trials", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_play_game)

    lin = sub.add_parser("linial", help="chromatic numbers of the view graphs B(t, m)")
    lin.add_argument("--t", type=int, default=1)
    lin.add_argument("--m", type=int, default=10)
    lin.add_argument("--budget", type=float, default=600.0, help="seconds for the whole sweep")
    lin.add_argument("--out")
    lin.set_defaults(func=cmd_linial)

    v = sub.add_parser("verify", help="check an MIS or CDS against a graph file")
    v.add_argument("--graph", required=True)
    v.add_argument("--set", required=True, help="JSON list of ids or {\"members\": [...]}")
    v.add_argument("--kind", choices=["mis", "cds"], default="mis")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
