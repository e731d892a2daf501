"""Experiment configs, the seeded Monte Carlo trial runner and its summaries.

Every trial is a pure function of ``(config, trial index)``: its seed is
``derive_seed(config.seed, "trial", t)`` and nothing else feeds it, so
records are identical whether trials run in order, shuffled or in parallel.
Records go to JSONL (one line per trial, sorted keys, no timestamps) and
the aggregates to a CSV that can be rebuilt from the JSONL alone.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from scipy.stats import binomtest

from . import games, reductions
from .adversary import adversary_from_config
from .algorithms import ALGORITHMS, make_algorithm
from .model import ALL_UNRELIABLE, DualGraph, run_execution
from .seeding import Stream, derive_seed
from .structures import MIN_CDS_LIMIT, approx_ratio, verify_cds, verify_mis

__all__ = [
    "ExperimentConfig",
    "TrialStats",
    "aggregate",
    "build_network",
    "derive_seed",
    "load_records",
    "resolve_rounds",
    "run_experiment",
    "run_trial",
    "summary_csv",
]

KINDS = ("execution", "silent-sets", "exception-set", "ring-coloring", "isolation", "bit-reveal")
OUTPUT_ENV = "DUALGRAPH_OUT"
EXIT_OK, EXIT_INVARIANT = 0, 2


@dataclass
class ExperimentConfig:
    """Declarative description of one Monte Carlo experiment.

    ``network`` names a builder (``ring``, ``line``, ``complete``,
    ``cds-hard``, ``barbell``, ``g-kappa``, ``file``) plus its parameters;
    ``rounds`` names a preset (see :func:`resolve_rounds`); ``params`` holds
    kind-specific knobs such as ``k``, ``r`` or ``accounting``.
    """

    kind: str = "execution"
    name: str = "experiment"
    network: dict = field(default_factory=lambda: {"builder": "ring", "n": 32})
    adversary: dict = field(default_factory=lambda: {"kind": "static_none"})
    algorithm: str = "decay-mis"
    algorithm_params: dict = field(default_factory=dict)
    mode: str = "advance"
    rounds: dict = field(default_factory=lambda: {"preset": "fixed", "value": 32})
    trials: int = 1
    seed: int = 0
    params: dict = field(default_factory=dict)
    output_dir: str | None = None

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        if self.rounds.get("preset", "fixed") not in ROUND_PRESETS:
            raise ValueError(f"unknown rounds preset {self.rounds.get('preset')!r}")
        builder = self.network.get("builder", "ring")
        if builder not in NETWORK_BUILDERS:
            raise ValueError(f"unknown network builder {builder!r}")
        if self.mode not in ("advance", "passive"):
            raise ValueError(f"unknown knowledge mode {self.mode!r}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: Mapping) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config fields {sorted(extra)}")
        return cls(**dict(doc))

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")


# -- presets ----------------------------------------------------------------


def _sqrt_over_log(n: int, **_) -> int:
    return math.floor(math.sqrt(n) / (2 * math.log2(n)))


ROUND_PRESETS = {
    "fixed": lambda n, value=1, **_: int(value),
    "sqrt-over-log": _sqrt_over_log,
    "log": lambda n, scale=1, **_: int(math.ceil(scale * math.log2(n))),
    "log-squared": lambda n, scale=1, **_: int(math.ceil(scale * math.log2(n) ** 2)),
    "linear": lambda n, scale=1, **_: int(math.ceil(scale * n)),
    "algorithm-default": None,  # resolved against the algorithm object
}


def resolve_rounds(spec: Mapping, n: int, algorithm: Any = None) -> int:
    """Round count for a network of ``n`` nodes from a named preset."""
    spec = dict(spec)
    preset = spec.pop("preset", "fixed")
    if preset == "algorithm-default":
        if algorithm is None or not hasattr(algorithm, "default_rounds"):
            raise ValueError("algorithm has no default round budget")
        return int(algorithm.default_rounds())
    try:
        fn = ROUND_PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown rounds preset {preset!r}") from None
    r = fn(n, **spec)
    if r < 0:
        raise ValueError("rounds must be >= 0")
    return r


def _ring(n: int, ids: str = "identity", seed: int = 0, **_) -> DualGraph:
    labels = list(range(1, n + 1))
    if ids == "random":
        Stream(derive_seed(seed, "ring-ids")).shuffle(labels)
    edges = [(labels[i], labels[(i + 1) % n]) for i in range(n)]
    return DualGraph.with_complete_prime(n, edges)


def _line(n: int, **_) -> DualGraph:
    return DualGraph.with_complete_prime(n, [(i, i + 1) for i in range(1, n)])


def _complete(n: int, **_) -> DualGraph:
    return DualGraph(n, [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)])


def _cds_hard(n: int, algorithm: str = "decay-cds", algorithm_params: Mapping | None = None, **_) -> DualGraph:
    alg = make_algorithm(algorithm, n, **(algorithm_params or {}))
    return reductions.build_cds_hard_network(alg, n).graph


def _barbell(k: int, t: int | None = None, seed: int = 0, **_) -> DualGraph:
    if t is None:
        t = Stream(derive_seed(seed, "barbell-target")).randrange(k) + 1
    return reductions.barbell_graph(k, t)


def _g_kappa(kappa: Sequence[int] | str | None = None, k: int | None = None, seed: int = 0, **_) -> DualGraph:
    if kappa is None:
        kappa = games.random_bits(int(k), seed)
    elif isinstance(kappa, str):
        kappa = [int(ch) for ch in kappa]
    return reductions.build_g_kappa(kappa)


def _from_file(path: str, **_) -> DualGraph:
    return DualGraph.load(path)


NETWORK_BUILDERS = {
    "ring": _ring,
    "line": _line,
    "complete": _complete,
    "cds-hard": _cds_hard,
    "barbell": _barbell,
    "g-kappa": _g_kappa,
    "file": _from_file,
}


def build_network(spec: Mapping, seed: int = 0) -> DualGraph:
    spec = dict(spec)
    builder = spec.pop("builder", "ring")
    try:
        fn = NETWORK_BUILDERS[builder]
    except KeyError:
        raise ValueError(f"unknown network builder {builder!r}") from None
    return fn(seed=seed, **spec)


# -- trials -----------------------------------------------------------------


def _execution_trial(cfg: ExperimentConfig, seed: int) -> dict:
    graph = build_network(cfg.network, seed)
    alg = make_algorithm(cfg.algorithm, graph.n, **cfg.algorithm_params)
    rounds = resolve_rounds(cfg.rounds, graph.n, alg)
    adv = adversary_from_config(graph, cfg.adversary)
    res = run_execution(graph, adv, alg, cfg.mode, rounds, seed)
    receivers = [len(rt.receptions) for rt in res.transcript]
    jammed = [rt for rt in res.transcript if rt.adversary_edges is ALL_UNRELIABLE and len(rt.broadcasts) >= 2]
    jam_breaks = sum(1 for rt in jammed if rt.receptions)
    check = cfg.params.get("verify", "cds" if cfg.algorithm.endswith("cds") else "mis")
    rec: dict[str, Any] = {
        "n": graph.n,
        "rounds": rounds,
        "joined": len(res.joined),
        "receivers_per_round": receivers,
        "max_receivers": max(receivers, default=0),
        "total_receptions": sum(receivers),
        "broadcasters_per_round": [len(rt.broadcasts) for rt in res.transcript],
        "jammed_rounds": len(jammed),
        "jammed_receptions": sum(len(rt.receptions) for rt in jammed),
    }
    if check == "mis":
        report = verify_mis(graph, res.joined)
        rec["valid"] = report.valid
        rec["violations"] = sorted({v.kind for v in report.violations})
    elif check == "cds":
        report = verify_cds(graph, res.joined)
        rec["valid"] = report.valid
        rec["violations"] = sorted({v.kind for v in report.violations})
        if report.valid and graph.n <= MIN_CDS_LIMIT:
            rec["approx_ratio"] = float(approx_ratio(graph, res.joined))
    invariants = []
    if jam_breaks:
        invariants.append(f"{jam_breaks} all-edges round(s) with several broadcasters delivered messages")
    rec["invariant_violations"] = invariants
    return rec


def _silent_trial(cfg: ExperimentConfig, seed: int) -> dict:
    n = int(cfg.network.get("n", 64))
    cds = make_algorithm(cfg.algorithm, n, **cfg.algorithm_params)
    layout = reductions.build_cds_hard_network(cds, n)
    rounds = resolve_rounds(cfg.rounds, n, cds)
    adv = adversary_from_config(layout.graph, cfg.adversary)
    res = run_execution(layout.graph, adv, cds, cfg.mode, rounds, seed)
    heard = {u for rt in res.transcript for u in rt.receptions}
    frac = reductions.silent_fraction(layout, heard)
    return {
        "n": n,
        "k": layout.k,
        "rounds": rounds,
        "cases": [layout.cases[h] for h in sorted(layout.cases)],
        "silent_sets": round(frac * len(layout.point_sets)),
        "silent_fraction": frac,
        "max_receivers": max((len(rt.receptions) for rt in res.transcript), default=0),
        "invariant_violations": reductions.check_hard_layout(layout, cds),
    }


def _ring_trial(cfg: ExperimentConfig, seed: int) -> dict:
    n = int(cfg.network.get("n", 64))
    mis = make_algorithm(cfg.algorithm, n, **cfg.algorithm_params)
    g = resolve_rounds(cfg.rounds, n, mis)
    c = float(cfg.adversary.get("c", 3.0))
    player = reductions.ColoringPlayer(mis, g, c, seed, cfg.params.get("accounting", "mis_phase"))
    referee = games.BlockShuffleReferee(float(cfg.params.get("epsilon", 1.0)), seed)
    budget = cfg.params.get("budget", n)
    tr = games.play_selective_ring_coloring(player, referee, n, int(budget))
    run = player.run
    mis_ok = verify_mis(reductions.ring_dualgraph(player.assignment), run.mis).valid
    return {
        "n": n,
        "rounds": g,
        "exceptions": len(tr.record["exceptions"]),
        "announce_receivers": len(run.all_receivers - run.mis_receivers),
        "mis_valid": mis_ok,
        "simulated_proper": run.proper(player.assignment),
        "win": tr.win,
        "reason": tr.reason,
        "invariant_violations": [],
    }


def _isolation_trial(cfg: ExperimentConfig, seed: int) -> dict:
    k = int(cfg.params.get("k", 64))
    r = int(cfg.params.get("r", 16))
    kind = cfg.params.get("player", "uniform")
    invariants = []
    if kind == "cds-reduction":
        alg = make_algorithm(cfg.algorithm, k, **cfg.algorithm_params)
        f = resolve_rounds(cfg.rounds, k, alg)
        player = reductions.IsolationPlayerFromCDS(alg, f, seed)
        tr = games.play_isolation(player, k, r, seed)
        direct = run_execution(reductions.barbell_graph(k, tr.record["target"]), adversary_from_config(None, {"kind": "static_all"}), alg, "passive", f, seed)
        if not reductions.transcripts_agree(player.transcript, direct.transcript):
            invariants.append("simulated transcript differs from the direct execution")
    else:
        player = games.PLAYERS["isolation"][kind](seed, **cfg.params.get("player_params", {}))
        tr = games.play_isolation(player, k, r, seed)
    return {"k": k, "r": r, "win": tr.win, "rounds_used": tr.rounds_used, "reason": tr.reason, "invariant_violations": invariants}


def _bit_trial(cfg: ExperimentConfig, seed: int) -> dict:
    k = int(cfg.params.get("k", 16))
    kind = cfg.params.get("player", "read-then-guess")
    invariants = []
    if kind == "mis-reduction":
        alg = make_algorithm(cfg.algorithm, 6 * k, **cfg.algorithm_params)
        f = resolve_rounds(cfg.rounds, 6 * k, alg)
        player = reductions.BitRevealPlayerFromMIS(alg, f, seed)
        budget = int(cfg.params.get("t", f))
        tr = games.play_bit_revealing(player, k, budget, seed)
        if len(player.transcript) == f:
            kappa = tr.record["kappa"]
            direct = run_execution(reductions.build_g_kappa(kappa), adversary_from_config(None, {"kind": "static_all"}), alg, "passive", f, seed)
            if not reductions.transcripts_agree(player.transcript, direct.transcript):
                invariants.append("simulated transcript differs from the direct execution")
    else:
        t = int(cfg.params.get("t", 8))
        player = games.PLAYERS["bit-reveal"][kind](seed, t=t)
        tr = games.play_bit_revealing(player, k, t, seed)
    return {"k": k, "win": tr.win, "rounds_used": tr.rounds_used, "reason": tr.reason, "invariant_violations": invariants}


TRIAL_KINDS = {
    "execution": _execution_trial,
    "silent-sets": _silent_trial,
    "exception-set": _ring_trial,
    "ring-coloring": _ring_trial,
    "isolation": _isolation_trial,
    "bit-reveal": _bit_trial,
}


def run_trial(cfg: ExperimentConfig, t: int) -> dict:
    """One trial record; a pure function of the config and the index."""
    seed = derive_seed(cfg.seed, "trial", t)
    rec = TRIAL_KINDS[cfg.kind](cfg, seed)
    rec["trial"] = t
    rec["seed"] = seed
    return rec


def _trial_from_json(args: tuple[dict, int]) -> dict:
    doc, t = args
    return run_trial(ExperimentConfig.from_json(doc), t)


# -- aggregation --------------------------------------------------------------

SUMMARY_FIELDS = ("metric", "count", "mean", "min", "max", "wilson_low", "wilson_high")


def aggregate(records: Sequence[Mapping]) -> list[dict]:
    """Summary rows: booleans get a rate with a Wilson interval, numbers get mean/min/max."""
    rows = []
    keys = sorted({k for r in records for k in r} - {"trial", "seed"})
    for key in keys:
        vals = [r[key] for r in records if key in r]
        if vals and all(isinstance(v, bool) for v in vals):
            wins = sum(vals)
            ci = binomtest(wins, len(vals)).proportion_ci(method="wilson")
            rows.append({
                "metric": key, "count": len(vals), "mean": wins / len(vals),
                "min": float(min(vals)), "max": float(max(vals)),
                "wilson_low": float(ci.low), "wilson_high": float(ci.high),
            })
        elif vals and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
            rows.append({
                "metric": key, "count": len(vals), "mean": math.fsum(vals) / len(vals),
                "min": float(min(vals)), "max": float(max(vals)),
                "wilson_low": "", "wilson_high": "",
            })
    return rows


def summary_csv(rows: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def records_jsonl(records: Sequence[Mapping]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def load_records(path: str | Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


@dataclass
class TrialStats:
    records: list[dict]
    summary: list[dict]
    exit_code: int
    records_path: Path | None = None
    summary_path: Path | None = None

    def metric(self, name: str) -> dict:
        for row in self.summary:
            if row["metric"] == name:
                return row
        raise KeyError(name)

    @property
    def invariant_violations(self) -> list[tuple[int, str]]:
        return [(r["trial"], msg) for r in self.records for msg in r.get("invariant_violations", [])]


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


def run_experiment(
    config: ExperimentConfig,
    jobs: int = 1,
    output_dir: str | Path | None = None,
    write: bool = True,
) -> TrialStats:
    """Run every trial, write ``<name>.jsonl`` and ``<name>.summary.csv``.

    Exit code 2 flags a structural invariant violation in any trial.
    """
    config.validate()
    indices = range(int(config.trials))
    if jobs > 1:
        doc = config.to_json()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_trial_from_json, [(doc, t) for t in indices]))
    else:
        records = [run_trial(config, t) for t in indices]
    records.sort(key=lambda r: r["trial"])
    summary = aggregate(records)
    code = EXIT_INVARIANT if any(r.get("invariant_violations") for r in records) else EXIT_OK
    stats = TrialStats(records, summary, code)
    if write:
        out = Path(output_dir or config.output_dir or default_output_dir())
        out.mkdir(parents=True, exist_ok=True)
        stats.records_path = out / f"{config.name}.jsonl"
        stats.summary_path = out / f"{config.name}.summary.csv"
        stats.records_path.write_text(records_jsonl(records))
        stats.summary_path.write_text(summary_csv(summary))
    return stats
