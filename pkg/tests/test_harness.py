from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from dualgraph.harness import (
    EXIT_INVARIANT,
    ExperimentConfig,
    TrialStats,
    aggregate,
    build_network,
    load_records,
    resolve_rounds,
    run_experiment,
    run_trial,
    summary_csv,
)

FIXTURES = Path(__file__).parent / "fixtures"


def small(kind="execution", **kw):
    base = dict(kind=kind, name=f"t-{kind}", trials=6, seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


def test_golden_record_byte_for_byte(tmp_path):
    cfg = ExperimentConfig.load(FIXTURES / "golden_config.json")
    stats = run_experiment(cfg, output_dir=tmp_path)
    assert stats.records_path.read_bytes() == (FIXTURES / "golden_trial.jsonl").read_bytes()


def test_config_round_trip(tmp_path):
    cfg = small(params={"k": 3}, rounds={"preset": "log", "scale": 2})
    cfg.save(tmp_path / "c.json")
    assert ExperimentConfig.load(tmp_path / "c.json") == cfg


@pytest.mark.parametrize(
    "bad",
    [
        {"kind": "nonsense"},
        {"trials": 0},
        {"rounds": {"preset": "whenever"}},
        {"network": {"builder": "torus"}},
        {"algorithm": "luby"},
        {"mode": "psychic"},
    ],
)
def test_unresolvable_names_rejected(bad):
    with pytest.raises(ValueError):
        small(**bad)


def test_unknown_config_fields_rejected():
    with pytest.raises(ValueError):
        ExperimentConfig.from_json({"kind": "execution", "colour": "blue"})


def test_round_presets():
    assert resolve_rounds({"preset": "sqrt-over-log"}, 64) == 0
    assert resolve_rounds({"preset": "sqrt-over-log"}, 256) == 1
    assert resolve_rounds({"preset": "sqrt-over-log"}, 4096) == 2
    assert resolve_rounds({"preset": "log"}, 256) == 8
    assert resolve_rounds({"preset": "log-squared"}, 16) == 16
    assert resolve_rounds({"preset": "linear", "scale": 2}, 10) == 20
    assert resolve_rounds({"preset": "fixed", "value": 7}, 10) == 7


def test_network_builders(tmp_path):
    assert build_network({"builder": "ring", "n": 6}).n == 6
    a = build_network({"builder": "ring", "n": 9, "ids": "random"}, seed=1)
    b = build_network({"builder": "ring", "n": 9, "ids": "random"}, seed=2)
    assert a.reliable_edges != b.reliable_edges
    assert build_network({"builder": "g-kappa", "kappa": "0110"}).n == 24
    assert build_network({"builder": "barbell", "k": 8, "t": 2}).n == 8
    assert build_network({"builder": "cds-hard", "n": 16}).n == 16
    g = build_network({"builder": "line", "n": 5})
    g.save(tmp_path / "g.json")
    assert build_network({"builder": "file", "path": str(tmp_path / "g.json")}) == g


@pytest.mark.parametrize(
    "cfg",
    [
        small(network={"builder": "ring", "n": 12}, rounds={"preset": "fixed", "value": 20}),
        small(algorithm="decay-cds", network={"builder": "line", "n": 8}, rounds={"preset": "fixed", "value": 20}),
        small("silent-sets", network={"n": 64}, adversary={"kind": "threshold", "c": 3}, algorithm="decay-cds",
              rounds={"preset": "sqrt-over-log"}),
        small("exception-set", network={"n": 32}, adversary={"kind": "threshold", "c": 3}, rounds={"preset": "fixed", "value": 8}),
        small("isolation", params={"k": 16, "r": 4, "player": "uniform"}),
        small("isolation", algorithm="decay-cds", rounds={"preset": "fixed", "value": 6}, params={"k": 8, "r": 40, "player": "cds-reduction"}),
        small("bit-reveal", params={"k": 4, "t": 2}),
        small("bit-reveal", rounds={"preset": "fixed", "value": 6}, params={"k": 3, "player": "mis-reduction"}),
    ],
    ids=lambda c: f"{c.kind}-{c.params.get('player', c.algorithm)}",
)
def test_every_kind_runs_and_replays(cfg, tmp_path):
    a = run_experiment(cfg, output_dir=tmp_path / "a")
    b = run_experiment(cfg, output_dir=tmp_path / "b")
    assert a.exit_code == 0
    assert a.records_path.read_bytes() == b.records_path.read_bytes()
    assert a.summary_path.read_bytes() == b.summary_path.read_bytes()
    assert [r["trial"] for r in a.records] == list(range(cfg.trials))


def test_trial_order_does_not_matter():
    cfg = small(trials=10, network={"builder": "ring", "n": 10}, rounds={"preset": "fixed", "value": 15})
    forward = [run_trial(cfg, t) for t in range(10)]
    order = list(range(10))
    random.Random(4).shuffle(order)
    shuffled = {t: run_trial(cfg, t) for t in order}
    assert forward == [shuffled[t] for t in range(10)]


def test_parallel_matches_serial(tmp_path):
    cfg = small(trials=8, network={"builder": "ring", "n": 10}, rounds={"preset": "fixed", "value": 15})
    a = run_experiment(cfg, jobs=1, output_dir=tmp_path / "serial")
    b = run_experiment(cfg, jobs=2, output_dir=tmp_path / "parallel")
    assert a.records_path.read_bytes() == b.records_path.read_bytes()


def test_summary_rebuilt_from_jsonl(tmp_path):
    cfg = small("isolation", trials=50, params={"k": 8, "r": 3, "player": "exclusion"})
    stats = run_experiment(cfg, output_dir=tmp_path)
    again = summary_csv(aggregate(load_records(stats.records_path)))
    assert again == stats.summary_path.read_text()
    win = stats.metric("win")
    assert win["wilson_low"] <= win["mean"] <= win["wilson_high"]


@given(st.lists(st.fixed_dictionaries({"x": st.integers(-5, 5), "ok": st.booleans(), "y": st.floats(0, 1)}), min_size=1, max_size=20))
@settings(max_examples=60, deadline=None)
def test_aggregate_order_insensitive(rows):
    recs = [dict(r, trial=i, seed=i) for i, r in enumerate(rows)]
    shuffled = list(reversed(recs))
    assert summary_csv(aggregate(recs)) == summary_csv(aggregate(shuffled))
    assert summary_csv(aggregate(json.loads(json.dumps(recs)))) == summary_csv(aggregate(recs))


def test_invariant_violation_sets_exit_code(monkeypatch, tmp_path):
    import dualgraph.harness as h

    def broken(cfg, seed):
        return {"invariant_violations": ["forced"]}

    monkeypatch.setitem(h.TRIAL_KINDS, "isolation", broken)
    stats = run_experiment(small("isolation", trials=2), output_dir=tmp_path)
    assert stats.exit_code == EXIT_INVARIANT
    assert stats.invariant_violations == [(0, "forced"), (1, "forced")]


def test_output_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("DUALGRAPH_OUT", str(tmp_path / "env"))
    stats = run_experiment(small("isolation", trials=1, params={"k": 4, "r": 1}))
    assert stats.records_path.parent == tmp_path / "env"
