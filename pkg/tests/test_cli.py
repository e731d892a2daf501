from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from dualgraph.cli import main

ROOT = Path(__file__).resolve().parents[1]


def test_run_with_seed_override(tmp_path, capsys):
    cfg = ROOT / "tests" / "fixtures" / "golden_config.json"
    assert main(["run", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["run", str(cfg), "--out", str(tmp_path / "b"), "--seed", "99"]) == 0
    a = (tmp_path / "a" / "golden.jsonl").read_text()
    b = (tmp_path / "b" / "golden.jsonl").read_text()
    assert a == (ROOT / "tests" / "fixtures" / "golden_trial.jsonl").read_text()
    assert a != b


@pytest.mark.parametrize("kind,extra", [("cds-hard", ["--n", "64"]), ("barbell", ["--k", "8", "--t", "3"]),
                                         ("g-kappa", ["--kappa", "0110"]), ("ring", ["--n", "12", "--ids", "random"])])
def test_build_net(kind, extra, tmp_path):
    out = tmp_path / f"{kind}.json"
    assert main(["build-net", "--kind", kind, "--out", str(out), *extra]) == 0
    doc = json.loads(out.read_text())
    assert doc["roles"]["kind"] == kind


def test_verify_exit_codes(tmp_path, capsys):
    net = tmp_path / "ring.json"
    main(["build-net", "--kind", "ring", "--n", "6", "--out", str(net)])
    good, bad = tmp_path / "good.json", tmp_path / "bad.json"
    good.write_text("[1, 3, 5]")
    bad.write_text('{"members": [1, 2]}')
    capsys.readouterr()
    assert main(["verify", "--graph", str(net), "--set", str(good)]) == 0
    assert json.loads(capsys.readouterr().out)["valid"] is True
    assert main(["verify", "--graph", str(net), "--set", str(bad)]) == 1
    assert main(["verify", "--graph", str(net), "--set", str(good), "--kind", "cds"]) == 1


def test_play_game(tmp_path):
    out = tmp_path / "iso.json"
    assert main(["play-game", "--game", "isolation", "--player", "exclusion", "--k", "8", "--rounds", "2",
                 "--trials", "400", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["bound"] == 0.25 and doc["wilson"][0] <= 0.25 <= doc["wilson"][1]
    assert main(["play-game", "--game", "bit-reveal", "--player", "read-then-guess", "--k", "4", "--rounds", "4",
                 "--trials", "50", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["rate"] == 1.0
    assert main(["play-game", "--game", "ring-coloring", "--n", "16", "--rounds", "4", "--trials", "5", "--out", str(out)]) == 0


def test_linial(tmp_path):
    out = tmp_path / "chi.json"
    assert main(["linial", "--m", "6", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert [r["chi"] for r in doc["results"]] == [1, 2, 3, 3]


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "dualgraph.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "build-net" in proc.stdout
