"""Dual graph radio network model, adversaries, lower-bound games and reductions."""

from .adversary import (
    OfflineAdaptiveAdversary,
    OnlineAdaptiveAdversary,
    StaticAdversary,
    static_all_edges,
    static_no_edges,
    threshold_adversary,
)
from .algorithms import ALGORITHMS, DecayCDS, DecayMIS, RoundRobin, make_algorithm
from .model import ALL_UNRELIABLE, DualGraph, KnowledgeMode, Reception, RoundTranscript, resolve_round, run_execution
from .seeding import derive_seed
from .structures import verify_cds, verify_mis

__all__ = [
    "ALGORITHMS",
    "ALL_UNRELIABLE",
    "DecayCDS",
    "DecayMIS",
    "DualGraph",
    "KnowledgeMode",
    "OfflineAdaptiveAdversary",
    "OnlineAdaptiveAdversary",
    "Reception",
    "RoundRobin",
    "RoundTranscript",
    "StaticAdversary",
    "derive_seed",
    "make_algorithm",
    "resolve_round",
    "run_execution",
    "static_all_edges",
    "static_no_edges",
    "threshold_adversary",
    "verify_cds",
    "verify_mis",
]
