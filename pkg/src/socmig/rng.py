"""Deterministic RNG stream derivation for replicated simulations.

Every run is fully determined by (master_seed, replicate_index). Each
replicate gets independent substreams per purpose, so e.g. the opinion
trajectory of replicate r is identical whether or not migration runs,
and paired-seed experiments share graph + opinion draws exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ReplicateStreams:
    # SeedSequence (not Generator) so graph construction can spawn
    # fresh child seeds per connectivity retry.
    graph: np.random.SeedSequence
    init_opinions: np.random.Generator
    init_assign: np.random.Generator
    noise: np.random.Generator
    migration: np.random.Generator


def make_streams(master_seed: int, replicate: int = 0) -> ReplicateStreams:
    """Derive the per-purpose streams for one replicate.

    Structure:
      (master_seed, replicate)
        ├── graph        (SeedSequence; children spawned per retry)
        ├── init_opinions
        ├── init_assign
        ├── noise        (opinion disturbance draws)
        └── migration    (community choice draws)
    """
    root = np.random.SeedSequence([int(master_seed), int(replicate)])
    ss_graph, ss_init_op, ss_init_as, ss_noise, ss_mig = root.spawn(5)
    return ReplicateStreams(
        graph=ss_graph,
        init_opinions=np.random.default_rng(ss_init_op),
        init_assign=np.random.default_rng(ss_init_as),
        noise=np.random.default_rng(ss_noise),
        migration=np.random.default_rng(ss_mig),
    )


def as_seed_sequence(seed) -> np.random.SeedSequence:
    """Accept an int or a SeedSequence wherever a derivable seed is needed."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))
