"""Run orchestration and artifact emission.

A run simulates `replicates` compound trajectories (optionally across a
process pool; results are identical either way because every replicate is
derived from (seed, replicate_index) alone), then writes a bundle:

    config.json       exact echo of the validated configuration
    graph.json        replicate 0's graph
    opinions.csv      t, agent_id, private, expressed      (replicate 0)
    populations.csv   t, community_id, population          (replicate 0)
    assignments.csv   t, agent_id, community_id            (optional flag)
    rates.csv         window_start, community_id, ngr, nmr (replicate 0)
    report.json       per-replicate summaries and run-level aggregates

Floats are written with repr() so identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import STAR, SimConfig, config_from_dict
from .graphs import SocialGraph, gen_small_world, gen_star
from .metrics import opinion_band_width, windowed_rates
from .migration import Trajectory, run_compound
from .opinions import consensus_time
from .rng import make_streams

OUT_DIR_ENV = "SOCMIG_OUT_DIR"


def build_graph(config: SimConfig, graph_seed) -> SocialGraph:
    if config.graph.type == STAR:
        return gen_star(config.graph.n)
    return gen_small_world(
        config.graph.n, config.graph.k, config.graph.p_rewire, graph_seed
    )


def simulate_replicate(config: SimConfig, replicate: int) -> Trajectory:
    """One fully deterministic compound trajectory."""
    streams = make_streams(config.seed, replicate)
    graph = build_graph(config, streams.graph)
    return run_compound(
        graph,
        config.opinion,
        config.migration,
        config.horizon,
        streams,
        initial_split=config.initial_split,
    )


def replicate_summary(config: SimConfig, traj: Trajectory, replicate: int) -> dict:
    ct = consensus_time(
        traj.spreads.tolist(), config.consensus_eps, config.consensus_window
    )
    pops = traj.populations
    burn_in = config.effective_burn_in
    band = (
        opinion_band_width(traj.states, burn_in)
        if len(traj.states) > burn_in
        else None
    )
    return {
        "replicate": replicate,
        "consensus_time": ct,
        "final_spread": float(traj.spreads[-1]),
        "opinion_band_width": band,
        "final_populations": [int(x) for x in pops[-1]],
        "population_conserved": bool((pops.sum(axis=1) == traj.graph.n).all()),
        "emptied_communities": sorted(
            int(c) for c in np.nonzero((pops == 0).any(axis=0))[0]
        ),
        "empty_neighborhood_events": int(
            traj.diagnostics.get("empty_neighborhoods", 0)
        ),
    }


def _replicate_task(args) -> tuple[dict, Trajectory | None]:
    config_dict, replicate, keep_trajectory = args
    config = config_from_dict(config_dict)
    traj = simulate_replicate(config, replicate)
    summary = replicate_summary(config, traj, replicate)
    return summary, (traj if keep_trajectory else None)


def run_replicates(
    config: SimConfig, workers: int = 1
) -> tuple[list[dict], Trajectory]:
    """Simulate all replicates; returns (summaries, replicate-0 trajectory)."""
    tasks = [
        (config.to_json_dict(), r, r == 0) for r in range(config.replicates)
    ]
    if workers <= 1 or config.replicates == 1:
        results = [_replicate_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_task, tasks))
    summaries = [s for s, _ in results]
    rep0 = results[0][1]
    return summaries, rep0


def write_opinions_csv(path, traj: Trajectory, stride: int = 1) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "agent_id", "private", "expressed"])
        for state in traj.states[::stride]:
            for i in range(state.n):
                writer.writerow(
                    [state.t, i, repr(float(state.private[i])), repr(float(state.expressed[i]))]
                )


def write_populations_csv(path, traj: Trajectory, stride: int = 1) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "community_id", "population"])
        for assignment, pops in zip(
            traj.assignments[::stride], traj.populations[::stride]
        ):
            for c, p in enumerate(pops):
                writer.writerow([assignment.t, c, int(p)])


def write_assignments_csv(path, traj: Trajectory, stride: int = 1) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "agent_id", "community_id"])
        for assignment in traj.assignments[::stride]:
            for i, c in enumerate(assignment.assign):
                writer.writerow([assignment.t, i, int(c)])


def write_rates_csv(path, traj: Trajectory, window: int) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start", "community_id", "ngr", "nmr"])
        for rec in windowed_rates(traj.populations, window):
            writer.writerow(
                [
                    rec.window_start,
                    rec.community_id,
                    repr(rec.ngr),
                    "" if rec.nmr is None else repr(rec.nmr),
                ]
            )


def resolve_out_dir(config: SimConfig, cli_out: str | None = None) -> Path:
    """Precedence: CLI flag, then config, then env var, then ./runs/<name>."""
    if cli_out:
        return Path(cli_out)
    if config.out_dir:
        return Path(config.out_dir)
    if os.environ.get(OUT_DIR_ENV):
        return Path(os.environ[OUT_DIR_ENV]) / (config.scenario or "run")
    return Path("runs") / (config.scenario or "run")


def write_run(config: SimConfig, out_dir, workers: int = 1) -> dict:
    """Execute the run and write the artifact bundle; returns the report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summaries, traj = run_replicates(config, workers=workers)

    (out / "config.json").write_text(config.to_json())
    (out / "graph.json").write_text(traj.graph.to_json() + "\n")
    write_opinions_csv(out / "opinions.csv", traj, config.record_stride)
    write_populations_csv(out / "populations.csv", traj, config.record_stride)
    write_rates_csv(out / "rates.csv", traj, config.rate_window)
    if config.write_assignments:
        write_assignments_csv(out / "assignments.csv", traj, config.record_stride)

    cts = [s["consensus_time"] for s in summaries]
    finite = [c for c in cts if c is not None]
    report = {
        "scenario": config.scenario,
        "seed": config.seed,
        "replicates": config.replicates,
        "consensus_time": summaries[0]["consensus_time"],
        "median_consensus_time": (
            float(np.median(finite)) if len(finite) > config.replicates // 2 else None
        ),
        "conservation_ok": all(s["population_conserved"] for s in summaries),
        "per_replicate": summaries,
    }
    (out / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    return report
