"""Batch orchestration: run maps x agent kinds x seeds, persist everything.

Outputs under the configured directory:
  trajectories/<map>_<kind>_<seed>.json
  heatmaps/<map>_<kind>.json / .png
  figures/*.png
  metrics.csv, summary.json

Episodes are independent; with ``workers`` > 1 they are distributed over a
process pool.  All artifacts are byte-deterministic functions of the config.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import PipelineConfigs
from .envgen import bundled_map
from .gridworld import GridMap, load_map_file
from .metrics import fraction_observed, heatmap
from .planner import AgentKind, run_episode
from .report import render_fraction_figure, render_heatmap_png, render_steps_figure
from .trajectory import Trajectory


class ConfigError(ValueError):
    """Malformed experiment configuration."""


def _resolve_map(ref: str) -> GridMap:
    p = Path(ref)
    if p.suffix == ".map" or p.exists():
        return load_map_file(p)
    return bundled_map(ref)


def _episode_task(args):
    ref, kind_name, seed, configs_dict, started_at = args
    grid = _resolve_map(ref)
    configs = PipelineConfigs.from_dict(configs_dict)
    traj = run_episode(
        grid, AgentKind.from_str(kind_name), configs, seed, started_at=started_at
    )
    return ref, kind_name, seed, traj.to_json()


def load_experiment_config(doc: dict):
    try:
        configs = PipelineConfigs.from_dict(doc.get("configs", doc))
        exp = doc["experiment"]
        maps = list(exp["maps"])
        kinds = [AgentKind.from_str(k) for k in exp["kinds"]]
        seeds = [int(s) for s in exp["seeds"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad experiment config: {e}") from e
    if not maps or not kinds or not seeds:
        raise ConfigError("maps, kinds and seeds must be non-empty")
    return configs, maps, kinds, seeds


def _stats(values, rng_seed=0):
    values = sorted(values)
    med = float(np.median(values))
    rng = np.random.default_rng(rng_seed)
    n = len(values)
    boots = [
        float(np.median(rng.choice(values, size=n, replace=True))) for _ in range(1000)
    ]
    return {
        "median": med,
        "ci95": [float(np.percentile(boots, 2.5)), float(np.percentile(boots, 97.5))],
        "n": n,
    }


def run_experiment(doc: dict, outdir, workers: int = 1) -> dict:
    """Run the full grid of episodes and write all report files."""
    configs, maps, kinds, seeds = load_experiment_config(doc)
    outdir = Path(outdir)
    (outdir / "trajectories").mkdir(parents=True, exist_ok=True)
    (outdir / "heatmaps").mkdir(exist_ok=True)
    (outdir / "figures").mkdir(exist_ok=True)

    digest = configs.digest()
    started_at = f"1970-01-01T00:00:00Z#{digest}"  # deterministic by design
    radius = configs.eval.radius

    # validate all maps up front: any malformed map aborts before running
    grids = {ref: _resolve_map(ref) for ref in maps}

    tasks = [
        (ref, kind.value, seed, configs.to_dict(), started_at)
        for ref in maps
        for kind in kinds
        for seed in seeds
    ]
    results = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for ref, kind_name, seed, blob in pool.map(_episode_task, tasks):
                results[(ref, kind_name, seed)] = blob
    else:
        for task in tasks:
            ref, kind_name, seed, blob = _episode_task(task)
            results[(ref, kind_name, seed)] = blob

    rows = []
    summary = {}
    for ref in maps:
        grid = grids[ref]
        for kind in kinds:
            trajs = []
            for seed in seeds:
                blob = results[(ref, kind.value, seed)]
                name = f"{grid.map_id}_{kind.value}_{seed}.json"
                (outdir / "trajectories" / name).write_text(blob)
                traj = Trajectory.from_json(blob)
                trajs.append(traj)
                rows.append(
                    {
                        "map_id": grid.map_id,
                        "kind": kind.value,
                        "seed": seed,
                        "steps": len(traj.steps),
                        "reward": traj.total_reward,
                        "fraction_observed": round(
                            fraction_observed(traj, grid, radius), 6
                        ),
                    }
                )
            hm = heatmap(trajs, grid, radius)
            stem = f"{grid.map_id}_{kind.value}"
            (outdir / "heatmaps" / f"{stem}.json").write_text(
                json.dumps(
                    {"map_id": grid.map_id, "kind": kind.value, "radius": radius,
                     "counts": hm.to_lists()},
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )
            render_heatmap_png(hm.counts, outdir / "heatmaps" / f"{stem}.png")
            summary[(grid.map_id, kind.value)] = {
                "fraction_observed": _stats(
                    [r["fraction_observed"] for r in rows
                     if r["map_id"] == grid.map_id and r["kind"] == kind.value]
                ),
                "steps": _stats(
                    [r["steps"] for r in rows
                     if r["map_id"] == grid.map_id and r["kind"] == kind.value]
                ),
            }

    with (outdir / "metrics.csv").open("w", newline="") as f:
        writer = csv.DictWriter(
            f,
            fieldnames=["map_id", "kind", "seed", "steps", "reward", "fraction_observed"],
        )
        writer.writeheader()
        writer.writerows(rows)

    summary_doc = {
        "config_digest": digest,
        "conditions": {
            f"{m}/{k}": v for (m, k), v in sorted(summary.items())
        },
    }
    (outdir / "summary.json").write_text(
        json.dumps(summary_doc, sort_keys=True, indent=2) + "\n"
    )
    render_fraction_figure(summary, outdir / "figures" / "fraction_observed.png")
    render_steps_figure(summary, outdir / "figures" / "steps.png")
    return summary_doc
