"""Command line surface: gen / run / eval / heatmap / serve.

Exit codes: 0 success, 2 config error, 3 runtime failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import PipelineConfigs
from .envgen import EnvSpec, gen_environment
from .experiment import ConfigError, run_experiment, _resolve_map
from .gridworld import MapError
from .metrics import fraction_observed, heatmap as compute_heatmap, model_likelihood
from .planner import AgentKind
from .report import render_heatmap_png
from .trajectory import Trajectory

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Map induction task: environments, planning experiments, evaluation."""


@main.command()
@click.argument("spec_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True,
              help="Output map path (sidecar written alongside).")
def gen(spec_file: Path, out: Path):
    """Generate a map (+ .meta.json sidecar) from an environment spec."""
    try:
        spec = EnvSpec.from_dict(json.loads(spec_file.read_text()))
        grid = gen_environment(spec)
    except (json.JSONDecodeError, MapError, KeyError, ValueError) as e:
        _fail(EXIT_CONFIG, str(e))
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(grid.to_text())
    out.with_suffix(".meta.json").write_text(
        json.dumps(grid.sidecar(), sort_keys=True, indent=2) + "\n"
    )
    click.echo(f"wrote {out} ({grid.width}x{grid.height}, "
               f"{len(grid.reward_coords)} rewards)")


@main.command()
@click.argument("config_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True)
@click.option("--workers", type=int, default=1, show_default=True)
def run(config_file: Path, out: Path, workers: int):
    """Run the experiment grid described by a config document."""
    try:
        doc = json.loads(config_file.read_text())
    except json.JSONDecodeError as e:
        _fail(EXIT_CONFIG, f"bad config JSON: {e}")
    try:
        summary = run_experiment(doc, out, workers=workers)
    except (ConfigError, MapError, KeyError) as e:
        _fail(EXIT_CONFIG, str(e))
    except Exception as e:  # noqa: BLE001 - surface as runtime failure
        _fail(EXIT_RUNTIME, f"{type(e).__name__}: {e}")
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command("eval")
@click.argument("trajectory_file", type=click.Path(exists=True, path_type=Path))
@click.option("--map", "map_ref", required=True, help="Bundled map id or .map path.")
@click.option("--kind", type=click.Choice(["Uniform", "MAP", "Distributional"]),
              default="Distributional", show_default=True)
@click.option("--config", "config_file", type=click.Path(exists=True, path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
def eval_cmd(trajectory_file: Path, map_ref: str, kind: str, config_file, seed: int):
    """Score a trajectory file with the room-visitation model likelihood."""
    try:
        configs = (
            PipelineConfigs.from_dict(json.loads(config_file.read_text()))
            if config_file
            else PipelineConfigs()
        )
        grid = _resolve_map(map_ref)
    except (json.JSONDecodeError, MapError, KeyError, ValueError) as e:
        _fail(EXIT_CONFIG, str(e))
    try:
        traj = Trajectory.from_json(trajectory_file.read_text())
        score = model_likelihood(traj, grid, AgentKind.from_str(kind), configs, seed)
        frac = fraction_observed(traj, grid, configs.eval.radius)
    except Exception as e:  # noqa: BLE001
        _fail(EXIT_RUNTIME, f"{type(e).__name__}: {e}")
    click.echo(json.dumps(
        {"map_id": grid.map_id, "kind": kind, "seed": seed,
         "model_likelihood": score, "fraction_observed": frac},
        sort_keys=True,
    ))


@main.command("heatmap")
@click.argument("trajectory_files", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("--map", "map_ref", required=True)
@click.option("--out", "-o", type=click.Path(path_type=Path), required=True,
              help="Output JSON path; a .png is written alongside.")
@click.option("--radius", type=int, default=5, show_default=True)
def heatmap_cmd(trajectory_files, map_ref: str, out: Path, radius: int):
    """Aggregate visitation heatmap over trajectory files."""
    try:
        grid = _resolve_map(map_ref)
    except (MapError, KeyError) as e:
        _fail(EXIT_CONFIG, str(e))
    try:
        trajs = [Trajectory.from_json(p.read_text()) for p in trajectory_files]
        hm = compute_heatmap(trajs, grid, radius)
    except Exception as e:  # noqa: BLE001
        _fail(EXIT_RUNTIME, f"{type(e).__name__}: {e}")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(
        {"map_id": grid.map_id, "radius": radius, "counts": hm.to_lists()},
        sort_keys=True, separators=(",", ":"),
    ) + "\n")
    render_heatmap_png(hm.counts, out.with_suffix(".png"))
    click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--maps-dir", type=click.Path(path_type=Path))
@click.option("--store-dir", type=click.Path(path_type=Path),
              help="Directory for persisted play trajectories.")
@click.option("--static-dir", type=click.Path(path_type=Path),
              help="Play-UI assets to serve at /.")
def serve(host: str, port: int, maps_dir, store_dir, static_dir):
    """Serve the play API (and the browser client, when assets are given)."""
    import uvicorn

    from .server import create_app

    app = create_app(maps_dir=maps_dir, store_dir=store_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
