"""HTTP API for live play sessions; the server is authoritative for all
dynamics and line of sight, so human and agent observations are identical in
semantics.  Also serves the static play-UI assets when present.
"""

from __future__ import annotations

import datetime
import itertools
import json
import secrets
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .envgen import bundled_map, bundled_map_ids
from .gridworld import (
    UNKNOWN,
    GridMap,
    ObservedMap,
    Pose,
    apply_action,
    cell_to_char,
    is_terminal,
    load_map_file,
    observe,
)
from .trajectory import Step, Trajectory, action_from_name


class SessionState:
    def __init__(self, session_id: str, grid: GridMap, started_at: str):
        self.session_id = session_id
        self.grid = grid
        self.pose = grid.start
        self.observed = ObservedMap.blank(grid).merge(observe(grid, grid.start))
        self.steps = 0
        self.trajectory = Trajectory(
            map_id=grid.map_id,
            provenance={"kind": "human", "seed": 0, "config_digest": ""},
            started_at=started_at,
            start_pose=grid.start,
            initial_observed=[
                (i % grid.width, i // grid.width, c)
                for i, c in enumerate(self.observed.cells)
                if c != UNKNOWN
            ],
            steps=[],
            done=False,
        )

    @property
    def done(self) -> bool:
        return is_terminal(self.grid, self.observed, self.steps)


class ActionRequest(BaseModel):
    action: str  # TurnLeft | TurnRight | Forward


class SessionRequest(BaseModel):
    map_id: str


def _cells_payload(cells):
    return [[x, y, cell_to_char(c)] for x, y, c in cells]


def create_app(
    maps_dir: Optional[Path] = None,
    store_dir: Optional[Path] = None,
    static_dir: Optional[Path] = None,
    clock=None,
) -> FastAPI:
    app = FastAPI(title="map-induction-task")
    sessions: dict = {}
    counter = itertools.count(1)
    clock = clock or (lambda: datetime.datetime.now(datetime.timezone.utc).isoformat())

    file_maps = {}
    if maps_dir:
        for p in sorted(Path(maps_dir).glob("*.map")):
            file_maps[p.stem] = p

    def get_map(map_id: str) -> GridMap:
        if map_id in file_maps:
            return load_map_file(file_maps[map_id])
        try:
            return bundled_map(map_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown map {map_id!r}")

    @app.get("/api/maps")
    def list_maps():
        ids = sorted(set(bundled_map_ids()) | set(file_maps))
        return {"maps": [{"id": i, "title": i.replace("_", " ")} for i in ids]}

    @app.post("/api/session")
    def start_session(req: SessionRequest):
        grid = get_map(req.map_id)
        session_id = f"s{next(counter)}-{secrets.token_hex(4)}"
        state = SessionState(session_id, grid, clock())
        sessions[session_id] = state
        return {
            "session_id": session_id,
            "map_id": grid.map_id,
            "dims": {"width": grid.width, "height": grid.height},
            "pose": state.pose.to_dict(),
            "observed": _cells_payload(
                (i % grid.width, i // grid.width, c)
                for i, c in enumerate(state.observed.cells)
                if c != UNKNOWN
            ),
            "diamonds_total": len(grid.reward_coords),
            "diamonds_collected": 0,
            "steps_left": grid.timeout_steps,
            "done": state.done,
        }

    def get_session(session_id: str) -> SessionState:
        state = sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return state

    @app.post("/api/session/{session_id}/action")
    def take_action(session_id: str, req: ActionRequest):
        state = get_session(session_id)
        if state.done:
            raise HTTPException(status_code=409, detail="session finished")
        try:
            action = action_from_name(req.action)
        except KeyError:
            raise HTTPException(status_code=422, detail=f"bad action {req.action!r}")
        prev_cells = state.observed.cells
        state.pose, reward, state.observed = apply_action(
            state.grid, state.observed, state.pose, action
        )
        state.steps += 1
        w = state.grid.width
        new = [
            (i % w, i // w, c)
            for i, (c, p) in enumerate(zip(state.observed.cells, prev_cells))
            if p == UNKNOWN and c != UNKNOWN
        ]
        state.trajectory.steps.append(
            Step(state.steps - 1, state.pose, action, reward, new)
        )
        return {
            "pose": state.pose.to_dict(),
            "reward": reward,
            "observed_new": _cells_payload(new),
            "diamonds_collected": len(state.observed.collected),
            "diamonds_total": len(state.grid.reward_coords),
            "steps_left": max(0, state.grid.timeout_steps - state.steps),
            "done": state.done,
        }

    @app.post("/api/session/{session_id}/finish")
    def finish(session_id: str):
        state = get_session(session_id)
        state.trajectory.done = state.done
        blob = state.trajectory.to_json()
        trajectory_id = f"{state.grid.map_id}_human_{session_id}"
        if store_dir:
            store = Path(store_dir)
            store.mkdir(parents=True, exist_ok=True)
            (store / f"{trajectory_id}.json").write_text(blob)
        del sessions[session_id]
        return {"trajectory_id": trajectory_id, "trajectory": json.loads(blob)}

    if static_dir and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
