"""Deterministic grid environment: maps, agent dynamics and line-of-sight.

Cells are plain integer codes (fast to pack into tuples / numpy arrays):
``EMPTY``, ``WALL``, ``REWARD``, ``UNKNOWN`` and cue cells ``CUE_BASE + color_id``
for ``color_id`` in 0..25.  The text alphabet is ``.``, ``#``, ``D``, ``?`` and
``a``-``z``; ``S`` marks the start cell in map files (empty underneath).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

EMPTY = 0
WALL = 1
REWARD = 2
UNKNOWN = 3
CUE_BASE = 4
N_CUE_COLORS = 26

FACINGS = "NESW"
FACING_VECTORS = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}


def cue_cell(color_id: int) -> int:
    if not 0 <= color_id < N_CUE_COLORS:
        raise ValueError(f"cue color_id out of range: {color_id}")
    return CUE_BASE + color_id


def is_cue(cell: int) -> bool:
    return CUE_BASE <= cell < CUE_BASE + N_CUE_COLORS


def cell_to_char(cell: int) -> str:
    if cell == EMPTY:
        return "."
    if cell == WALL:
        return "#"
    if cell == REWARD:
        return "D"
    if cell == UNKNOWN:
        return "?"
    if is_cue(cell):
        return chr(ord("a") + cell - CUE_BASE)
    raise ValueError(f"unknown cell code {cell}")


def char_to_cell(ch: str) -> int:
    if ch == ".":
        return EMPTY
    if ch == "#":
        return WALL
    if ch == "D":
        return REWARD
    if ch == "?":
        return UNKNOWN
    if "a" <= ch <= "z":
        return CUE_BASE + ord(ch) - ord("a")
    raise ValueError(f"unknown map character {ch!r}")


class Action(IntEnum):
    """The three agent actions, in canonical tie-breaking order."""

    TURN_LEFT = 0
    TURN_RIGHT = 1
    FORWARD = 2


class Pose(NamedTuple):
    x: int
    y: int
    facing: str

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "facing": self.facing}

    @staticmethod
    def from_dict(d: dict) -> "Pose":
        return Pose(int(d["x"]), int(d["y"]), str(d["facing"]))


class MapError(ValueError):
    """Raised for malformed or invalid map files."""


class GridMap:
    """Immutable ground-truth environment.

    ``cells`` is a row-major tuple of cell codes; ``rooms`` (optional) is a
    row-major tuple of room ids with -1 on walls.
    """

    __slots__ = (
        "width",
        "height",
        "cells",
        "start",
        "timeout_steps",
        "rooms",
        "cue_legend",
        "map_id",
        "reward_coords",
        "_walls",
        "_obs_cache",
    )

    def __init__(
        self,
        width: int,
        height: int,
        cells: Sequence[int],
        start: Pose,
        timeout_steps: int,
        rooms: Optional[Sequence[int]] = None,
        cue_legend: Optional[dict] = None,
        map_id: str = "",
        validate: bool = True,
    ):
        cells = tuple(cells)
        if len(cells) != width * height:
            raise MapError("cell count does not match dimensions")
        self.width = width
        self.height = height
        self.cells = cells
        self.start = start
        self.timeout_steps = int(timeout_steps)
        self.rooms = tuple(rooms) if rooms is not None else None
        self.cue_legend = dict(cue_legend) if cue_legend else None
        self.map_id = map_id
        self.reward_coords = frozenset(
            (i % width, i // width) for i, c in enumerate(cells) if c == REWARD
        )
        self._walls = None
        self._obs_cache = {}
        if validate:
            self._validate()

    def _validate(self) -> None:
        w, h = self.width, self.height
        sx, sy = self.start.x, self.start.y
        if not (0 <= sx < w and 0 <= sy < h):
            raise MapError("start out of bounds")
        if self.start.facing not in FACINGS:
            raise MapError(f"bad facing {self.start.facing!r}")
        if self.cells[sy * w + sx] == WALL:
            raise MapError("start cell is a wall")
        if self.timeout_steps < 0:
            raise MapError("negative timeout")
        if any(c == UNKNOWN for c in self.cells):
            raise MapError("ground-truth map contains unknown cells")
        # 4-connectivity reachability from start: every non-wall cell must be
        # reachable, otherwise some episode content is uncollectable.
        seen = {(sx, sy)}
        queue = deque([(sx, sy)])
        while queue:
            x, y = queue.popleft()
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h and (nx, ny) not in seen:
                    if self.cells[ny * w + nx] != WALL:
                        seen.add((nx, ny))
                        queue.append((nx, ny))
        for i, c in enumerate(self.cells):
            if c != WALL and (i % w, i // w) not in seen:
                raise MapError(f"cell {(i % w, i // w)} unreachable from start")
        if self.rooms is not None:
            if len(self.rooms) != w * h:
                raise MapError("room layer shape mismatch")
            for i, c in enumerate(self.cells):
                if c != WALL and self.rooms[i] < 0:
                    raise MapError(f"non-wall cell {(i % w, i // w)} has no room id")

    @property
    def walls(self) -> np.ndarray:
        """Flat boolean wall mask (row-major)."""
        if self._walls is None:
            self._walls = np.frombuffer(
                bytes(self.cells), dtype=np.uint8
            ) == WALL
        return self._walls

    def cell_at(self, x: int, y: int) -> int:
        return self.cells[y * self.width + x]

    def non_wall_count(self) -> int:
        return sum(1 for c in self.cells if c != WALL)

    def to_text(self) -> str:
        rows = []
        for y in range(self.height):
            row = []
            for x in range(self.width):
                c = self.cells[y * self.width + x]
                if (x, y) == (self.start.x, self.start.y) and c == EMPTY:
                    row.append("S")
                else:
                    row.append(cell_to_char(c))
            rows.append("".join(row))
        return "\n".join(rows) + "\n"

    def sidecar(self) -> dict:
        doc = {
            "timeout_steps": self.timeout_steps,
            "start": self.start.to_dict(),
        }
        if self.rooms is not None:
            doc["rooms"] = [
                [self.rooms[y * self.width + x] for x in range(self.width)]
                for y in range(self.height)
            ]
        if self.cue_legend:
            doc["cue_legend"] = {str(k): v for k, v in self.cue_legend.items()}
        return doc

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridMap)
            and self.width == other.width
            and self.height == other.height
            and self.cells == other.cells
            and self.start == other.start
            and self.timeout_steps == other.timeout_steps
            and self.rooms == other.rooms
        )

    def __hash__(self) -> int:
        return hash((self.width, self.height, self.cells, self.start))


def parse_map(text: str, sidecar: Optional[dict] = None, map_id: str = "") -> GridMap:
    """Parse a map-file text (plus optional ``.meta.json`` document)."""
    lines = [ln for ln in text.splitlines() if ln != ""]
    if not lines:
        raise MapError("empty map text")
    width = len(lines[0])
    if any(len(ln) != width for ln in lines):
        raise MapError("ragged rows in map text")
    height = len(lines)
    cells = []
    start_xy = None
    for y, ln in enumerate(lines):
        for x, ch in enumerate(ln):
            if ch == "S":
                if start_xy is not None:
                    raise MapError("multiple start cells")
                start_xy = (x, y)
                cells.append(EMPTY)
            else:
                cells.append(char_to_cell(ch))
    sidecar = sidecar or {}
    facing = "E"
    if "start" in sidecar:
        s = sidecar["start"]
        start_xy = (int(s["x"]), int(s["y"]))
        facing = str(s.get("facing", "E"))
    if start_xy is None:
        raise MapError("no start cell ('S' or sidecar start)")
    non_wall = sum(1 for c in cells if c != WALL)
    timeout = int(sidecar.get("timeout_steps", 4 * non_wall))
    rooms = None
    if "rooms" in sidecar:
        grid = sidecar["rooms"]
        if len(grid) != height or any(len(r) != width for r in grid):
            raise MapError("room layer shape mismatch")
        rooms = [int(v) for row in grid for v in row]
    cue_legend = None
    if "cue_legend" in sidecar:
        cue_legend = {int(k): str(v) for k, v in sidecar["cue_legend"].items()}
    return GridMap(
        width,
        height,
        cells,
        Pose(start_xy[0], start_xy[1], facing),
        timeout,
        rooms=rooms,
        cue_legend=cue_legend,
        map_id=map_id,
    )


def load_map_file(path) -> GridMap:
    """Load ``path`` plus its ``.meta.json`` sidecar when present."""
    from pathlib import Path

    path = Path(path)
    text = path.read_text()
    meta = path.with_suffix(".meta.json")
    sidecar = json.loads(meta.read_text()) if meta.exists() else None
    return parse_map(text, sidecar, map_id=path.stem)


class Observation(NamedTuple):
    """Canonical (row-major sorted) visible-cell set after an action."""

    visible: tuple  # tuple of (x, y, cell)
    pose_after: Pose


class ObservedMap:
    """Accumulated observation history: known cells plus collected rewards.

    ``cells`` stores the true value of every cell ever seen (collected rewards
    stay recorded as ``REWARD``; the ``collected`` set marks consumption).
    """

    __slots__ = ("width", "height", "cells", "collected")

    def __init__(self, width: int, height: int, cells=None, collected=frozenset()):
        self.width = width
        self.height = height
        self.cells = tuple(cells) if cells is not None else (UNKNOWN,) * (width * height)
        self.collected = frozenset(collected)

    @staticmethod
    def blank(grid: GridMap) -> "ObservedMap":
        return ObservedMap(grid.width, grid.height)

    def known_count(self) -> int:
        return sum(1 for c in self.cells if c != UNKNOWN)

    def cell_at(self, x: int, y: int) -> int:
        return self.cells[y * self.width + x]

    def merge(self, obs: Observation) -> "ObservedMap":
        cells = list(self.cells)
        for x, y, c in obs.visible:
            i = y * self.width + x
            if (x, y) in self.collected and cells[i] == REWARD:
                continue  # keep the knowledge that a reward was here
            cells[i] = c
        return ObservedMap(self.width, self.height, cells, self.collected)

    def with_collected(self, coord) -> "ObservedMap":
        cells = list(self.cells)
        cells[coord[1] * self.width + coord[0]] = REWARD
        return ObservedMap(
            self.width, self.height, cells, self.collected | {coord}
        )

    def to_text(self) -> str:
        rows = []
        for y in range(self.height):
            rows.append(
                "".join(
                    cell_to_char(self.cells[y * self.width + x])
                    for x in range(self.width)
                )
            )
        return "\n".join(rows) + "\n"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ObservedMap)
            and self.cells == other.cells
            and self.collected == other.collected
            and self.width == other.width
        )

    def __hash__(self) -> int:
        return hash((self.cells, self.collected))


# ---------------------------------------------------------------------------
# Line of sight
#
# A cell is visible when it lies inside the (inclusive) 45-degree half-angle
# wedge around the facing direction and the straight segment from the agent's
# cell center to the target's cell center meets no wall strictly before the
# target.  The traversal visits every cell the segment passes through; an
# exact corner crossing includes both off-diagonal neighbours at the same
# entry parameter.  Geometry depends only on (dims, pose) and is precomputed.
# ---------------------------------------------------------------------------

_GEOMETRY_CACHE: dict = {}


def _segment_cells(ax: int, ay: int, tx: int, ty: int):
    """Cells crossed by the center-to-center segment, with exact entry params.

    Returns a list of ((num, den), (x, y)) with num/den the entry parameter in
    [0, 1]; den > 0.  The starting cell has parameter 0.
    """
    dx, dy = tx - ax, ty - ay
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    adx, ady = abs(dx), abs(dy)
    out = [((0, 1), (ax, ay))]
    cx, cy = ax, ay
    i = j = 1  # next vertical / horizontal boundary index
    while i <= adx or j <= ady:
        # vertical crossing param: (2i-1)/(2*adx); horizontal: (2j-1)/(2*ady)
        if j > ady:
            cmp = -1
        elif i > adx:
            cmp = 1
        else:
            cmp = (2 * i - 1) * ady - (2 * j - 1) * adx
        if cmp < 0:
            t = (2 * i - 1, 2 * adx)
            cx += sx
            i += 1
            out.append((t, (cx, cy)))
        elif cmp > 0:
            t = (2 * j - 1, 2 * ady)
            cy += sy
            j += 1
            out.append((t, (cx, cy)))
        else:
            # exact corner: both off-diagonal neighbours enter here too
            t = (2 * i - 1, 2 * adx)
            out.append((t, (cx + sx, cy)))
            out.append((t, (cx, cy + sy)))
            cx += sx
            cy += sy
            i += 1
            j += 1
            out.append((t, (cx, cy)))
    return out


def _pose_geometry(width: int, height: int, pose: Pose):
    """Precomputed LOS geometry for one pose on a (width x height) lattice.

    Returns (targets, prefix_flat, seg_bounds): ``targets`` are flat cell
    indices inside the wedge (always including the agent's own cell);
    ``prefix_flat[seg_bounds[k]:seg_bounds[k+1]]`` are the flat indices of
    cells entered strictly before target ``k`` on its segment.
    """
    key = (width, height, pose.x, pose.y, pose.facing)
    geo = _GEOMETRY_CACHE.get(key)
    if geo is not None:
        return geo
    ax, ay = pose.x, pose.y
    fx, fy = FACING_VECTORS[pose.facing]
    targets = []
    prefix_flat = []
    bounds = [0]
    for ty in range(height):
        for tx in range(width):
            vx, vy = tx - ax, ty - ay
            if vx == 0 and vy == 0:
                targets.append(ty * width + tx)
                bounds.append(len(prefix_flat))
                continue
            dot = fx * vx + fy * vy
            if dot <= 0 or 2 * dot * dot < vx * vx + vy * vy:
                continue
            cells = _segment_cells(ax, ay, tx, ty)
            # entry parameter of the target itself
            t_tgt = next(t for t, c in cells if c == (tx, ty))
            seen = set()
            for (n, d), (x, y) in cells:
                if (x, y) == (tx, ty) or (x, y) in seen:
                    continue
                if n * t_tgt[1] < t_tgt[0] * d:  # strictly before target
                    seen.add((x, y))
                    prefix_flat.append(y * width + x)
            targets.append(ty * width + tx)
            bounds.append(len(prefix_flat))
    geo = (
        np.array(targets, dtype=np.int64),
        np.array(prefix_flat, dtype=np.int64),
        np.array(bounds, dtype=np.int64),
    )
    _GEOMETRY_CACHE[key] = geo
    return geo


def visible_indices(grid: GridMap, pose: Pose) -> np.ndarray:
    """Flat indices of cells visible from ``pose``, row-major sorted."""
    targets, prefix_flat, bounds = _pose_geometry(grid.width, grid.height, pose)
    if len(prefix_flat) == 0:
        return targets
    walls = grid.walls
    hit = walls[prefix_flat].astype(np.int64)
    csum = np.concatenate(([0], np.cumsum(hit)))
    blocked = csum[bounds[1:]] - csum[bounds[:-1]] > 0
    return targets[~blocked]


def observe(grid: GridMap, pose: Pose, collected: Iterable = ()) -> Observation:
    """Line-of-sight observation from ``pose``.

    Rewards whose coordinates are in ``collected`` are reported as empty.
    """
    collected = frozenset(collected)
    cache_key = (pose, collected)
    cached = grid._obs_cache.get(cache_key)
    if cached is not None:
        return cached
    idx = visible_indices(grid, pose)
    w = grid.width
    visible = []
    for i in idx.tolist():
        x, y = i % w, i // w
        c = grid.cells[i]
        if c == REWARD and (x, y) in collected:
            c = EMPTY
        visible.append((x, y, c))
    obs = Observation(tuple(visible), pose)
    if len(grid._obs_cache) < 4096:
        grid._obs_cache[cache_key] = obs
    return obs


_LEFT = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT = {"N": "E", "E": "S", "S": "W", "W": "N"}


def move_pose(grid: GridMap, pose: Pose, action: Action) -> Pose:
    """Pose after ``action``; forward into a wall or out of bounds is a no-op."""
    if action == Action.TURN_LEFT:
        return Pose(pose.x, pose.y, _LEFT[pose.facing])
    if action == Action.TURN_RIGHT:
        return Pose(pose.x, pose.y, _RIGHT[pose.facing])
    dx, dy = FACING_VECTORS[pose.facing]
    nx, ny = pose.x + dx, pose.y + dy
    if not (0 <= nx < grid.width and 0 <= ny < grid.height):
        return pose
    if grid.cells[ny * grid.width + nx] == WALL:
        return pose
    return Pose(nx, ny, pose.facing)


def apply_action(grid: GridMap, observed: ObservedMap, pose: Pose, action: Action):
    """Apply one action; returns (pose', reward, observed')."""
    new_pose = move_pose(grid, pose, action)
    coord = (new_pose.x, new_pose.y)
    reward = 0
    if (
        grid.cells[new_pose.y * grid.width + new_pose.x] == REWARD
        and coord not in observed.collected
    ):
        reward = 1
        observed = observed.with_collected(coord)
    obs = observe(grid, new_pose, observed.collected)
    return new_pose, reward, observed.merge(obs)


def is_terminal(grid: GridMap, observed: ObservedMap, steps: int) -> bool:
    """Episode over: all rewards collected, or the step timeout reached."""
    if steps >= grid.timeout_steps:
        return True
    return observed.collected >= grid.reward_coords
