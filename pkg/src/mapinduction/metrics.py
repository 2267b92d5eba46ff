"""Behavioral metrics: coverage, visitation heatmaps and the room-visitation
model-likelihood comparison between a planner variant and a recorded trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .config import PipelineConfigs
from .gridworld import GridMap, Pose
from .planner import Agent, AgentKind, pomcp_plan
from .trajectory import Trajectory, replay


def disc_offsets(radius: int) -> list:
    """Integer offsets within a Euclidean cell-center distance of ``radius``."""
    out = []
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                out.append((dx, dy))
    return out


def _covered(poses: Sequence[Pose], grid: GridMap, radius: int) -> set:
    offsets = disc_offsets(radius)
    out = set()
    for p in poses:
        for dx, dy in offsets:
            x, y = p.x + dx, p.y + dy
            if 0 <= x < grid.width and 0 <= y < grid.height:
                out.add((x, y))
    return out


def fraction_observed(trajectory: Trajectory, grid: GridMap, radius: int = 5) -> float:
    """Share of map cells within ``radius`` of any visited cell (start included)."""
    covered = _covered(trajectory.poses(), grid, radius)
    return len(covered) / (grid.width * grid.height)


@dataclass
class Heatmap:
    counts: np.ndarray  # (height, width) visit counts
    radius: int

    def to_lists(self) -> list:
        return self.counts.astype(int).tolist()


def heatmap(trajectories: Sequence[Trajectory], grid: GridMap, radius: int = 5) -> Heatmap:
    """Per-cell count of step-discs over all trajectories (one disc per step)."""
    counts = np.zeros((grid.height, grid.width), dtype=np.int64)
    offsets = disc_offsets(radius)
    for traj in trajectories:
        for step in traj.steps:
            for dx, dy in offsets:
                x, y = step.pose.x + dx, step.pose.y + dy
                if 0 <= x < grid.width and 0 <= y < grid.height:
                    counts[y, x] += 1
    return Heatmap(counts, radius)


@dataclass
class RoomSequence:
    rooms: List[int]  # consecutive duplicates collapsed
    entry_steps: List[int]  # pose index (0 = start pose) of each first entry


def _room_of(grid: GridMap, pose: Pose) -> int:
    return grid.rooms[pose.y * grid.width + pose.x]


def room_sequence(trajectory: Trajectory, grid: GridMap) -> RoomSequence:
    """Ordered rooms entered along the trajectory."""
    if grid.rooms is None:
        raise ValueError("map has no room layer")
    rooms: List[int] = []
    entries: List[int] = []
    for i, pose in enumerate(trajectory.poses()):
        r = _room_of(grid, pose)
        if not rooms or rooms[-1] != r:
            rooms.append(r)
            entries.append(i)
    return RoomSequence(rooms, entries)


def _node_room_mass(tree_root, grid: GridMap, new_rooms: set) -> dict:
    """Visit-count mass per new room, nodes assigned by modal pose."""
    mass: dict = {}

    def walk(node):
        if node.pose_counts:
            # modal pose, ties to lower room id
            best = None
            for pose, c in node.pose_counts.items():
                room = _room_of(grid, pose)
                k = (-c, room)
                if best is None or k < best[0]:
                    best = (k, room)
            room = best[1]
            if room in new_rooms:
                mass[room] = mass.get(room, 0) + node.n
        for q in node.children.values():
            for child in q.children.values():
                walk(child)

    walk(tree_root)
    return mass


def model_likelihood(
    trajectory: Trajectory,
    grid: GridMap,
    kind: AgentKind,
    configs: PipelineConfigs,
    seed: int,
) -> float:
    """Mean probability the model's policy tree assigns to the trajectory's
    next room at each room-transition point."""
    if grid.rooms is None:
        raise ValueError("map has no room layer")
    seq = room_sequence(trajectory, grid)
    if len(seq.rooms) < 2:
        raise ValueError("trajectory enters fewer than two rooms")
    contributions = []
    for k in range(1, len(seq.rooms)):
        entry = seq.entry_steps[k]  # pose index of first entry into rooms[k]
        prefix_steps = entry - 1  # actions taken while still in rooms[k-1]
        pose, observed, _ = replay(grid, trajectory, upto=prefix_steps)
        visited_before = set(seq.rooms[:k])
        agent = Agent(kind, configs, seed + k)
        belief = agent.build_belief(observed, pose)
        from dataclasses import replace as _replace

        cfg = _replace(configs.planner, seed=seed + k)
        _, tree = pomcp_plan(belief, cfg)
        new_rooms = set(r for r in grid.rooms if r >= 0) - visited_before
        mass = _node_room_mass(tree.root, grid, new_rooms)
        total = sum(mass.values())
        actual = seq.rooms[k]
        if total == 0 or actual not in mass:
            contributions.append(0.0)
        else:
            contributions.append(mass[actual] / total)
    return sum(contributions) / len(contributions)
