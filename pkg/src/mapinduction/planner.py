"""Belief-space planning: POMCP over sampled worlds, agent variants, episodes.

Each planning call runs a fixed number of Monte Carlo simulations.  A
simulation samples a complete world at the root (a hypothesis draw with
unknown cells filled in, or an independent uniform fill), descends the
action/observation tree by UCB1, expands one leaf, finishes with a
uniform-random rollout, and backs up discounted returns (one unit per
collected reward).  Everything is deterministic given the seed.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from math import log, sqrt
from typing import Optional

import numpy as np

from . import grammar as grammar_mod
from . import inference as inference_mod
from . import regions as regions_mod
from .config import PipelineConfigs, PlannerConfig
from .gridworld import (
    EMPTY,
    REWARD,
    UNKNOWN,
    WALL,
    Action,
    FACING_VECTORS,
    GridMap,
    ObservedMap,
    Pose,
    apply_action,
    is_terminal,
    observe,
    visible_indices,
)
from .inference import BeliefCollapse, Posterior
from .trajectory import Step, Trajectory

ACTIONS = (Action.TURN_LEFT, Action.TURN_RIGHT, Action.FORWARD)

_LEFT = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT = {"N": "E", "E": "S", "S": "W", "W": "N"}

_FILL_VALUES = np.array([EMPTY, WALL, REWARD], dtype=np.uint8)

DEFAULT_STARTED_AT = "1970-01-01T00:00:00Z"


class AgentKind(Enum):
    UNIFORM = "Uniform"
    MAP = "MAP"
    DISTRIBUTIONAL = "Distributional"

    @staticmethod
    def from_str(s: str) -> "AgentKind":
        for k in AgentKind:
            if k.value.lower() == s.lower():
                return k
        raise ValueError(f"unknown agent kind {s!r}")


@dataclass
class Belief:
    """Planner belief: an induced hypothesis distribution or a per-cell uniform."""

    kind: str  # "induced" | "uniform"
    posterior: Optional[Posterior]
    pose: Pose
    observed: ObservedMap
    _world_cache: dict = field(default_factory=dict, repr=False, compare=False)


def sample_world(belief: Belief, rng: random.Random, np_rng=None) -> GridMap:
    """Materialize one complete world consistent with the belief.

    Observed cells keep their observed values; unknown cells are filled
    independently and uniformly from {wall, empty, reward}.
    """
    if np_rng is None:
        np_rng = np.random.default_rng(rng.getrandbits(63))
    observed = belief.observed
    w, h = observed.width, observed.height
    obs_arr = np.frombuffer(bytes(observed.cells), dtype=np.uint8)
    known = obs_arr != UNKNOWN

    if belief.kind == "induced":
        hyps = belief.posterior.hypotheses
        if len(hyps) == 1:
            pick = 0
        else:
            r = rng.random()
            acc = 0.0
            pick = len(hyps) - 1
            for i, hyp in enumerate(hyps):
                acc += hyp.posterior
                if r < acc:
                    pick = i
                    break
        cached = belief._world_cache.get(pick)
        if cached is not None:
            return cached
        hyp = hyps[pick]
        arr = np.frombuffer(bytes(hyp.cells), dtype=np.uint8).copy()
        unknown = arr == UNKNOWN
        complete = not unknown.any()
        if not complete:
            arr[unknown] = _FILL_VALUES[np_rng.integers(0, 3, int(unknown.sum()))]
        arr[known] = obs_arr[known]
        world = GridMap(
            w, h, tuple(int(v) for v in arr), belief.pose, 10 ** 9, validate=False
        )
        if complete:
            belief._world_cache[pick] = world
        return world

    arr = obs_arr.copy()
    unknown = ~known
    arr[unknown] = _FILL_VALUES[np_rng.integers(0, 3, int(unknown.sum()))]
    return GridMap(w, h, tuple(int(v) for v in arr), belief.pose, 10 ** 9, validate=False)


class VNode:
    """History node: visit count, mean return, pose histogram, action children."""

    __slots__ = ("n", "v", "pose_counts", "children")

    def __init__(self):
        self.n = 0
        self.v = 0.0
        self.pose_counts = Counter()
        self.children = {}  # Action -> QNode


class QNode:
    __slots__ = ("n", "q", "children")

    def __init__(self):
        self.n = 0
        self.q = 0.0
        self.children = {}  # observation key -> VNode


@dataclass
class PolicyTree:
    root: VNode
    simulations: int

    def dump_text(self) -> str:
        lines = []

        def fmt_poses(node):
            items = sorted(node.pose_counts.items())
            return " ".join(f"{x},{y},{f}:{c}" for (x, y, f), c in items)

        def walk(node, indent):
            lines.append(
                f"{'  ' * indent}N={node.n} V={node.v:.4f} poses[{fmt_poses(node)}]"
            )
            for a in ACTIONS:
                q = node.children.get(a)
                if q is None:
                    continue
                lines.append(f"{'  ' * (indent + 1)}{a.name} N={q.n} Q={q.q:.4f}")
                for child in q.children.values():
                    walk(child, indent + 2)

        walk(self.root, 0)
        return "\n".join(lines) + "\n"


def _step_world(world: GridMap, pose: Pose, action: int, collected: set):
    """One deterministic transition in a sampled world; returns (pose', reward)."""
    if action == 0:
        return Pose(pose.x, pose.y, _LEFT[pose.facing]), 0
    if action == 1:
        return Pose(pose.x, pose.y, _RIGHT[pose.facing]), 0
    dx, dy = FACING_VECTORS[pose.facing]
    nx, ny = pose.x + dx, pose.y + dy
    if not (0 <= nx < world.width and 0 <= ny < world.height):
        return pose, 0
    cell = world.cells[ny * world.width + nx]
    if cell == WALL:
        return pose, 0
    if cell == REWARD and (nx, ny) not in collected:
        collected.add((nx, ny))
        return Pose(nx, ny, pose.facing), 1
    return Pose(nx, ny, pose.facing), 0


def _obs_key(world: GridMap, pose: Pose, collected: set):
    """Canonical hashable key of the observation at ``pose`` in ``world``."""
    cache = world._obs_cache
    entry = cache.get(("geo", pose))
    if entry is None:
        idx = visible_indices(world, pose)
        vals = np.frombuffer(bytes(world.cells), dtype=np.uint8)[idx]
        w = world.width
        reward_coords = frozenset(
            (int(i) % w, int(i) // w) for i, v in zip(idx, vals) if v == REWARD
        )
        entry = (idx.tobytes(), vals.tobytes(), reward_coords)
        if len(cache) < 4096:
            cache[("geo", pose)] = entry
    idx_b, vals_b, reward_coords = entry
    consumed = reward_coords & collected if collected else frozenset()
    return (pose, idx_b, vals_b, frozenset(consumed))


def _rollout(world, pose, collected, rng, cfg):
    total = 0.0
    disc = 1.0
    rewards = world.reward_coords
    randrange = rng.randrange
    for _ in range(cfg.rollout_depth):
        if rewards <= collected:
            break
        pose, r = _step_world(world, pose, randrange(3), collected)
        if r:
            total += disc
        disc *= cfg.discount
    return total


def _simulate(node: VNode, world, pose, collected, depth, rng, cfg):
    node.n += 1
    node.pose_counts[pose] += 1
    if depth >= cfg.max_tree_depth or world.reward_coords <= collected:
        return 0.0
    qnode = None
    for a in ACTIONS:
        if a not in node.children:
            qnode = node.children[a] = QNode()
            action = a
            break
    if qnode is None:
        log_n = log(node.n)
        best = None
        for a in ACTIONS:
            q = node.children[a]
            score = q.q + cfg.ucb_c * sqrt(log_n / q.n)
            if best is None or score > best[0]:
                best = (score, a, q)
        _, action, qnode = best
    pose2, r = _step_world(world, pose, int(action), collected)
    terminal = world.reward_coords <= collected or depth + 1 >= cfg.max_tree_depth
    okey = _obs_key(world, pose2, collected)
    child = qnode.children.get(okey)
    if child is None:
        child = qnode.children[okey] = VNode()
        child.n += 1
        child.pose_counts[pose2] += 1
        if terminal:
            ret = float(r)
        else:
            ret = r + cfg.discount * _rollout(world, pose2, collected, rng, cfg)
            child.v = ret - r  # bootstrap value of the fresh leaf
    elif terminal:
        child.n += 1
        child.pose_counts[pose2] += 1
        ret = float(r)
    else:
        ret = r + cfg.discount * _simulate(child, world, pose2, collected, depth + 1, rng, cfg)
    qnode.n += 1
    qnode.q += (ret - qnode.q) / qnode.n
    node.v += (ret - node.v) / node.n
    return ret


def pomcp_plan(belief: Belief, config: PlannerConfig):
    """Plan one action from ``belief``; returns (action, policy tree)."""
    rng = random.Random(config.seed)
    np_rng = np.random.default_rng(rng.getrandbits(63))
    root = VNode()
    for _ in range(config.simulations_per_step):
        world = sample_world(belief, rng, np_rng)
        collected = set(belief.observed.collected)
        _simulate(root, world, belief.pose, collected, 0, rng, config)
    best = None
    for a in ACTIONS:
        q = root.children.get(a)
        visits = q.n if q is not None else -1
        if best is None or visits > best[0]:
            best = (visits, a)
    return best[1], PolicyTree(root, config.simulations_per_step)


class Agent:
    """Replanning loop state for one episode: belief construction + POMCP.

    Induction (region extraction, grammar enumeration, posterior) reruns only
    when the known-cell set has grown; Uniform agents never run it.
    """

    def __init__(self, kind: AgentKind, configs: PipelineConfigs, seed: int):
        self.kind = kind
        self.configs = configs
        self.seed = seed
        self.rng = random.Random(seed)
        self._known = -1
        self._posterior: Optional[Posterior] = None

    def _induce(self, observed: ObservedMap) -> Optional[Posterior]:
        try:
            regs = regions_mod.extract_regions(observed, self.configs.regions)
            if not regs:
                return None
            hyps = grammar_mod.enumerate_completions(
                regs, (observed.width, observed.height), self.configs.grammar
            )
            if not hyps:
                return None
            return inference_mod.posterior(hyps, observed)
        except (ValueError, BeliefCollapse):
            return None

    def build_belief(self, observed: ObservedMap, pose: Pose) -> Belief:
        if self.kind == AgentKind.UNIFORM:
            return Belief("uniform", None, pose, observed)
        known = observed.known_count()
        if known > self._known:
            self._known = known
            self._posterior = self._induce(observed)
        post = self._posterior
        if post is None:
            return Belief("uniform", None, pose, observed)
        if self.kind == AgentKind.MAP:
            best = replace(post.map_hypothesis, posterior=1.0)
            post = Posterior([best], 0)
        return Belief("induced", post, pose, observed)

    def replan(self, observed: ObservedMap, pose: Pose):
        belief = self.build_belief(observed, pose)
        cfg = replace(self.configs.planner, seed=self.rng.getrandbits(63))
        action, tree = pomcp_plan(belief, cfg)
        return action, belief, tree


def replan_step(kind: AgentKind, observed: ObservedMap, pose: Pose,
                configs: PipelineConfigs, seed: int):
    """Single-shot replanning without loop state (fresh induction)."""
    return Agent(kind, configs, seed).replan(observed, pose)


def run_episode(
    grid: GridMap,
    kind: AgentKind,
    configs: PipelineConfigs,
    seed: int,
    started_at: str = DEFAULT_STARTED_AT,
) -> Trajectory:
    """Run one full seeded episode; fully deterministic given its arguments."""
    agent = Agent(kind, configs, seed)
    pose = grid.start
    observed = ObservedMap.blank(grid).merge(observe(grid, pose))
    initial = [
        (i % grid.width, i // grid.width, c)
        for i, c in enumerate(observed.cells)
        if c != UNKNOWN
    ]
    traj = Trajectory(
        map_id=grid.map_id,
        provenance={"kind": kind.value, "seed": seed, "config_digest": configs.digest()},
        started_at=started_at,
        start_pose=pose,
        initial_observed=initial,
        steps=[],
    )
    step_i = 0
    while not is_terminal(grid, observed, step_i):
        action, _, _ = agent.replan(observed, pose)
        prev_cells = observed.cells
        pose, reward, observed = apply_action(grid, observed, pose, action)
        new = [
            (i % grid.width, i // grid.width, c)
            for i, (c, p) in enumerate(zip(observed.cells, prev_cells))
            if p == UNKNOWN and c != UNKNOWN
        ]
        traj.steps.append(Step(step_i, pose, action, reward, new))
        step_i += 1
    return traj
