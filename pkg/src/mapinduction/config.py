"""Bundled configuration for the full pipeline, with a stable digest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .grammar import GrammarConfig
from .regions import RegionConfig


@dataclass
class PlannerConfig:
    discount: float = 0.90
    simulations_per_step: int = 2000
    ucb_c: float = 1.4
    max_tree_depth: int = 30
    rollout_depth: int = 30
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise ValueError("discount must lie in (0, 1)")
        if self.simulations_per_step < 1:
            raise ValueError("need at least one simulation per step")

    def to_dict(self) -> dict:
        return {
            "discount": self.discount,
            "simulations_per_step": self.simulations_per_step,
            "ucb_c": self.ucb_c,
            "max_tree_depth": self.max_tree_depth,
            "rollout_depth": self.rollout_depth,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "PlannerConfig":
        return PlannerConfig(
            discount=float(d.get("discount", 0.90)),
            simulations_per_step=int(d.get("simulations_per_step", 2000)),
            ucb_c=float(d.get("ucb_c", 1.4)),
            max_tree_depth=int(d.get("max_tree_depth", 30)),
            rollout_depth=int(d.get("rollout_depth", 30)),
            seed=int(d.get("seed", 0)),
        )


@dataclass
class EvalConfig:
    radius: int = 5

    def to_dict(self) -> dict:
        return {"radius": self.radius}

    @staticmethod
    def from_dict(d: dict) -> "EvalConfig":
        return EvalConfig(radius=int(d.get("radius", 5)))


@dataclass
class PipelineConfigs:
    regions: RegionConfig = field(default_factory=RegionConfig)
    grammar: GrammarConfig = field(default_factory=GrammarConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def to_dict(self) -> dict:
        return {
            "regions": self.regions.to_dict(),
            "grammar": self.grammar.to_dict(),
            "planner": self.planner.to_dict(),
            "eval": self.eval.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "PipelineConfigs":
        return PipelineConfigs(
            regions=RegionConfig.from_dict(d.get("regions", {})),
            grammar=GrammarConfig.from_dict(d.get("grammar", {})),
            planner=PlannerConfig.from_dict(d.get("planner", {})),
            eval=EvalConfig.from_dict(d.get("eval", {})),
        )

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]
