"""Map induction: grammar-based map completion, Bayesian inference over
completions, and belief-space exploration planning on grid worlds."""

from .config import EvalConfig, PipelineConfigs, PlannerConfig
from .envgen import EnvSpec, bundled_map, bundled_map_ids, gen_environment
from .grammar import GrammarConfig, MapHypothesis, compose, enumerate_completions, transform
from .gridworld import (
    Action,
    GridMap,
    MapError,
    Observation,
    ObservedMap,
    Pose,
    apply_action,
    is_terminal,
    load_map_file,
    observe,
    parse_map,
)
from .inference import BeliefCollapse, MatchReport, Posterior, likelihood, match, posterior
from .metrics import fraction_observed, heatmap, model_likelihood, room_sequence
from .planner import (
    Agent,
    AgentKind,
    Belief,
    PolicyTree,
    pomcp_plan,
    replan_step,
    run_episode,
    sample_world,
)
from .regions import Region, RegionConfig, extract_regions
from .trajectory import Trajectory, replay

__version__ = "0.1.0"
