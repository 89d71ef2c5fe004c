"""Almost-sure solving of concurrent two-player games and synthesis of
permissive strategy templates, with extraction, composition, online
adaptation and turn-based conversion."""

from .adaptation import (
    AdaptiveRun,
    Infeasible,
    OpponentModel,
    RewardSpec,
    adapt_step,
    run_adaptive,
    update_model,
)
from .algebra import (
    GameMismatch,
    HeatmapRow,
    IncrementalStep,
    UnsupportedObjective,
    buchi_conjunction,
    compose,
    counter_product,
    heatmap_csv,
    incremental_synthesize,
    run_heatmap,
)
from .convert import (
    ConversionStats,
    NonRectangularActions,
    NotAlternating,
    TurnBasedGame,
    convert,
    load_turn_based,
    tb_from_dict,
)
from .corpus import random_game, random_objective, random_subset
from .model import (
    ActionDistribution,
    CongameError,
    DuplicateTransition,
    EmptyActionSet,
    GameGraph,
    InputError,
    MissingTransition,
    NonConvergence,
    Objective,
    ObjectiveKind,
    PlayPrefix,
    UnknownAction,
    UnknownState,
    dump_json,
    game_to_dict,
    load_game,
    one_round_prob,
    parse_objective,
    validate_game,
)
from .operators import a_set, afpre1, afpre_action_fixpoint, apre1, b_set, pre1
from .solvers import RankDecomposition, solve, solve_buchi, solve_cobuchi, solve_safety
from .strategies import (
    ComplianceVerdict,
    ConflictError,
    Constant,
    EpisodeLog,
    FixedSchedule,
    Geometric,
    GreedyAdversary,
    NonConstantSchedule,
    ScheduleStrategy,
    UniformRandom,
    check_compliance,
    extract_strategy,
    simulate,
    strategy_from_dict,
    validate_strategy,
    verify_memoryless,
)
from .templates import (
    Conflict,
    ConflictReport,
    Template,
    buchi_template,
    canonical_groups,
    check_conflict_free,
    cobuchi_template,
    min_prob,
    safety_template,
    template_for,
    template_from_dict,
    validate_template,
)

__all__ = [name for name in dir() if not name.startswith("_")]
