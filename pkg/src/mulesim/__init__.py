"""mulesim: mobile repair mules coordinated by facility-location strategies.

A deterministic discrete-event simulator plus the placement, allocation
and assignment algorithms it dispatches: grid and farthest-first
deployment, reverse-greedy k-median, centroid adjustment, anytime local
search, Hungarian matching, seeded scenario generation and batch
statistics.
"""

from .assignment import min_cost_assignment
from .backends import backend_name
from .facility import (
    centroid_adjust,
    farthest_first,
    grid_placement,
    kcenter_objective,
    kmedian_objective,
    local_search,
    reverse_greedy,
)
from .geometry import Point, centroid, distance, nearest_center_index, partition_by_nearest
from .metrics import (
    BatchStats,
    ObjectiveSummary,
    TTestResult,
    aggregate,
    summarize,
    welch_t_test,
)
from .scenario import (
    Failure,
    Scenario,
    SplitMix64,
    generate_nonuniform,
    generate_uniform,
    load_scenario,
    save_scenario,
)
from .simulation import (
    PRESETS,
    MuleState,
    RunResult,
    StrategyConfig,
    allocate_failure,
    initial_deployment,
    run,
    strategy_from_name,
)
from .experiments import ExperimentConfig, RunRecord, parse_strategy, run_batch

__version__ = "0.1.0"

__all__ = [
    "Point",
    "distance",
    "centroid",
    "nearest_center_index",
    "partition_by_nearest",
    "grid_placement",
    "farthest_first",
    "reverse_greedy",
    "centroid_adjust",
    "local_search",
    "kmedian_objective",
    "kcenter_objective",
    "min_cost_assignment",
    "SplitMix64",
    "Failure",
    "Scenario",
    "generate_uniform",
    "generate_nonuniform",
    "save_scenario",
    "load_scenario",
    "StrategyConfig",
    "PRESETS",
    "strategy_from_name",
    "MuleState",
    "RunResult",
    "run",
    "allocate_failure",
    "initial_deployment",
    "ObjectiveSummary",
    "BatchStats",
    "TTestResult",
    "summarize",
    "aggregate",
    "welch_t_test",
    "ExperimentConfig",
    "RunRecord",
    "parse_strategy",
    "run_batch",
    "backend_name",
    "__version__",
]
