"""Batch experiment orchestration.

An experiment sweeps (strategy, fix-duration, repetition) triples.
Repetition r always uses seed ``seed_base + r``, so every strategy and
every fix duration faces the same family of generated problems. Results
come back ordered by (strategy in config order, fix duration ascending,
seed ascending) regardless of how many worker processes ran them.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .metrics import ObjectiveSummary, summarize
from .scenario import generate_nonuniform, generate_uniform
from .simulation import PRESETS, StrategyConfig, run, strategy_from_name

UNIFORM = "uniform"
NONUNIFORM = "nonuniform"


class ConfigError(ValueError):
    """Invalid experiment configuration; carries an optional line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class ExperimentConfig:
    area_width: float
    area_height: float
    n_nodes: int
    n_mules: int
    f_count: int
    horizon: float
    fix_durations: tuple[float, ...]
    strategies: tuple[str, ...]
    distribution: str = UNIFORM
    vicinity_radius: float = 20.0
    boost_factor: float = 2.0
    seed_base: int = 0
    repetitions: int = 50
    mule_speed: float = 1.0

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.distribution not in (UNIFORM, NONUNIFORM):
            raise ConfigError(f"unknown distribution {self.distribution!r}")
        if not self.fix_durations:
            raise ConfigError("need at least one fix duration")
        if not self.strategies:
            raise ConfigError("need at least one strategy")
        if self.n_mules < 1:
            raise ConfigError("need at least one mule")
        for text in self.strategies:
            parse_strategy(text, self.mule_speed)


@dataclass(frozen=True)
class RunRecord:
    strategy: str
    f_d: float
    seed: int
    summary: ObjectiveSummary
    unserved: int


def parse_strategy(text: str, mule_speed: float = 1.0) -> StrategyConfig:
    """Resolve a preset name or an explicit trait tuple.

    Tuples read ``init[+refinement]:cooperation:allocation:redeployment``
    with ``-`` as the allocation under static ownership, for example
    ``ff+centroid_adjust:cooperative:closest_available:centroid_adjust``.
    """
    text = text.strip()
    if text in PRESETS:
        return strategy_from_name(text, mule_speed)
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(
            f"strategy {text!r} is neither a preset "
            f"({', '.join(sorted(PRESETS))}) nor an "
            "init[+refine]:cooperation:allocation:redeployment tuple"
        )
    init, cooperation, allocation, redeployment = (p.strip() for p in parts)
    refinement = None
    if "+" in init:
        init, refinement = (p.strip() for p in init.split("+", 1))
    cfg = StrategyConfig(
        initial_deployment=init,
        cooperation=cooperation,
        redeployment=redeployment,
        allocation=None if allocation in ("-", "") else allocation,
        initial_refinement=refinement,
        mule_speed=mule_speed,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(f"strategy {text!r}: {exc}") from None
    return cfg


def make_scenario(config: ExperimentConfig, f_d: float, seed: int):
    """The scenario a given (fix duration, seed) pair maps to."""
    if config.distribution == UNIFORM:
        return generate_uniform(
            config.area_width,
            config.area_height,
            config.n_nodes,
            config.f_count,
            f_d,
            config.horizon,
            seed,
        )
    return generate_nonuniform(
        config.area_width,
        config.area_height,
        config.n_nodes,
        config.f_count,
        f_d,
        config.horizon,
        seed,
        vicinity_radius=config.vicinity_radius,
        boost_factor=config.boost_factor,
    )


def _run_task(args):
    config, strategy_text, f_d, seed = args
    scenario = make_scenario(config, f_d, seed)
    strategy = parse_strategy(strategy_text, config.mule_speed)
    result = run(scenario, strategy, config.n_mules)
    return RunRecord(strategy_text, f_d, seed, summarize(result), result.unserved_count)


def run_batch(config: ExperimentConfig, jobs: int = 1) -> list[RunRecord]:
    """Execute the full sweep; deterministic order independent of jobs."""
    config.validate()
    tasks = [
        (config, strategy, f_d, config.seed_base + r)
        for strategy in config.strategies
        for f_d in sorted(set(config.fix_durations))
        for r in range(config.repetitions)
    ]
    if jobs <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=8))
