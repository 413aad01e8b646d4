"""Event-driven execution of one scenario under one strategy.

The engine processes failure starts, mule arrivals and fix completions
from a single priority queue; mule motion is linear at ``mule_speed``
and interpolated exactly, so there is no timestep resolution to tune.
Simultaneous events order as fix-completion, then failure-start, then
arrival, then lowest mule/failure index. Travel legs are materialized
lazily: a mule's odometer is charged when a leg ends, is interrupted, or
is truncated by the end of the run, including aborted redeployments.

The run ends when every failure has been fixed (the triggering
completion performs no further redeployment) or when the horizon is
exhausted; failures no mule reached by then are flagged and charged
``horizon - start_time`` of downtime.
"""

import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from . import facility
from .assignment import min_cost_assignment
from .backends import kernels as K
from .geometry import distance
from .scenario import Scenario

IDLE = "idle"
TO_FAILURE = "traveling_to_failure"
FIXING = "fixing"
REDEPLOYING = "redeploying"

_AVAILABLE = (IDLE, REDEPLOYING)

GRID = "grid"
FF = "ff"
RGREEDY = "rgreedy"

STATIC_VORONOI = "static_voronoi"
COOPERATIVE = "cooperative"

CLOSEST = "closest"
CLOSEST_AVAILABLE = "closest_available"
CLOSEST_LEAST_TRAVELED = "closest_least_traveled"

NONE_STAY = "none_stay"
NONE_RETURN = "none_return"
CENTROID_ADJUST = "centroid_adjust"
LOCAL_SEARCH = "local_search"

_PRIO_FIX_DONE = 0
_PRIO_FAILURE = 1
_PRIO_ARRIVAL = 2

_GLOBAL_REDEPLOY = (FF, RGREEDY, CENTROID_ADJUST, LOCAL_SEARCH)


@dataclass(frozen=True)
class StrategyConfig:
    """One cell of the trait matrix.

    ``initial_refinement`` optionally post-processes the initial
    deployment (centroid adjustment or local search). Static-ownership
    cooperation fixes the node-to-mule map at the initial deployment and
    takes no allocation policy; cooperative strategies require one.
    """

    initial_deployment: str
    cooperation: str
    redeployment: str
    allocation: str | None = None
    initial_refinement: str | None = None
    mule_speed: float = 1.0

    def validate(self) -> None:
        if self.initial_deployment not in (GRID, FF, RGREEDY):
            raise ValueError(f"unknown initial deployment {self.initial_deployment!r}")
        if self.initial_refinement not in (None, CENTROID_ADJUST, LOCAL_SEARCH):
            raise ValueError(f"unknown initial refinement {self.initial_refinement!r}")
        if self.cooperation not in (STATIC_VORONOI, COOPERATIVE):
            raise ValueError(f"unknown cooperation mode {self.cooperation!r}")
        if self.redeployment not in (NONE_STAY, NONE_RETURN) + _GLOBAL_REDEPLOY:
            raise ValueError(f"unknown redeployment {self.redeployment!r}")
        if self.cooperation == STATIC_VORONOI:
            if self.allocation is not None:
                raise ValueError(
                    "static ownership admits no allocation policy; leave it unset"
                )
        elif self.allocation not in (
            CLOSEST,
            CLOSEST_AVAILABLE,
            CLOSEST_LEAST_TRAVELED,
        ):
            raise ValueError(f"unknown allocation {self.allocation!r}")
        if not self.mule_speed > 0:
            raise ValueError("mule speed must be positive")


PRESETS: dict[str, StrategyConfig] = {
    "basic_grid": StrategyConfig(GRID, COOPERATIVE, NONE_STAY, CLOSEST_AVAILABLE),
    "no_cooperation": StrategyConfig(GRID, STATIC_VORONOI, NONE_STAY),
    "k_center": StrategyConfig(FF, COOPERATIVE, FF, CLOSEST_AVAILABLE),
    "k_median": StrategyConfig(RGREEDY, COOPERATIVE, RGREEDY, CLOSEST_AVAILABLE),
    "k_centroid": StrategyConfig(
        FF, COOPERATIVE, CENTROID_ADJUST, CLOSEST_AVAILABLE, CENTROID_ADJUST
    ),
    "local_search": StrategyConfig(
        FF, COOPERATIVE, LOCAL_SEARCH, CLOSEST_AVAILABLE, LOCAL_SEARCH
    ),
}


def strategy_from_name(name: str, mule_speed: float = 1.0) -> StrategyConfig:
    """Look up a preset by name, applying the requested speed."""
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown strategy preset {name!r}") from None
    return replace(base, mule_speed=mule_speed)


class MuleState:
    """One mule: position, status, odometer, task, queue, and the
    kinematic fields of the leg currently being traveled."""

    __slots__ = (
        "index",
        "x",
        "y",
        "status",
        "total_traveled",
        "current_task",
        "queue",
        "init_x",
        "init_y",
        "moving",
        "origin_x",
        "origin_y",
        "dest_x",
        "dest_y",
        "depart_time",
        "leg_length",
        "epoch",
    )

    def __init__(self, index: int, x: float, y: float):
        self.index = index
        self.x = x
        self.y = y
        self.status = IDLE
        self.total_traveled = 0.0
        self.current_task = None
        self.queue = deque()
        self.init_x = x
        self.init_y = y
        self.moving = False
        self.origin_x = self.origin_y = 0.0
        self.dest_x = self.dest_y = 0.0
        self.depart_time = 0.0
        self.leg_length = 0.0
        self.epoch = 0

    @property
    def position(self):
        return (self.x, self.y)

    def position_at(self, t: float, speed: float):
        """Linear interpolation along the current leg; (x, y) at rest."""
        if not self.moving or self.leg_length == 0.0:
            return (self.x, self.y)
        covered = (t - self.depart_time) * speed
        if covered <= 0.0:
            return (self.origin_x, self.origin_y)
        if covered >= self.leg_length:
            return (self.dest_x, self.dest_y)
        frac = covered / self.leg_length
        return (
            self.origin_x + (self.dest_x - self.origin_x) * frac,
            self.origin_y + (self.dest_y - self.origin_y) * frac,
        )


@dataclass
class RunResult:
    """Raw outcome of one run: per-failure downtimes (aligned with the
    scenario's failure list), per-mule travel totals, per-failure served
    flags, and, when requested, the full event log."""

    downtimes: list[float]
    travel_totals: list[float]
    served: list[bool]
    event_log: list[tuple] | None = field(default=None)

    @property
    def unserved_count(self) -> int:
        return sum(1 for s in self.served if not s)


def allocate_failure(node_pos, mule_infos, allocation, owner_index=None):
    """Pick the mule for a fresh failure.

    ``mule_infos`` is a sequence of (x, y, status, total_traveled) at the
    failure's start time. Returns ("dispatch", i) when mule i should set
    out now, ("enqueue", i) when the failure joins mule i's own queue,
    or ("pending", None) when it joins the global pending queue. Ties go
    to the lowest mule index.
    """
    nx, ny = node_pos
    if allocation is None:
        x, y, status, _ = mule_infos[owner_index]
        if status in _AVAILABLE:
            return ("dispatch", owner_index)
        return ("enqueue", owner_index)

    if allocation == CLOSEST:
        best = None
        best_d2 = math.inf
        for i, (x, y, status, _) in enumerate(mule_infos):
            d2 = (x - nx) ** 2 + (y - ny) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = i
        if mule_infos[best][2] in _AVAILABLE:
            return ("dispatch", best)
        return ("enqueue", best)

    if allocation == CLOSEST_AVAILABLE:
        best = None
        best_d2 = math.inf
        for i, (x, y, status, _) in enumerate(mule_infos):
            if status not in _AVAILABLE:
                continue
            d2 = (x - nx) ** 2 + (y - ny) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = i
        return ("dispatch", best) if best is not None else ("pending", None)

    if allocation == CLOSEST_LEAST_TRAVELED:
        best = None
        best_score = math.inf
        for i, (x, y, status, traveled) in enumerate(mule_infos):
            if status not in _AVAILABLE:
                continue
            score = traveled + math.sqrt((x - nx) ** 2 + (y - ny) ** 2)
            if score < best_score:
                best_score = score
                best = i
        return ("dispatch", best) if best is not None else ("pending", None)

    raise ValueError(f"unknown allocation {allocation!r}")


def initial_deployment(scenario: Scenario, strategy: StrategyConfig, mule_count: int):
    """Starting mule positions for a strategy, as a list of (x, y)."""
    nodes = [tuple(p) for p in scenario.nodes]
    kind = strategy.initial_deployment
    if kind == GRID:
        pos = facility.grid_placement(
            mule_count, scenario.area_width, scenario.area_height
        )
    elif kind == FF:
        pos = facility.farthest_first(nodes, mule_count)
    else:
        pos = facility.reverse_greedy(nodes, mule_count)
    if strategy.initial_refinement == CENTROID_ADJUST:
        pos = facility.centroid_adjust(pos, nodes)
    elif strategy.initial_refinement == LOCAL_SEARCH:
        pos = facility.local_search(pos, nodes, max_iterations=max(len(nodes), 1))
    return [(float(x), float(y)) for x, y in pos]


def run(
    scenario: Scenario,
    strategy: StrategyConfig,
    mule_count: int,
    record_log: bool = False,
) -> RunResult:
    """Execute one scenario under one strategy; fully deterministic."""
    strategy.validate()
    if mule_count < 1:
        raise ValueError("need at least one mule")
    if strategy.initial_deployment in (FF, RGREEDY) and mule_count > scenario.n_nodes:
        raise ValueError(
            "ff/rgreedy initial deployment needs mule_count <= node count"
        )
    return _Simulation(scenario, strategy, mule_count, record_log).execute()


class _Simulation:
    def __init__(self, scenario, strategy, mule_count, record_log):
        self.scenario = scenario
        self.strategy = strategy
        self.speed = strategy.mule_speed
        self.nodes = np.array(scenario.nodes, dtype=np.float64)
        self.failures = scenario.failures
        self.mules = [
            MuleState(i, x, y)
            for i, (x, y) in enumerate(
                initial_deployment(scenario, strategy, mule_count)
            )
        ]
        if strategy.cooperation == STATIC_VORONOI and self.nodes.shape[0]:
            init_xy = np.array([[mu.x, mu.y] for mu in self.mules])
            self.owner = K.nearest_center_indices(self.nodes, init_xy)
        else:
            self.owner = None
        self.pending = deque()
        self.downtimes = [0.0] * len(self.failures)
        self.served = [False] * len(self.failures)
        self.completed = 0
        self.now = 0.0
        self.heap = []
        self.seq = 0
        self.log = [] if record_log else None
        for fid, f in enumerate(self.failures):
            self._push(f.start_time, _PRIO_FAILURE, fid, "failure", 0)

    # -- event queue ----------------------------------------------------

    def _push(self, t, prio, idx, kind, epoch):
        heapq.heappush(self.heap, (t, prio, idx, self.seq, kind, epoch))
        self.seq += 1

    def _emit(self, kind, mule_id, failure_id, x, y):
        if self.log is not None:
            self.log.append((self.now, kind, mule_id, failure_id, float(x), float(y)))

    # -- main loop ------------------------------------------------------

    def execute(self) -> RunResult:
        horizon = self.scenario.horizon
        total = len(self.failures)
        while True:
            if total and self.completed == total:
                end_time = self.now
                break
            if not self.heap:
                end_time = self.now if self.completed == total else horizon
                break
            t, prio, idx, _, kind, epoch = heapq.heappop(self.heap)
            if t > horizon:
                end_time = horizon
                break
            if kind == "arrive" and epoch != self.mules[idx].epoch:
                continue
            self.now = t
            if kind == "fix_done":
                self._on_fix_done(idx)
            elif kind == "failure":
                self._on_failure(idx)
            else:
                self._on_arrive(idx)

        self.now = end_time
        for mu in self.mules:
            if mu.moving:
                self._interrupt(mu)
                self._emit("halt", mu.index, -1, mu.x, mu.y)
        for fid, f in enumerate(self.failures):
            if not self.served[fid]:
                self.downtimes[fid] = horizon - f.start_time
        return RunResult(
            downtimes=list(self.downtimes),
            travel_totals=[mu.total_traveled for mu in self.mules],
            served=list(self.served),
            event_log=self.log,
        )

    # -- handlers -------------------------------------------------------

    def _on_failure(self, fid):
        f = self.failures[fid]
        nx, ny = self.nodes[f.node_index]
        self._emit("failure", -1, fid, nx, ny)
        infos = []
        for mu in self.mules:
            x, y = mu.position_at(self.now, self.speed)
            infos.append((x, y, mu.status, mu.total_traveled))
        owner = int(self.owner[f.node_index]) if self.owner is not None else None
        action, midx = allocate_failure(
            (nx, ny), infos, self.strategy.allocation, owner
        )
        if action == "dispatch":
            self._dispatch(midx, fid)
        elif action == "enqueue":
            self.mules[midx].queue.append(fid)
        else:
            self.pending.append(fid)

    def _dispatch(self, midx, fid):
        mu = self.mules[midx]
        f = self.failures[fid]
        nx, ny = self.nodes[f.node_index]
        self._start_leg(mu, float(nx), float(ny), TO_FAILURE)
        mu.current_task = fid
        self._emit("dispatch", midx, fid, mu.x, mu.y)
        self._redeploy_available()

    def _on_arrive(self, midx):
        mu = self.mules[midx]
        mu.total_traveled += mu.leg_length
        mu.x, mu.y = mu.dest_x, mu.dest_y
        mu.moving = False
        mu.epoch += 1
        if mu.status == TO_FAILURE:
            fid = mu.current_task
            f = self.failures[fid]
            self.downtimes[fid] = self.now - f.start_time
            self.served[fid] = True
            mu.status = FIXING
            self._emit("arrive", midx, fid, mu.x, mu.y)
            self._push(self.now + f.fix_duration, _PRIO_FIX_DONE, midx, "fix_done", 0)
        else:
            mu.status = IDLE
            self._emit("redeploy_arrive", midx, -1, mu.x, mu.y)

    def _on_fix_done(self, midx):
        mu = self.mules[midx]
        fid = mu.current_task
        self.completed += 1
        mu.current_task = None
        mu.status = IDLE
        self._emit("fix_done", midx, fid, mu.x, mu.y)
        if self.completed == len(self.failures):
            return  # run is over; skip the final redeployment
        queue = self._service_queue(mu)
        if queue:
            self._dispatch(midx, queue.popleft())
            return
        red = self.strategy.redeployment
        if red == NONE_RETURN:
            if (mu.x, mu.y) != (mu.init_x, mu.init_y):
                self._start_leg(mu, mu.init_x, mu.init_y, REDEPLOYING)
                self._emit("redeploy", midx, -1, mu.origin_x, mu.origin_y)
        elif red in _GLOBAL_REDEPLOY:
            self._redeploy_available()

    def _service_queue(self, mu):
        """The queue a freed mule serves: its own under static ownership
        or closest allocation, the global pending queue otherwise."""
        if self.strategy.allocation in (None, CLOSEST):
            return mu.queue
        return self.pending

    # -- redeployment ---------------------------------------------------

    def _redeploy_available(self):
        red = self.strategy.redeployment
        if red not in _GLOBAL_REDEPLOY:
            return
        avail = [mu for mu in self.mules if mu.status in _AVAILABLE]
        if not avail:
            return
        busy_nodes = {
            self.failures[mu.current_task].node_index
            for mu in self.mules
            if mu.status in (TO_FAILURE, FIXING)
        }
        keep = [v for v in range(self.nodes.shape[0]) if v not in busy_nodes]
        if not keep:
            return
        axy = np.ascontiguousarray(self.nodes[keep])
        cur = np.array(
            [mu.position_at(self.now, self.speed) for mu in avail], dtype=np.float64
        )
        if red in (FF, RGREEDY):
            k = min(len(avail), axy.shape[0])
            if red == FF:
                tidx = K.farthest_first_indices(axy, k)
            else:
                tidx = K.reverse_greedy_indices(axy, k)
            targets = axy[tidx]
            costs = np.empty((len(avail), k), dtype=np.float64)
            for i in range(len(avail)):
                for j in range(k):
                    costs[i, j] = distance(cur[i], targets[j])
            for ai, tj in min_cost_assignment(costs):
                self._move_or_stay(
                    avail[ai], float(targets[tj, 0]), float(targets[tj, 1])
                )
        else:
            if red == CENTROID_ADJUST:
                new = K.centroid_adjust_positions(
                    cur, axy, facility.DEFAULT_CENTROID_ROUNDS, facility.CENTROID_TOL
                )
            else:
                new = K.local_search_positions(
                    cur, axy, axy.shape[0], facility.DEFAULT_STEP
                )
            for i, mu in enumerate(avail):
                self._move_or_stay(mu, float(new[i, 0]), float(new[i, 1]))

    def _move_or_stay(self, mu, tx, ty):
        if mu.moving:
            if (mu.dest_x, mu.dest_y) == (tx, ty):
                return  # already headed there; keep the leg
            cx, cy = mu.position_at(self.now, self.speed)
            if (cx, cy) == (tx, ty):
                self._interrupt(mu)
                mu.status = IDLE
                self._emit("halt", mu.index, -1, mu.x, mu.y)
                return
        elif (mu.x, mu.y) == (tx, ty):
            return  # a resting mule is only ever idle here
        self._start_leg(mu, tx, ty, REDEPLOYING)
        self._emit("redeploy", mu.index, -1, mu.origin_x, mu.origin_y)

    # -- motion ---------------------------------------------------------

    def _interrupt(self, mu):
        """Stop a moving mule where it stands, charging the partial leg."""
        covered = (self.now - mu.depart_time) * self.speed
        if covered < 0.0:
            covered = 0.0
        elif covered > mu.leg_length:
            covered = mu.leg_length
        mu.x, mu.y = mu.position_at(self.now, self.speed)
        mu.total_traveled += covered
        mu.moving = False
        mu.epoch += 1

    def _start_leg(self, mu, tx, ty, purpose):
        if mu.moving:
            self._interrupt(mu)
        mu.origin_x, mu.origin_y = mu.x, mu.y
        mu.dest_x, mu.dest_y = tx, ty
        mu.depart_time = self.now
        mu.leg_length = distance((mu.x, mu.y), (tx, ty))
        mu.moving = True
        mu.status = purpose
        self._push(
            self.now + mu.leg_length / self.speed,
            _PRIO_ARRIVAL,
            mu.index,
            "arrive",
            mu.epoch,
        )
