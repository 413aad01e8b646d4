"""Seeded generation and serialization of experiment scenarios.

A scenario bundles the node field, the failure schedule and the horizon.
Randomness comes exclusively from splitmix64 — four lines of 64-bit
integer arithmetic that reproduce bit-for-bit in any language — so a
(parameters, seed) pair pins a scenario exactly.

Draw order is part of the contract:

- uniform: per node x then y; then per failure, node index then start
  time, redrawing the whole pair while it collides (see below); finally
  a stable sort by start time.
- non-uniform: nodes as above; then all start times, sorted; then one
  weighted node choice per failure in start order over the currently
  eligible (non-colliding) nodes, with the vicinity boost applied after
  each choice.

A draw collides when its node already has a failure whose repair cannot
be ruled finished by the new start time. "Ruled finished" uses the
conservative bound start + fix_duration + arena diagonal (unit mule
speed): stacked failures on one node are never generated.
"""

import math
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_MAX_REDRAWS = 1_000_000


class SplitMix64:
    """splitmix64 generator; reference outputs for seed 0 start
    0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1): top 53 bits scaled by 2^-53."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_index(self, n: int) -> int:
        """Uniform integer in [0, n): floor(next_float() * n)."""
        v = int(self.next_float() * n)
        return v if v < n else n - 1


@dataclass(frozen=True)
class Failure:
    """One failure: the node it hits, when it starts, and how long the
    on-site fix takes once a mule has arrived."""

    node_index: int
    start_time: float
    fix_duration: float


@dataclass(frozen=True)
class Scenario:
    """Immutable experiment input. ``nodes`` is a read-only (n, 2) array;
    ``failures`` is sorted ascending by start time."""

    area_width: float
    area_height: float
    nodes: np.ndarray
    failures: tuple[Failure, ...]
    horizon: float
    seed: int

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.nodes, dtype=np.float64))
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("nodes must be an (n, 2) array")
        if self.area_width <= 0 or self.area_height <= 0:
            raise ValueError("area dimensions must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if arr.size and (
            arr[:, 0].min() < 0
            or arr[:, 0].max() > self.area_width
            or arr[:, 1].min() < 0
            or arr[:, 1].max() > self.area_height
        ):
            raise ValueError("node coordinates must lie within the area")
        n = arr.shape[0]
        prev = 0.0
        for f in self.failures:
            if not 0 <= f.node_index < n:
                raise ValueError("failure node index out of range")
            if not 0.0 <= f.start_time <= self.horizon:
                raise ValueError("failure start time outside [0, horizon]")
            if f.fix_duration < 0:
                raise ValueError("fix duration must be non-negative")
            if f.start_time < prev:
                raise ValueError("failures must be sorted by start time")
            prev = f.start_time
        arr.setflags(write=False)
        object.__setattr__(self, "nodes", arr)
        object.__setattr__(self, "failures", tuple(self.failures))

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def to_text(self) -> str:
        """Line format: header ``X Y n f E_t seed``, then node lines
        ``x y``, then failure lines ``node_index start_time fix_duration``.
        Floats print with repr, which round-trips the binary value."""
        lines = [
            f"{self.area_width!r} {self.area_height!r} {self.n_nodes} "
            f"{len(self.failures)} {self.horizon!r} {self.seed}"
        ]
        for x, y in self.nodes:
            lines.append(f"{float(x)!r} {float(y)!r}")
        for f in self.failures:
            lines.append(f"{f.node_index} {f.start_time!r} {f.fix_duration!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Scenario":
        lines = [ln for ln in text.splitlines()]
        if not lines:
            raise ValueError("line 1: empty scenario")
        head = lines[0].split()
        if len(head) != 6:
            raise ValueError("line 1: header must be 'X Y n f E_t seed'")
        try:
            width, height, et = float(head[0]), float(head[1]), float(head[4])
            n, f, seed = int(head[2]), int(head[3]), int(head[5])
        except ValueError as exc:
            raise ValueError(f"line 1: {exc}") from None
        if len(lines) < 1 + n + f:
            raise ValueError(f"line {len(lines)}: expected {1 + n + f} lines")
        nodes = np.empty((n, 2), dtype=np.float64)
        for i in range(n):
            parts = lines[1 + i].split()
            if len(parts) != 2:
                raise ValueError(f"line {2 + i}: node line must be 'x y'")
            try:
                nodes[i, 0], nodes[i, 1] = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ValueError(f"line {2 + i}: {exc}") from None
        failures = []
        for i in range(f):
            lineno = 1 + n + i
            parts = lines[lineno].split()
            if len(parts) != 3:
                raise ValueError(
                    f"line {lineno + 1}: failure line must be "
                    "'node_index start_time fix_duration'"
                )
            try:
                failures.append(
                    Failure(int(parts[0]), float(parts[1]), float(parts[2]))
                )
            except ValueError as exc:
                raise ValueError(f"line {lineno + 1}: {exc}") from None
        return cls(width, height, nodes, tuple(failures), et, seed)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(scenario.to_text())


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="ascii") as fh:
        return Scenario.from_text(fh.read())


def _check_params(area_width, area_height, n_nodes, f_count, fix_duration, horizon):
    if area_width <= 0 or area_height <= 0:
        raise ValueError("area dimensions must be positive")
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if f_count < 0:
        raise ValueError("failure count must be non-negative")
    if fix_duration < 0:
        raise ValueError("fix duration must be non-negative")
    if horizon <= 0:
        raise ValueError("horizon must be positive")


def _draw_nodes(rng, n_nodes, area_width, area_height):
    nodes = np.empty((n_nodes, 2), dtype=np.float64)
    for i in range(n_nodes):
        nodes[i, 0] = rng.next_float() * area_width
        nodes[i, 1] = rng.next_float() * area_height
    return nodes


def _conflicts(node, start, accepted, window_pad):
    """True when an accepted failure on the same node could still be
    under repair at ``start`` (or vice versa), using the conservative
    fix_duration + diagonal window."""
    for v, t, dur in accepted:
        if v != node:
            continue
        early_t, early_d, late_t = (t, dur, start) if t <= start else (start, dur, t)
        if late_t < early_t + early_d + window_pad:
            return True
    return False


def generate_uniform(
    area_width: float,
    area_height: float,
    n_nodes: int,
    f_count: int,
    fix_duration: float,
    horizon: float,
    seed: int,
) -> Scenario:
    """Scenario with nodes and failures drawn uniformly.

    Node positions are uniform over the rectangle; each failure picks a
    uniform node and a uniform start in [0, horizon), with colliding
    (node, time) pairs redrawn whole. Failures end up sorted by start.
    """
    _check_params(area_width, area_height, n_nodes, f_count, fix_duration, horizon)
    rng = SplitMix64(seed)
    nodes = _draw_nodes(rng, n_nodes, area_width, area_height)
    diag = math.sqrt(area_width * area_width + area_height * area_height)
    accepted = []
    redraws = 0
    for _ in range(f_count):
        while True:
            v = rng.next_index(n_nodes)
            t = rng.next_float() * horizon
            if not _conflicts(v, t, accepted, diag):
                break
            redraws += 1
            if redraws > _MAX_REDRAWS:
                raise ValueError(
                    "cannot place failures without overlap; lower f_count "
                    "or fix_duration"
                )
        accepted.append((v, t, fix_duration))
    accepted.sort(key=lambda rec: rec[1])
    failures = tuple(Failure(v, t, d) for v, t, d in accepted)
    return Scenario(area_width, area_height, nodes, failures, horizon, seed)


def weighted_index(weights: np.ndarray, rng: SplitMix64) -> int:
    """First index whose cumulative weight exceeds next_float() * total.

    With equal weights this reduces exactly to ``rng.next_index(n)``.
    """
    cum = np.cumsum(weights)
    u = rng.next_float() * cum[-1]
    idx = int(np.searchsorted(cum, u, side="right"))
    return min(idx, len(weights) - 1)


def generate_nonuniform(
    area_width: float,
    area_height: float,
    n_nodes: int,
    f_count: int,
    fix_duration: float,
    horizon: float,
    seed: int,
    vicinity_radius: float = 20.0,
    boost_factor: float = 2.0,
) -> Scenario:
    """Scenario whose failures cluster around earlier failures.

    Start times are drawn first and sorted; nodes are then chosen in
    start order with probability proportional to per-node weights
    (initially all 1), restricted to nodes whose earlier failures are
    already ruled finished (the weights compound without bound, so
    rejection sampling could stall once a cluster saturates). After each
    choice, every node within ``vicinity_radius`` of the failed node —
    including itself — has its weight multiplied by ``boost_factor``.
    ``boost_factor=1`` reproduces the uniform node-choice law.
    """
    _check_params(area_width, area_height, n_nodes, f_count, fix_duration, horizon)
    if vicinity_radius < 0:
        raise ValueError("vicinity radius must be non-negative")
    if boost_factor < 1:
        raise ValueError("boost factor must be at least 1")
    rng = SplitMix64(seed)
    nodes = _draw_nodes(rng, n_nodes, area_width, area_height)
    starts = sorted(rng.next_float() * horizon for _ in range(f_count))
    diag = math.sqrt(area_width * area_width + area_height * area_height)
    r2 = vicinity_radius * vicinity_radius
    weights = np.ones(n_nodes, dtype=np.float64)
    accepted = []
    for t in starts:
        eligible = weights.copy()
        for v, tv, dur in accepted:
            early_t, early_d, late_t = (tv, dur, t) if tv <= t else (t, dur, tv)
            if late_t < early_t + early_d + diag:
                eligible[v] = 0.0
        if not eligible.any():
            raise ValueError(
                "cannot place failures without overlap; lower f_count "
                "or fix_duration"
            )
        v = weighted_index(eligible, rng)
        accepted.append((v, t, fix_duration))
        dx = nodes[:, 0] - nodes[v, 0]
        dy = nodes[:, 1] - nodes[v, 1]
        weights[dx * dx + dy * dy <= r2] *= boost_factor
    failures = tuple(Failure(v, t, d) for v, t, d in accepted)
    return Scenario(area_width, area_height, nodes, failures, horizon, seed)
