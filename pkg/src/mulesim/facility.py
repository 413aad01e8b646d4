"""Facility-location placement algorithms for mule deployment.

Grid placement, farthest-first traversal (2-approximate k-center),
reverse greedy (k-median), iterative centroid adjustment, and a bounded
anytime local search. All functions are deterministic: ties resolve to
the lowest index and the farthest-first start is pinned to site 0.
"""

import math
from typing import Sequence

from .backends import kernels as K
from .geometry import Point, as_xy_array

DEFAULT_CENTROID_ROUNDS = 100
CENTROID_TOL = 1e-9
DEFAULT_STEP = 1.0


def grid_placement(k: int, area_width: float, area_height: float) -> list[Point]:
    """First k cell centers of a ceil(sqrt(k)) x ceil(k/rows) grid, row-major."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if area_width <= 0 or area_height <= 0:
        raise ValueError("area dimensions must be positive")
    rows = math.isqrt(k)
    if rows * rows < k:
        rows += 1
    cols = -(-k // rows)
    out = []
    for i in range(rows):
        for j in range(cols):
            if len(out) == k:
                return out
            out.append(
                Point((j + 0.5) * area_width / cols, (i + 0.5) * area_height / rows)
            )
    return out


def _placement_args(sites: Sequence, k: int):
    arr = as_xy_array(sites)
    n = arr.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of sites n={n}")
    return arr, n


def farthest_first(sites: Sequence, k: int) -> list[Point]:
    """k sites chosen by farthest-first traversal, in selection order.

    Starts from sites[0]; each pick maximizes the distance to the set
    already chosen. 2-approximates the k-center optimum.
    """
    arr, _ = _placement_args(sites, k)
    idx = K.farthest_first_indices(arr, k)
    return [Point(float(arr[i, 0]), float(arr[i, 1])) for i in idx]


def reverse_greedy(sites: Sequence, k: int) -> list[Point]:
    """k facilities kept by reverse greedy, in ascending site order.

    Facilities start on every site; each step removes the one whose
    removal adds the least to the summed nearest-facility distance.
    """
    arr, _ = _placement_args(sites, k)
    idx = K.reverse_greedy_indices(arr, k)
    return [Point(float(arr[i, 0]), float(arr[i, 1])) for i in idx]


def centroid_adjust(
    mules: Sequence,
    nodes: Sequence,
    max_rounds: int = DEFAULT_CENTROID_ROUNDS,
    tol: float = CENTROID_TOL,
) -> list[Point]:
    """Repeatedly move each mule to the centroid of its nearest-node cell.

    Mules owning no nodes stay put. Stops when no mule moves more than
    ``tol`` in a round, or after ``max_rounds`` rounds.
    """
    marr = as_xy_array(mules)
    if marr.shape[0] == 0:
        raise ValueError("mules must be nonempty")
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    pos = K.centroid_adjust_positions(marr, as_xy_array(nodes), max_rounds, tol)
    return [Point(float(x), float(y)) for x, y in pos]


def local_search(
    mules: Sequence,
    nodes: Sequence,
    max_iterations: int,
    step: float = DEFAULT_STEP,
) -> list[Point]:
    """Bounded anytime local search toward the k-median objective.

    Sweeps mules in index order; each tries staying plus eight compass
    moves of length ``step`` against the summed distance from the nodes
    in its current cell (ties: stay, then N, NE, E, SE, S, SW, W, NW).
    Returns the deployment with the best global objective seen after any
    sweep, so the result is never worse than the input.
    """
    marr = as_xy_array(mules)
    if marr.shape[0] == 0:
        raise ValueError("mules must be nonempty")
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    if step <= 0:
        raise ValueError("step must be positive")
    pos = K.local_search_positions(marr, as_xy_array(nodes), max_iterations, step)
    return [Point(float(x), float(y)) for x, y in pos]


def kmedian_objective(centers: Sequence, nodes: Sequence) -> float:
    """Sum over nodes of the distance to the nearest center."""
    carr = as_xy_array(centers)
    if carr.shape[0] == 0:
        raise ValueError("centers must be nonempty")
    narr = as_xy_array(nodes)
    if narr.shape[0] == 0:
        return 0.0
    return float(K.kmedian_cost(carr, narr))


def kcenter_objective(centers: Sequence, nodes: Sequence) -> float:
    """Largest node-to-nearest-center distance; 0 when there are no nodes."""
    carr = as_xy_array(centers)
    if carr.shape[0] == 0:
        raise ValueError("centers must be nonempty")
    narr = as_xy_array(nodes)
    if narr.shape[0] == 0:
        return 0.0
    return float(K.kcenter_cost(carr, narr))
