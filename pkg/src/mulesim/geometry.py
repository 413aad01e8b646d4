"""Planar points, distances, centroids and nearest-center partitioning.

Cells are realized as nearest-center membership, not as an explicit
diagram: that is the only form the rest of the library ever needs.
Comparisons use squared distances with exact float arithmetic and
lowest-index tie-breaking, so results are reproducible bit for bit.
"""

import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .backends import kernels as K


class Point(NamedTuple):
    """A position in the plane, in distance units."""

    x: float
    y: float


def as_xy_array(points: Iterable) -> np.ndarray:
    """Coerce an iterable of (x, y) pairs to a float64 (n, 2) array."""
    arr = np.asarray(list(points), dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected a sequence of (x, y) pairs")
    return np.ascontiguousarray(arr)


def distance(a, b) -> float:
    """Euclidean distance between two points."""
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return math.sqrt(dx * dx + dy * dy)


def centroid(points: Sequence) -> Point:
    """Arithmetic mean of the coordinates of a nonempty point set."""
    arr = as_xy_array(points)
    if arr.shape[0] == 0:
        raise ValueError("centroid of an empty point set is undefined")
    n = arr.shape[0]
    return Point(float(arr[:, 0].sum() / n), float(arr[:, 1].sum() / n))


def nearest_center_index(p, centers: Sequence) -> int:
    """Index of the center closest to ``p``; ties go to the lowest index."""
    arr = as_xy_array(centers)
    if arr.shape[0] == 0:
        raise ValueError("centers must be nonempty")
    idx = K.nearest_center_indices(as_xy_array([tuple(p)]), arr)
    return int(idx[0])


def partition_by_nearest(points: Sequence, centers: Sequence) -> list[set[int]]:
    """Per-center sets of point indices whose nearest center it is.

    The sets are disjoint and cover every point index; a point equidistant
    from several centers belongs to the lowest-indexed one.
    """
    carr = as_xy_array(centers)
    if carr.shape[0] == 0:
        raise ValueError("centers must be nonempty")
    parr = as_xy_array(points)
    cells: list[set[int]] = [set() for _ in range(carr.shape[0])]
    if parr.shape[0]:
        owners = K.nearest_center_indices(parr, carr)
        for i, j in enumerate(owners):
            cells[int(j)].add(i)
    return cells
