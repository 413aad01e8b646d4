"""Numba-jitted loop kernels for the placement and assignment algorithms.

Every function here has a vectorized twin in ``numpy_kernels`` with
identical selection semantics:

- nearest/farthest choices compare *squared* distances, scanning in
  ascending index order with strict ``<``/``>``, so the lowest index wins
  ties;
- sums over nodes accumulate in node-index order;
- reported objective values use true Euclidean distances.

``cache=True`` persists the compiled code next to the source, so the JIT
cost shows up once per machine, not once per process.
"""

import numpy as np
from numba import njit

_SQRT_HALF = np.sqrt(0.5)


@njit(cache=True, nogil=True)
def nearest_center_indices(points, centers):
    """Index of the nearest center for each point, lowest index on ties."""
    n = points.shape[0]
    m = centers.shape[0]
    out = np.empty(n, np.int64)
    for s in range(n):
        dx = points[s, 0] - centers[0, 0]
        dy = points[s, 1] - centers[0, 1]
        best = dx * dx + dy * dy
        bj = 0
        for j in range(1, m):
            dx = points[s, 0] - centers[j, 0]
            dy = points[s, 1] - centers[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                bj = j
        out[s] = bj
    return out


@njit(cache=True, nogil=True)
def kmedian_cost(centers, nodes):
    """Sum over nodes of the distance to the nearest center."""
    total = 0.0
    for s in range(nodes.shape[0]):
        dx = nodes[s, 0] - centers[0, 0]
        dy = nodes[s, 1] - centers[0, 1]
        best = dx * dx + dy * dy
        for j in range(1, centers.shape[0]):
            dx = nodes[s, 0] - centers[j, 0]
            dy = nodes[s, 1] - centers[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
        total += np.sqrt(best)
    return total


@njit(cache=True, nogil=True)
def kcenter_cost(centers, nodes):
    """Largest node-to-nearest-center distance; 0 for no nodes."""
    worst = 0.0
    for s in range(nodes.shape[0]):
        dx = nodes[s, 0] - centers[0, 0]
        dy = nodes[s, 1] - centers[0, 1]
        best = dx * dx + dy * dy
        for j in range(1, centers.shape[0]):
            dx = nodes[s, 0] - centers[j, 0]
            dy = nodes[s, 1] - centers[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
        if best > worst:
            worst = best
    return np.sqrt(worst)


@njit(cache=True, nogil=True)
def farthest_first_indices(sites, k):
    """Gonzalez farthest-first traversal over site indices.

    Starts at index 0; each next pick maximizes the distance to the
    already-selected set. Returns indices in selection order.
    """
    n = sites.shape[0]
    sel = np.empty(k, np.int64)
    sel[0] = 0
    mind2 = np.empty(n, np.float64)
    for s in range(n):
        dx = sites[s, 0] - sites[0, 0]
        dy = sites[s, 1] - sites[0, 1]
        mind2[s] = dx * dx + dy * dy
    for i in range(1, k):
        best = 0
        bestv = mind2[0]
        for s in range(1, n):
            if mind2[s] > bestv:
                bestv = mind2[s]
                best = s
        sel[i] = best
        for s in range(n):
            dx = sites[s, 0] - sites[best, 0]
            dy = sites[s, 1] - sites[best, 1]
            d2 = dx * dx + dy * dy
            if d2 < mind2[s]:
                mind2[s] = d2
    return sel


@njit(cache=True, nogil=True)
def reverse_greedy_indices(sites, k):
    """Reverse-greedy k-median over site indices.

    Starts with a facility on every site and repeatedly drops the one
    whose removal increases the total nearest-facility distance the
    least (lowest index on ties), until k remain. Incremental
    nearest/second-nearest bookkeeping keeps each removal O(n) amortized.
    Returns the surviving indices in ascending order.
    """
    n = sites.shape[0]
    dist = np.empty((n, n), np.float64)
    for a in range(n):
        dist[a, a] = 0.0
        for b in range(a + 1, n):
            dx = sites[a, 0] - sites[b, 0]
            dy = sites[a, 1] - sites[b, 1]
            d = np.sqrt(dx * dx + dy * dy)
            dist[a, b] = d
            dist[b, a] = d

    active = np.ones(n, np.bool_)
    near1 = np.empty(n, np.int64)
    near2 = np.empty(n, np.int64)
    for s in range(n):
        b1 = -1
        b2 = -1
        d1 = np.inf
        d2 = np.inf
        for j in range(n):
            d = dist[s, j]
            if d < d1:
                d2 = d1
                b2 = b1
                d1 = d
                b1 = j
            elif d < d2:
                d2 = d
                b2 = j
        near1[s] = b1
        near2[s] = b2 if b2 >= 0 else b1

    count = n
    delta = np.empty(n, np.float64)
    while count > k:
        for j in range(n):
            delta[j] = 0.0
        for s in range(n):
            delta[near1[s]] += dist[s, near2[s]] - dist[s, near1[s]]
        fbest = -1
        vbest = np.inf
        for j in range(n):
            if active[j] and delta[j] < vbest:
                vbest = delta[j]
                fbest = j
        active[fbest] = False
        count -= 1
        for s in range(n):
            if near1[s] == fbest or near2[s] == fbest:
                b1 = -1
                b2 = -1
                d1 = np.inf
                d2 = np.inf
                for j in range(n):
                    if active[j]:
                        d = dist[s, j]
                        if d < d1:
                            d2 = d1
                            b2 = b1
                            d1 = d
                            b1 = j
                        elif d < d2:
                            d2 = d
                            b2 = j
                near1[s] = b1
                near2[s] = b2 if b2 >= 0 else b1

    out = np.empty(k, np.int64)
    w = 0
    for j in range(n):
        if active[j]:
            out[w] = j
            w += 1
    return out


@njit(cache=True, nogil=True)
def centroid_adjust_positions(mules, nodes, max_rounds, tol):
    """Lloyd-style repositioning: each mule moves to its cell's centroid.

    Mules with empty cells stay put. Stops when no mule moves farther
    than ``tol`` in a round, or after ``max_rounds``.
    """
    m = mules.shape[0]
    n = nodes.shape[0]
    pos = mules.copy()
    tol2 = tol * tol
    sumx = np.empty(m, np.float64)
    sumy = np.empty(m, np.float64)
    cnt = np.empty(m, np.int64)
    for _ in range(max_rounds):
        for j in range(m):
            sumx[j] = 0.0
            sumy[j] = 0.0
            cnt[j] = 0
        for s in range(n):
            dx = nodes[s, 0] - pos[0, 0]
            dy = nodes[s, 1] - pos[0, 1]
            best = dx * dx + dy * dy
            bj = 0
            for j in range(1, m):
                dx = nodes[s, 0] - pos[j, 0]
                dy = nodes[s, 1] - pos[j, 1]
                d2 = dx * dx + dy * dy
                if d2 < best:
                    best = d2
                    bj = j
            sumx[bj] += nodes[s, 0]
            sumy[bj] += nodes[s, 1]
            cnt[bj] += 1
        moved = False
        for j in range(m):
            if cnt[j] > 0:
                nx = sumx[j] / cnt[j]
                ny = sumy[j] / cnt[j]
                dx = nx - pos[j, 0]
                dy = ny - pos[j, 1]
                if dx * dx + dy * dy > tol2:
                    moved = True
                pos[j, 0] = nx
                pos[j, 1] = ny
        if not moved:
            break
    return pos


@njit(cache=True, nogil=True)
def local_search_positions(mules, nodes, max_iters, step):
    """Anytime compass local search on the k-median objective.

    Sequential sweeps over mules; each mule tries staying plus the eight
    compass offsets of length ``step`` against the summed distance from
    the nodes currently in its cell, preferring to stay on ties, then
    the earliest candidate (N, NE, E, SE, S, SW, W, NW). Returns the
    deployment with the lowest global objective observed after any sweep
    (the input counts as observed).
    """
    m = mules.shape[0]
    n = nodes.shape[0]
    h = _SQRT_HALF * step
    offx = np.array([0.0, 0.0, h, step, h, 0.0, -h, -step, -h])
    offy = np.array([0.0, step, h, 0.0, -h, -step, -h, 0.0, h])

    pos = mules.copy()
    best_pos = pos.copy()
    best_obj = kmedian_cost(pos, nodes)
    cell = np.empty(n, np.int64)
    for _ in range(max_iters):
        moved = False
        for j in range(m):
            cell_n = 0
            for s in range(n):
                dx = nodes[s, 0] - pos[0, 0]
                dy = nodes[s, 1] - pos[0, 1]
                nb = dx * dx + dy * dy
                bj = 0
                for q in range(1, m):
                    dx = nodes[s, 0] - pos[q, 0]
                    dy = nodes[s, 1] - pos[q, 1]
                    d2 = dx * dx + dy * dy
                    if d2 < nb:
                        nb = d2
                        bj = q
                if bj == j:
                    cell[cell_n] = s
                    cell_n += 1
            bestc = 0
            bestv = np.inf
            for c in range(9):
                cx = pos[j, 0] + offx[c]
                cy = pos[j, 1] + offy[c]
                total = 0.0
                for w in range(cell_n):
                    s = cell[w]
                    dx = nodes[s, 0] - cx
                    dy = nodes[s, 1] - cy
                    total += np.sqrt(dx * dx + dy * dy)
                if total < bestv:
                    bestv = total
                    bestc = c
            if bestc != 0:
                pos[j, 0] += offx[bestc]
                pos[j, 1] += offy[bestc]
                moved = True
        obj = kmedian_cost(pos, nodes)
        if obj < best_obj:
            best_obj = obj
            best_pos = pos.copy()
        if not moved:
            break
    return best_pos


@njit(cache=True, nogil=True)
def hungarian(cost):
    """Potential-based Hungarian method on a square cost matrix.

    Returns ``(col_of_row, u, v)``: one optimal assignment plus the
    optimal row/column potentials, which certify optimality through the
    tight edges ``cost[i, j] == u[i] + v[j]``.
    """
    n = cost.shape[0]
    u = np.zeros(n + 1, np.float64)
    v = np.zeros(n + 1, np.float64)
    p = np.zeros(n + 1, np.int64)
    way = np.zeros(n + 1, np.int64)
    minv = np.empty(n + 1, np.float64)
    used = np.empty(n + 1, np.bool_)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = np.inf
            used[j] = False
            way[j] = 0
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    col_of_row = np.empty(n, np.int64)
    for j in range(1, n + 1):
        col_of_row[p[j] - 1] = j - 1
    return col_of_row, u[1:], v[1:]
