"""Pure-numpy fallback implementations of the hot kernels.

Vectorized counterparts of ``numba_kernels`` with matching selection
semantics: squared-distance comparisons, first (lowest-index) argmin and
argmax, accumulation in input order via ``np.bincount``. Useful when
numba is unavailable or disabled (``MULESIM_BACKEND=numpy``) and as an
independent cross-check of the jitted code.
"""

import numpy as np

_SQRT_HALF = np.sqrt(0.5)


def _sq_dists(points, centers):
    diff = points[:, None, :] - centers[None, :, :]
    return (diff * diff).sum(axis=2)


def nearest_center_indices(points, centers):
    """Index of the nearest center for each point, lowest index on ties."""
    if points.shape[0] == 0:
        return np.empty(0, np.int64)
    return np.argmin(_sq_dists(points, centers), axis=1).astype(np.int64)


def kmedian_cost(centers, nodes):
    """Sum over nodes of the distance to the nearest center."""
    if nodes.shape[0] == 0:
        return 0.0
    return float(np.sum(np.sqrt(_sq_dists(nodes, centers).min(axis=1))))


def kcenter_cost(centers, nodes):
    """Largest node-to-nearest-center distance; 0 for no nodes."""
    if nodes.shape[0] == 0:
        return 0.0
    return float(np.sqrt(_sq_dists(nodes, centers).min(axis=1).max()))


def farthest_first_indices(sites, k):
    """Gonzalez farthest-first traversal over site indices."""
    n = sites.shape[0]
    sel = np.empty(k, np.int64)
    sel[0] = 0
    diff = sites - sites[0]
    mind2 = (diff * diff).sum(axis=1)
    for i in range(1, k):
        best = int(np.argmax(mind2))
        sel[i] = best
        diff = sites - sites[best]
        np.minimum(mind2, (diff * diff).sum(axis=1), out=mind2)
    return sel


def reverse_greedy_indices(sites, k):
    """Reverse-greedy k-median over site indices, ascending output."""
    n = sites.shape[0]
    dx = sites[:, 0][:, None] - sites[:, 0][None, :]
    dy = sites[:, 1][:, None] - sites[:, 1][None, :]
    dist = np.sqrt(dx * dx + dy * dy)

    masked = dist.copy()
    near1 = np.argmin(masked, axis=1).astype(np.int64)
    rows = np.arange(n)
    tmp = masked.copy()
    tmp[rows, near1] = np.inf
    near2 = np.argmin(tmp, axis=1).astype(np.int64)
    if n == 1:
        near2 = near1.copy()

    active = np.ones(n, bool)
    count = n
    while count > k:
        delta = np.bincount(
            near1, weights=dist[rows, near2] - dist[rows, near1], minlength=n
        )
        fbest = int(np.argmin(np.where(active, delta, np.inf)))
        active[fbest] = False
        count -= 1
        masked[:, fbest] = np.inf
        aff = (near1 == fbest) | (near2 == fbest)
        if aff.any():
            sub = masked[aff]
            n1 = np.argmin(sub, axis=1)
            srows = np.arange(sub.shape[0])
            sub2 = sub.copy()
            sub2[srows, n1] = np.inf
            n2 = np.argmin(sub2, axis=1)
            if count == 1:
                n2 = n1
            near1[aff] = n1
            near2[aff] = n2
    return np.flatnonzero(active).astype(np.int64)


def centroid_adjust_positions(mules, nodes, max_rounds, tol):
    """Lloyd-style repositioning; empty-cell mules stay put."""
    m = mules.shape[0]
    pos = mules.copy()
    tol2 = tol * tol
    if nodes.shape[0] == 0:
        return pos
    for _ in range(max_rounds):
        near = nearest_center_indices(nodes, pos)
        cnt = np.bincount(near, minlength=m)
        sumx = np.bincount(near, weights=nodes[:, 0], minlength=m)
        sumy = np.bincount(near, weights=nodes[:, 1], minlength=m)
        occupied = cnt > 0
        new = pos.copy()
        new[occupied, 0] = sumx[occupied] / cnt[occupied]
        new[occupied, 1] = sumy[occupied] / cnt[occupied]
        moved = new - pos
        pos = new
        if not ((moved * moved).sum(axis=1) > tol2).any():
            break
    return pos


def local_search_positions(mules, nodes, max_iters, step):
    """Anytime compass local search on the k-median objective."""
    m = mules.shape[0]
    h = _SQRT_HALF * step
    off = np.array(
        [
            [0.0, 0.0],
            [0.0, step],
            [h, h],
            [step, 0.0],
            [h, -h],
            [0.0, -step],
            [-h, -h],
            [-step, 0.0],
            [-h, h],
        ]
    )
    pos = mules.copy()
    best_pos = pos.copy()
    best_obj = kmedian_cost(pos, nodes)
    for _ in range(max_iters):
        moved = False
        for j in range(m):
            if nodes.shape[0]:
                near = nearest_center_indices(nodes, pos)
                members = nodes[near == j]
            else:
                members = nodes
            cands = pos[j] + off
            if members.shape[0]:
                diff = members[:, None, :] - cands[None, :, :]
                totals = np.sqrt((diff * diff).sum(axis=2)).sum(axis=0)
                bestc = int(np.argmin(totals))
            else:
                bestc = 0
            if bestc != 0:
                pos[j] = pos[j] + off[bestc]
                moved = True
        obj = kmedian_cost(pos, nodes)
        if obj < best_obj:
            best_obj = obj
            best_pos = pos.copy()
        if not moved:
            break
    return best_pos


def hungarian(cost):
    """Potential-based Hungarian method on a square cost matrix.

    Returns ``(col_of_row, u, v)`` exactly as the numba twin: one optimal
    assignment plus optimal potentials. Outer loops stay in Python; the
    per-column relaxation step is vectorized.
    """
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, np.int64)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, bool)
        way = np.zeros(n + 1, np.int64)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            free = ~used[1:]
            upd = free & (cur < minv[1:])
            minv[1:][upd] = cur[upd]
            way[1:][upd] = j0
            scan = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(scan)) + 1
            delta = scan[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
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
    return col_of_row, u[1:].copy(), v[1:].copy()
