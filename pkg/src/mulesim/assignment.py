"""Min-cost bipartite matching of mules to redeployment targets.

The core solver is the O(n^3) Hungarian method (in the kernel backend).
Its potentials certify optimality: every minimum-cost matching uses only
tight edges (cost == u + v). Among equal-cost optima this module returns
the lexicographically smallest matching by (agent, target) pairs, found
by a greedy walk over the tight-edge graph with feasibility checks.
Rectangular inputs are padded to square with zero-cost dummies; only
real pairs are returned.
"""

import numpy as np

from .backends import kernels as K

_TIGHT_EPS = 1e-9


def min_cost_assignment(costs) -> list[tuple[int, int]]:
    """Matching of size min(r, c) minimizing total cost.

    Returns (agent, target) pairs sorted by agent; among minimum-cost
    matchings, the lexicographically smallest one. Raises ValueError on
    an empty matrix or non-finite entries.
    """
    arr = np.asarray(costs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("cost matrix must be 2-D and nonempty")
    if not np.isfinite(arr).all():
        raise ValueError("cost matrix entries must be finite")
    r, c = arr.shape
    n = max(r, c)
    padded = np.zeros((n, n), dtype=np.float64)
    padded[:r, :c] = arr

    col_of_row, u, v = K.hungarian(padded)

    eps = _TIGHT_EPS * (1.0 + float(np.abs(padded).max()))
    tight = np.abs(padded - u[:, None] - v[None, :]) <= eps
    # With exactly one tight edge per row the optimum is unique and the
    # solver's matching is already the answer.
    if not (tight.sum(axis=1) > 1).any():
        assign = col_of_row
    else:
        assign = _lex_min_tight_matching(tight)

    return [(i, int(assign[i])) for i in range(r) if assign[i] < c]


def _lex_min_tight_matching(tight):
    """Lexicographically smallest perfect matching of the tight graph.

    Rows are decided in ascending order, each taking the smallest column
    that keeps the remaining rows perfectly matchable. Dummy columns sit
    at indices >= c, so a real row prefers real columns automatically,
    and dummy rows (>= r) are decided after all real pairs are fixed.
    """
    n = tight.shape[0]
    assign = [-1] * n
    used = [False] * n

    for i in range(n):
        for j in range(n):
            if used[j] or not tight[i, j]:
                continue
            used[j] = True
            if _rows_matchable(tight, i + 1, used, n):
                assign[i] = j
                break
            used[j] = False
        if assign[i] < 0:
            raise AssertionError("tight graph lost its perfect matching")
    return assign


def _rows_matchable(tight, start, used_cols, n):
    """Can rows start..n-1 be perfectly matched into the free columns?"""
    match_col = [-1] * n

    def try_row(row, seen):
        for j in range(n):
            if tight[row, j] and not used_cols[j] and not seen[j]:
                seen[j] = True
                if match_col[j] < 0 or try_row(match_col[j], seen):
                    match_col[j] = row
                    return True
        return False

    for row in range(start, n):
        if not try_row(row, [False] * n):
            return False
    return True
