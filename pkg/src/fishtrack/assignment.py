"""Min-cost bipartite assignment with forbidden pairs.

The solver maximises the number of matched (non-forbidden) pairs first and
minimises total cost second. Among equally optimal matchings the result is
canonical: rows are fixed in increasing index order, each taking the lowest
column index that still admits an optimal completion.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

FORBIDDEN = math.inf
"""Sentinel cost marking a disallowed (row, col) pair."""


@dataclass
class Matching:
    pairs: list[tuple[int, int]] = field(default_factory=list)
    unmatched_rows: list[int] = field(default_factory=list)
    unmatched_cols: list[int] = field(default_factory=list)

    def total_cost(self, costs: Sequence[Sequence[float]]) -> float:
        return sum(costs[r][c] for r, c in self.pairs)


def _is_forbidden(v: float) -> bool:
    return v == FORBIDDEN or (isinstance(v, float) and math.isnan(v))


def _hungarian(cost: list[list[float]]) -> tuple[list[int], list[float], list[float]]:
    """Square O(n^3) shortest-augmenting-path Hungarian.

    Returns (col_of_row, u, v) with u[i] + v[j] <= cost[i][j] and equality on
    the returned assignment.
    """
    n = len(cost)
    inf = math.inf
    # 1-based arrays, index 0 is the virtual source column
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    row_of_col = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        row_of_col[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            delta = inf
            j1 = 0
            row = cost[i0 - 1]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[row_of_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while True:
            j1 = way[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1
            if j0 == 0:
                break
    col_of_row = [0] * n
    for j in range(1, n + 1):
        col_of_row[row_of_col[j] - 1] = j - 1
    return col_of_row, u[1:], v[1:]


def _canonicalize(tight: list[list[int]], col_of_row: list[int]) -> list[int]:
    """Lexicographically smallest perfect matching inside the tight-edge graph."""
    n = len(col_of_row)
    row_of_col = [0] * n
    for r, c in enumerate(col_of_row):
        row_of_col[c] = r

    def reroute(r: int, target: int, fixed_upto: int, seen: list[bool]) -> bool:
        # find an alternating path giving row r a new column, ending on target
        for c in tight[r]:
            if seen[c]:
                continue
            seen[c] = True
            if c == target:
                col_of_row[r] = c
                row_of_col[c] = r
                return True
            owner = row_of_col[c]
            if owner > fixed_upto and reroute(owner, target, fixed_upto, seen):
                col_of_row[r] = c
                row_of_col[c] = r
                return True
        return False

    for i in range(n):
        current = col_of_row[i]
        for j in tight[i]:
            if j >= current:
                break
            owner = row_of_col[j]
            if owner < i:
                continue
            seen = [False] * n
            seen[j] = True
            # owner of j must move; column `current` is released by row i
            if reroute(owner, current, i, seen):
                col_of_row[i] = j
                row_of_col[j] = i
                break
    return col_of_row


def _solve_component(costs: Sequence[Sequence[float]], rows: list[int], cols: list[int]) -> list[tuple[int, int]]:
    nr, nc = len(rows), len(cols)
    n = max(nr, nc)
    finite = [costs[r][c] for r in rows for c in cols if not _is_forbidden(costs[r][c])]
    lo = min(finite)
    hi = max(finite)
    # any matching with one fewer forbidden pair beats every cost difference
    big = (hi - lo) * n + 1.0
    padded = [[0.0] * n for _ in range(n)]
    for a, r in enumerate(rows):
        for b, c in enumerate(cols):
            val = costs[r][c]
            padded[a][b] = big if _is_forbidden(val) else val - lo
    col_of_row, u, v = _hungarian(padded)
    tol = 1e-9 * max(1.0, big)
    tight = [[b for b in range(n) if padded[a][b] - u[a] - v[b] <= tol] for a in range(n)]
    for a in range(n):
        if col_of_row[a] not in tight[a]:
            tight[a].append(col_of_row[a])
            tight[a].sort()
    col_of_row = _canonicalize(tight, col_of_row)
    pairs = []
    for a in range(nr):
        b = col_of_row[a]
        if b < nc and not _is_forbidden(costs[rows[a]][cols[b]]):
            pairs.append((rows[a], cols[b]))
    return pairs


def solve_min_cost(costs: Sequence[Sequence[float]], n_rows: int | None = None, n_cols: int | None = None) -> Matching:
    """Solve the rectangular assignment problem on a row-major cost matrix.

    Entries equal to ``FORBIDDEN`` (or NaN) may never be matched. The matching
    has maximum cardinality over allowed pairs and minimum total cost among
    those. ``n_rows`` / ``n_cols`` are only needed to express empty shapes
    such as 1x0, which a nested list cannot carry.
    """
    rows_n = len(costs) if n_rows is None else n_rows
    if n_cols is not None:
        cols_n = n_cols
    else:
        cols_n = len(costs[0]) if rows_n else 0
    for r in range(rows_n):
        if len(costs[r]) != cols_n:
            raise ValueError(f"row {r} has {len(costs[r])} entries, expected {cols_n}")
        for c in range(cols_n):
            val = costs[r][c]
            if not _is_forbidden(val) and not math.isfinite(val):
                raise ValueError(f"cost[{r}][{c}] = {val!r} is neither finite nor FORBIDDEN")

    # union-find over rows and columns linked by allowed entries
    parent = list(range(rows_n + cols_n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in range(rows_n):
        for c in range(cols_n):
            if not _is_forbidden(costs[r][c]):
                ra, rb = find(r), find(rows_n + c)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, tuple[list[int], list[int]]] = {}
    for r in range(rows_n):
        groups.setdefault(find(r), ([], []))[0].append(r)
    for c in range(cols_n):
        groups.setdefault(find(rows_n + c), ([], []))[1].append(c)

    pairs: list[tuple[int, int]] = []
    for grows, gcols in groups.values():
        if not grows or not gcols:
            continue
        if len(grows) == 1 and len(gcols) == 1:
            pairs.append((grows[0], gcols[0]))
            continue
        pairs.extend(_solve_component(costs, grows, gcols))

    pairs.sort()
    matched_r = {r for r, _ in pairs}
    matched_c = {c for _, c in pairs}
    return Matching(
        pairs=pairs,
        unmatched_rows=[r for r in range(rows_n) if r not in matched_r],
        unmatched_cols=[c for c in range(cols_n) if c not in matched_c],
    )
