"""Bipartite (Tanner-style) graph of a binary matrix and its girth.

Columns of a binary matrix become variable nodes, rows become measurement
nodes, and every nonzero entry contributes one edge.  The girth -- the
length of the shortest cycle -- is the structural quantity this toolkit
keys on: girth > 4 is equivalent to no two columns sharing more than one
nonzero row.

Girth is computed per variable node ("local girth" = shortest cycle
through that node) with a breadth-first expansion that tracks, for every
discovered node, which root edge its tree path descends from.  An edge
between nodes of different root branches closes a cycle through the root
of length dist(u) + dist(v) + 1; the minimum over all such edges is the
local girth.  Plain revisit detection without branch tracking can report
cycles that avoid the root entirely, so the branch check is required for
the local value to be exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DuplicateEdge, IndexOutOfRange

INFINITE = math.inf
"""Sentinel girth value for nodes that lie on no cycle."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable adjacency view of a binary matrix.

    ``var_adj[j]`` lists the measurement nodes (rows) of variable node j,
    ``meas_adj[i]`` lists the variable nodes (columns) of measurement
    node i.  Both directions are sorted and duplicate free, and encode
    the same edge set.
    """

    num_variable_nodes: int
    num_measurement_nodes: int
    var_adj: tuple[tuple[int, ...], ...]
    meas_adj: tuple[tuple[int, ...], ...]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.var_adj)


@dataclass(frozen=True)
class GirthReport:
    """Global girth plus the per-variable-node local girths.

    Finite values are even and at least 4; ``INFINITE`` marks nodes with
    no cycle through them.  The global girth is the minimum local girth.
    """

    global_girth: float
    local_girth: tuple[float, ...]


def build_graph(M: int, N: int, supports: Sequence[Iterable[int]]) -> BipartiteGraph:
    """Build the bipartite graph of an M-row binary matrix from its column supports.

    Parameters
    ----------
    M : number of measurement nodes (rows).
    N : number of variable nodes (columns); must equal ``len(supports)``.
    supports : per-column collection of row indices, each nonempty and
        duplicate free.

    Raises
    ------
    IndexOutOfRange : a row index is outside [0, M).
    DuplicateEdge : a column lists the same row twice.
    """
    if len(supports) != N:
        raise IndexOutOfRange(f"expected {N} column supports, got {len(supports)}")
    var_adj = []
    meas_adj: list[list[int]] = [[] for _ in range(M)]
    for j, sup in enumerate(supports):
        rows = list(sup)
        if not rows:
            raise IndexOutOfRange(f"column {j} has an empty support")
        if len(set(rows)) != len(rows):
            raise DuplicateEdge(f"column {j} repeats a row index")
        for i in rows:
            if not 0 <= i < M:
                raise IndexOutOfRange(f"column {j}: row index {i} not in [0, {M})")
        rows.sort()
        var_adj.append(tuple(rows))
        for i in rows:
            meas_adj[i].append(j)
    return BipartiteGraph(
        num_variable_nodes=N,
        num_measurement_nodes=M,
        var_adj=tuple(var_adj),
        meas_adj=tuple(tuple(a) for a in meas_adj),
    )


def compute_girth(graph: BipartiteGraph) -> GirthReport:
    """Local girth of every variable node and the global minimum.

    The per-root BFS stops once no shorter cycle through the root can
    exist, and is capped at depth ``2*ceil(log N) + 4``; cycles longer
    than the cap are reported as INFINITE.  An empty graph is INFINITE
    everywhere.
    """
    N = graph.num_variable_nodes
    M = graph.num_measurement_nodes
    # Combined node ids: variables 0..N-1, measurements N..N+M-1.
    adj: list[tuple[int, ...]] = [tuple(N + i for i in s) for s in graph.var_adj]
    adj.extend(graph.meas_adj)
    cap = 2 * math.ceil(math.log(max(N, 2))) + 4
    local = tuple(_local_girth(adj, root, cap) for root in range(N))
    global_girth = min(local, default=INFINITE)
    return GirthReport(global_girth=global_girth, local_girth=local)


def _local_girth(adj: list[tuple[int, ...]], root: int, depth_cap: int) -> float:
    """Shortest cycle through ``root`` via branch-tracked BFS."""
    n = len(adj)
    dist = [-1] * n
    branch = [-1] * n
    parent = [-1] * n
    dist[root] = 0
    frontier = [root]
    best = INFINITE
    t = 0  # distance of the current frontier
    while frontier:
        # Any cycle still undetected has length >= 2*(t+1).
        if best <= 2 * t or t >= depth_cap:
            break
        nxt = []
        for u in frontier:
            du = dist[u]
            bu = branch[u]
            pu = parent[u]
            for w in adj[u]:
                if w == pu:
                    continue
                dw = dist[w]
                if dw < 0:
                    dist[w] = du + 1
                    parent[w] = u
                    branch[w] = w if du == 0 else bu
                    nxt.append(w)
                elif branch[w] != bu:
                    cand = du + dw + 1
                    if cand < best:
                        best = cand
        frontier = nxt
        t += 1
    return best
