"""Matrix generators: progressive edge growth, random regular, Gaussian.

PEG places the edges of one column at a time.  The first edge attaches to
a minimum-degree row; every later edge expands a BFS tree from the
column's variable node and attaches to a minimum-degree row outside the
tree, which creates no cycle at all.  Only when the tree already reaches
every row is a cycle unavoidable, and then the most distant rows (the
last BFS layer) are used, so the new cycle is as long as possible.

With lowest-index tie-breaking the construction is a pure function of
(M, N, d).  Seeded-random attempts relax the greedy rule: every edge is
drawn uniformly from the candidate set (restricted to rows still under
the target row degree ceil(N*d/M) when possible) instead of taking the
minimum-degree candidate.  Pure minimum-degree selection keeps early
columns disjoint, which provably locks tight cases out -- a girth-6
(7,7,3) matrix needs every pair of columns to intersect, yet min-degree
selection makes columns 0 and 1 disjoint no matter how ties fall -- so
the randomized restarts explore the wider space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import bipartite_graph
from .errors import ConstructionFailed, DuplicateColumn, InfeasibleDegree
from .matrix_core import SensingMatrix, from_supports

TIE_LOWEST_INDEX = "lowest_index"
TIE_SEEDED_RANDOM = "seeded_random"


@dataclass(frozen=True)
class PegConfig:
    """Tie-breaking and retry policy for PEG construction.

    ``bfs_depth_cap`` limits tree expansion (0 = expand to the fixpoint);
    rows beyond the cap count as outside the tree.
    """

    tie_break: str = TIE_LOWEST_INDEX
    seed: int = 0
    max_retries: int = 20
    bfs_depth_cap: int = 0


@dataclass(frozen=True)
class DmaxResult:
    """Outcome of the practical maximum-degree search.

    ``matrix`` is the constructed girth >= 6 matrix at the achieved
    degree; ``theoretical_bound`` is the largest degree the girth > 4
    counting inequality admits at this (M, N).
    """

    d_max: int
    matrix: SensingMatrix
    theoretical_bound: int


def _pick_min_degree(candidates, degree, rng: Optional[np.random.Generator]) -> int:
    """Minimum-degree candidate; ties by lowest index or seeded draw."""
    best_deg = None
    ties: list[int] = []
    for c in candidates:
        dc = degree[c]
        if best_deg is None or dc < best_deg:
            best_deg = dc
            ties = [c]
        elif dc == best_deg:
            ties.append(c)
    if not ties:
        raise ConstructionFailed("no candidate measurement node available")
    if rng is None or len(ties) == 1:
        return ties[0]
    return ties[int(rng.integers(len(ties)))]


def _bfs_candidates(v, own_rows, meas_adj, supports, M, N, depth_cap):
    """Rows to consider for the next edge of variable node v.

    Returns the complement of the BFS tree when it is nonempty, otherwise
    the deepest BFS layer.
    """
    covered = bytearray(M)
    var_seen = bytearray(N)
    var_seen[v] = 1
    for c in own_rows:
        covered[c] = 1
    n_cov = len(own_rows)
    frontier = own_rows
    last_new = own_rows
    depth = 1
    while n_cov < M and (depth_cap == 0 or depth < depth_cap):
        new_vars = []
        for c in frontier:
            for u in meas_adj[c]:
                if not var_seen[u]:
                    var_seen[u] = 1
                    new_vars.append(u)
        new_meas = []
        for u in new_vars:
            for c in supports[u]:
                if not covered[c]:
                    covered[c] = 1
                    new_meas.append(c)
        if not new_meas:
            break  # fixpoint: the rest of the rows are unreachable
        n_cov += len(new_meas)
        last_new = new_meas
        frontier = new_meas
        depth += 2
    if n_cov < M:
        return [c for c in range(M) if not covered[c]]
    return last_new


def peg_construct(M: int, N: int, d: int, config: Optional[PegConfig] = None) -> SensingMatrix:
    """Progressive edge growth for an M x N regular binary matrix of degree d.

    Girth is not guaranteed; the caller checks it (see
    :func:`peg_construct_girth_target`).  With lowest-index tie-breaking
    the result is a pure function of (M, N, d).
    """
    if config is None:
        config = PegConfig()
    # Girth-constrained matrices live at 2 <= d <= M-2, but construction
    # itself only needs d <= M (e.g. a 3x2 degree-2 matrix is buildable).
    if not 2 <= d <= M:
        raise InfeasibleDegree(f"degree {d} not in [2, M] for M={M}")
    rng = None
    if config.tie_break == TIE_SEEDED_RANDOM:
        rng = np.random.Generator(np.random.PCG64(config.seed))
    elif config.tie_break != TIE_LOWEST_INDEX:
        raise ValueError(f"unknown tie_break {config.tie_break!r}")
    row_cap = -(-N * d // M)  # ceil(N*d/M), the regular row degree
    degree = [0] * M
    meas_adj: list[list[int]] = [[] for _ in range(M)]
    supports: list[list[int]] = []
    all_rows = list(range(M))
    for v in range(N):
        own: list[int] = []
        for edge in range(d):
            if edge == 0:
                candidates = all_rows
            else:
                candidates = _bfs_candidates(
                    v, own, meas_adj, supports, M, N, config.bfs_depth_cap
                )
            if rng is None:
                c = _pick_min_degree(candidates, degree, rng)
            else:
                under = [c for c in candidates if degree[c] < row_cap]
                pool = under if under else list(candidates)
                c = pool[int(rng.integers(len(pool)))]
            own.append(c)
            meas_adj[c].append(v)
            degree[c] += 1
        supports.append(sorted(own))
    return from_supports(M, N, d, supports)


def peg_construct_girth_target(
    M: int,
    N: int,
    d: int,
    min_girth: float = 6,
    config: Optional[PegConfig] = None,
):
    """PEG with verification: retry until the girth target is met.

    The first attempt uses ``config`` as given; each of the up to
    ``config.max_retries`` restarts switches to seeded-random tie-breaking
    with a distinct derived seed.  Returns ``(matrix, girth_report,
    attempts)`` or raises ConstructionFailed.
    """
    if config is None:
        config = PegConfig()
    attempts = 0
    last_girth = None
    for trial in range(config.max_retries + 1):
        if trial == 0:
            cfg = config
        else:
            cfg = replace(config, tie_break=TIE_SEEDED_RANDOM, seed=config.seed * 1_000_003 + trial)
        attempts += 1
        try:
            A = peg_construct(M, N, d, cfg)
        except DuplicateColumn:
            continue  # forced duplicate support; count as a failed attempt
        report = bipartite_graph.compute_girth(A.to_graph())
        last_girth = report.global_girth
        if report.global_girth >= min_girth:
            return A, report, attempts
    raise ConstructionFailed(
        f"PEG({M},{N},{d}): girth >= {min_girth} not reached in {attempts} attempts "
        f"(last girth {last_girth})"
    )


def random_regular(M: int, N: int, d: int, seed) -> SensingMatrix:
    """Uniform random regular binary matrix: each column an independent d-subset.

    Duplicate columns are redrawn; if fewer than N distinct supports
    exist the matrix is impossible and DuplicateColumn is raised.
    """
    if not 1 <= d <= M:
        raise InfeasibleDegree(f"degree {d} not in [1, M] for M={M}")
    if math.comb(M, d) < N:
        raise DuplicateColumn(f"only C({M},{d}) distinct supports exist, fewer than N={N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    supports = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(N):
        for _attempt in range(100_000):
            col = tuple(sorted(rng.choice(M, size=d, replace=False).tolist()))
            if col not in seen:
                break
        else:
            raise DuplicateColumn("could not draw a fresh column support")
        seen.add(col)
        supports.append(col)
    return from_supports(M, N, d, supports)


def gaussian_matrix(M: int, N: int, seed) -> np.ndarray:
    """Dense Gaussian baseline: i.i.d. N(0, 1/M) entries, so columns have
    expected unit norm, matching the exact normalization of the binary
    matrices."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal((M, N)) / np.sqrt(M)


def dmax_theoretical_bound(M: int, N: int) -> int:
    """Largest degree admitted by the girth > 4 counting inequality.

    A column's d rows reach d*(N*d/M - 1) other columns through single
    shared rows; together with the column itself this cannot exceed N.
    Evaluated exactly: largest d with N*d^2 - M*d + M - N*M <= 0, capped
    at M - 2.
    """
    d = 1
    while d + 1 <= M - 2 and N * (d + 1) ** 2 - M * (d + 1) + M - N * M <= 0:
        d += 1
    return d


def find_dmax(M: int, N: int, config: Optional[PegConfig] = None) -> DmaxResult:
    """Scan degrees upward with PEG until girth >= 6 becomes unreachable.

    Linear scan from d = 2 (girth feasibility under a greedy constructor
    is not guaranteed monotone, so no bisection); each degree gets the
    configured restart budget before the scan stops.
    """
    if config is None:
        config = PegConfig()
    bound = dmax_theoretical_bound(M, N)
    best: Optional[tuple[int, SensingMatrix]] = None
    for d in range(2, min(bound, M - 2) + 1):
        try:
            A, _report, _attempts = peg_construct_girth_target(M, N, d, 6, config)
        except ConstructionFailed:
            break
        best = (d, A)
    if best is None:
        raise ConstructionFailed(f"girth >= 6 unreachable even at d=2 for (M,N)=({M},{N})")
    return DmaxResult(d_max=best[0], matrix=best[1], theoretical_bound=bound)
