"""Regular {0,1} sensing matrices in column-support form.

A matrix is stored as the sorted row-index set of each column; the
nonzero amplitude is implicitly 1/sqrt(d) so columns have unit norm.
This module owns correlation analysis (pairwise overlap histogram and
coherence), Gram submatrix extraction, and the text file format.

Correlation values are kept as exact rationals (integer overlap over
integer degree) so structural tests need no floating-point tolerance.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import bipartite_graph
from .errors import (
    DuplicateColumn,
    DuplicateIndexInT,
    InconsistentHeader,
    IndexOutOfRange,
    IrregularColumn,
    ParseError,
)


@dataclass(frozen=True)
class SensingMatrix:
    """Regular binary matrix: N columns, each with d nonzero rows out of M.

    Supports are sorted tuples; no two columns are identical.  The
    represented real matrix has entries 1/sqrt(d) at the support
    positions and 0 elsewhere.
    """

    M: int
    N: int
    d: int
    supports: tuple[tuple[int, ...], ...]

    def to_graph(self) -> bipartite_graph.BipartiteGraph:
        return bipartite_graph.build_graph(self.M, self.N, self.supports)

    def to_dense(self) -> np.ndarray:
        """Explicit M x N array with normalized columns."""
        A = np.zeros((self.M, self.N))
        scale = 1.0 / np.sqrt(self.d)
        for j, sup in enumerate(self.supports):
            A[list(sup), j] = scale
        return A


@dataclass(frozen=True)
class CorrelationSpectrum:
    """Histogram of pairwise support overlaps.

    ``overlap_counts[s]`` is the number of unordered column pairs sharing
    exactly s rows, for s = 0..d.  ``coherence_mu`` is s_max/d where
    s_max is the largest overlap that occurs (0 if all pairs are
    disjoint).
    """

    overlap_counts: tuple[int, ...]
    coherence_mu: Fraction

    @property
    def max_overlap(self) -> int:
        """Largest s >= 1 with a nonzero pair count (0 if none)."""
        for s in range(len(self.overlap_counts) - 1, 0, -1):
            if self.overlap_counts[s] > 0:
                return s
        return 0

    def correlated_fraction(self) -> Fraction:
        """Exact fraction of column pairs with nonzero overlap."""
        total = sum(self.overlap_counts)
        if total == 0:
            return Fraction(0)
        return Fraction(total - self.overlap_counts[0], total)


@dataclass(frozen=True)
class GramSubmatrix:
    """Normalized Gram block for a column subset T: entries overlap/d, diagonal 1."""

    column_indices: tuple[int, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def k(self) -> int:
        return len(self.column_indices)

    def to_ndarray(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])


def from_supports(M: int, N: int, d: int, supports: Sequence[Iterable[int]]) -> SensingMatrix:
    """Validate and freeze a regular binary matrix given per-column supports.

    Raises IrregularColumn if any column does not have exactly d distinct
    rows, IndexOutOfRange for a bad row index, and DuplicateColumn if two
    columns coincide.
    """
    if len(supports) != N:
        raise IrregularColumn(f"expected {N} columns, got {len(supports)}")
    if d < 1 or d > M:
        raise IrregularColumn(f"column degree {d} not in [1, {M}]")
    cols: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for j, sup in enumerate(supports):
        rows = sorted(sup)
        if len(set(rows)) != len(rows) or len(rows) != d:
            raise IrregularColumn(f"column {j} has {len(set(rows))} distinct rows, expected {d}")
        if rows[0] < 0 or rows[-1] >= M:
            raise IndexOutOfRange(f"column {j}: row index outside [0, {M})")
        col = tuple(rows)
        if col in seen:
            raise DuplicateColumn(f"column {j} duplicates an earlier column")
        seen.add(col)
        cols.append(col)
    return SensingMatrix(M=M, N=N, d=d, supports=tuple(cols))


def correlation_spectrum(A: SensingMatrix) -> CorrelationSpectrum:
    """Exact overlap histogram over all N(N-1)/2 column pairs.

    Accumulates co-occurrences row by row, which costs the sum of squared
    row degrees instead of N^2 * d.
    """
    row_members: list[list[int]] = [[] for _ in range(A.M)]
    for j, sup in enumerate(A.supports):
        for i in sup:
            row_members[i].append(j)
    pair_overlap: Counter[tuple[int, int]] = Counter()
    for members in row_members:
        for pair in itertools.combinations(members, 2):
            pair_overlap[pair] += 1
    counts = [0] * (A.d + 1)
    for overlap in pair_overlap.values():
        counts[overlap] += 1
    total_pairs = A.N * (A.N - 1) // 2
    counts[0] = total_pairs - len(pair_overlap)
    s_max = 0
    for s in range(A.d, 0, -1):
        if counts[s] > 0:
            s_max = s
            break
    return CorrelationSpectrum(
        overlap_counts=tuple(counts),
        coherence_mu=Fraction(s_max, A.d),
    )


def gram_submatrix(A: SensingMatrix, T: Sequence[int]) -> GramSubmatrix:
    """Normalized Gram block for the column subset T (exact rationals)."""
    idx = list(T)
    if not idx:
        raise IndexOutOfRange("T must contain at least one column index")
    if len(set(idx)) != len(idx):
        raise DuplicateIndexInT(f"T = {idx} repeats a column index")
    for j in idx:
        if not 0 <= j < A.N:
            raise IndexOutOfRange(f"column index {j} not in [0, {A.N})")
    sets = [frozenset(A.supports[j]) for j in idx]
    k = len(idx)
    one = Fraction(1)
    entries = []
    for a in range(k):
        row = []
        for b in range(k):
            if a == b:
                row.append(one)
            else:
                row.append(Fraction(len(sets[a] & sets[b]), A.d))
        entries.append(tuple(row))
    return GramSubmatrix(column_indices=tuple(idx), entries=tuple(entries))


def _format_girth(g: float) -> str:
    return "inf" if g == bipartite_graph.INFINITE else str(int(g))


def write_matrix(A: SensingMatrix, path) -> None:
    """Serialize to the text format (UTF-8, LF endings, bit-exact).

    Line 1 is ``M N d``, line 2 is ``girth G`` (recomputed here), then
    one line per column with its d ascending row indices.
    """
    report = bipartite_graph.compute_girth(A.to_graph())
    lines = [f"{A.M} {A.N} {A.d}", f"girth {_format_girth(report.global_girth)}"]
    lines.extend(" ".join(str(i) for i in sup) for sup in A.supports)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> SensingMatrix:
    """Parse a matrix file, re-validating structure and the declared girth.

    Raises ParseError (with line number) for malformed content and
    InconsistentHeader when the declared degree or girth disagrees with
    the column data.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def ints(line_no: int, text: str) -> list[int]:
        try:
            return [int(tok) for tok in text.split()]
        except ValueError:
            raise ParseError(line_no, f"expected integers, got {text!r}") from None

    if not lines:
        raise ParseError(1, "empty file")
    header = ints(1, lines[0])
    if len(header) != 3:
        raise ParseError(1, "header must be 'M N d'")
    M, N, d = header
    if M < 1 or N < 1 or d < 1:
        raise ParseError(1, f"nonpositive dimensions in header {header}")
    if len(lines) < 2:
        raise ParseError(2, "missing girth line")
    girth_tokens = lines[1].split()
    if len(girth_tokens) != 2 or girth_tokens[0] != "girth":
        raise ParseError(2, "expected 'girth G'")
    if girth_tokens[1] == "inf":
        declared_girth = bipartite_graph.INFINITE
    else:
        try:
            declared_girth = int(girth_tokens[1])
        except ValueError:
            raise ParseError(2, f"bad girth value {girth_tokens[1]!r}") from None
    if len(lines) != N + 2:
        raise ParseError(min(len(lines), N + 2) + 1, f"expected {N} column lines, found {len(lines) - 2}")
    supports = []
    for j in range(N):
        line_no = j + 3
        rows = ints(line_no, lines[j + 2])
        if len(rows) != d:
            raise InconsistentHeader(f"line {line_no}: column {j} lists {len(rows)} indices, header declares d={d}")
        if any(rows[i] >= rows[i + 1] for i in range(len(rows) - 1)):
            raise ParseError(line_no, "row indices must be strictly ascending")
        supports.append(rows)
    A = from_supports(M, N, d, supports)
    report = bipartite_graph.compute_girth(A.to_graph())
    if report.global_girth != declared_girth:
        raise InconsistentHeader(
            f"declared girth {_format_girth(declared_girth)} but matrix has girth "
            f"{_format_girth(report.global_girth)}"
        )
    return A
