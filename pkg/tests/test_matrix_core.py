"""SensingMatrix validation, correlation spectrum, Gram blocks, file round trips."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from bincs.errors import (
    DuplicateColumn,
    DuplicateIndexInT,
    InconsistentHeader,
    IndexOutOfRange,
    IrregularColumn,
    ParseError,
)
from bincs.matrix_core import (
    correlation_spectrum,
    from_supports,
    gram_submatrix,
    read_matrix,
    write_matrix,
)

FANO = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def fano_matrix():
    return from_supports(7, 7, 3, FANO)


def test_disjoint_two_column_matrix():
    A = from_supports(4, 2, 2, [{0, 1}, {2, 3}])
    spec = correlation_spectrum(A)
    assert spec.coherence_mu == 0
    assert spec.overlap_counts == (1, 0, 0)


def test_duplicate_column_rejected():
    with pytest.raises(DuplicateColumn):
        from_supports(4, 2, 2, [{0, 1}, {0, 1}])


def test_irregular_column_rejected():
    with pytest.raises(IrregularColumn):
        from_supports(4, 2, 2, [{0, 1}, {0, 1, 2}])
    with pytest.raises(IrregularColumn):
        from_supports(4, 1, 2, [[1, 1]])


def test_out_of_range_rejected():
    with pytest.raises(IndexOutOfRange):
        from_supports(4, 1, 2, [{0, 4}])


def test_fano_every_pair_overlaps_once():
    spec = correlation_spectrum(fano_matrix())
    # enumeration oracle
    counts = [0] * 4
    for a, b in itertools.combinations(FANO, 2):
        counts[len(set(a) & set(b))] += 1
    assert spec.overlap_counts == tuple(counts) == (0, 21, 0, 0)
    assert spec.coherence_mu == Fraction(1, 3)
    assert spec.max_overlap == 1


def test_known_overlap_two_of_three():
    A = from_supports(4, 2, 3, [{0, 1, 2}, {0, 1, 3}])
    spec = correlation_spectrum(A)
    assert spec.overlap_counts == (0, 0, 1, 0)
    assert spec.coherence_mu == Fraction(2, 3)


def test_spectrum_invariant_under_column_permutation():
    rng = np.random.Generator(np.random.PCG64(12))
    supports = [sorted(rng.choice(8, size=3, replace=False).tolist()) for _ in range(10)]
    while len({tuple(s) for s in supports}) < 10:
        supports = [sorted(rng.choice(8, size=3, replace=False).tolist()) for _ in range(10)]
    A = from_supports(8, 10, 3, supports)
    perm = rng.permutation(10)
    B = from_supports(8, 10, 3, [supports[i] for i in perm])
    assert correlation_spectrum(A) == correlation_spectrum(B)


def test_spectrum_total_is_all_pairs():
    rng = np.random.Generator(np.random.PCG64(3))
    for _ in range(10):
        M, N, d = 12, 9, 4
        sups = set()
        while len(sups) < N:
            sups.add(tuple(sorted(rng.choice(M, size=d, replace=False).tolist())))
        A = from_supports(M, N, d, sorted(sups))
        spec = correlation_spectrum(A)
        assert sum(spec.overlap_counts) == N * (N - 1) // 2


def test_gram_singleton_is_identity():
    g = gram_submatrix(fano_matrix(), [3])
    assert g.entries == ((Fraction(1),),)


def test_gram_fano_triple():
    g = gram_submatrix(fano_matrix(), [0, 1, 2])
    third = Fraction(1, 3)
    assert g.entries == (
        (Fraction(1), third, third),
        (third, Fraction(1), third),
        (third, third, Fraction(1)),
    )


def test_gram_disjoint_pair_is_identity():
    A = from_supports(4, 2, 2, [{0, 1}, {2, 3}])
    g = gram_submatrix(A, [0, 1])
    assert g.to_ndarray().tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_gram_errors():
    A = fano_matrix()
    with pytest.raises(DuplicateIndexInT):
        gram_submatrix(A, [0, 0])
    with pytest.raises(IndexOutOfRange):
        gram_submatrix(A, [0, 7])


def test_gram_matches_dense_dot_products():
    rng = np.random.Generator(np.random.PCG64(21))
    for _ in range(5):
        M, N, d = 15, 12, 4
        sups = set()
        while len(sups) < N:
            sups.add(tuple(sorted(rng.choice(M, size=d, replace=False).tolist())))
        A = from_supports(M, N, d, sorted(sups))
        dense = A.to_dense()
        T = sorted(rng.choice(N, size=5, replace=False).tolist())
        G = gram_submatrix(A, T).to_ndarray()
        brute = dense[:, T].T @ dense[:, T]
        assert np.max(np.abs(G - brute)) < 1e-12


def test_girth_gt4_implies_no_multi_overlap():
    spec = correlation_spectrum(fano_matrix())
    assert all(c == 0 for c in spec.overlap_counts[2:])


def test_file_round_trip(tmp_path):
    path = tmp_path / "fano.mat"
    A = fano_matrix()
    write_matrix(A, path)
    B = read_matrix(path)
    assert B == A
    # re-serialization is byte stable
    path2 = tmp_path / "fano2.mat"
    write_matrix(B, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_file_format_exact_bytes(tmp_path):
    path = tmp_path / "two.mat"
    write_matrix(from_supports(4, 2, 2, [{0, 1}, {2, 3}]), path)
    assert path.read_text() == "4 2 2\ngirth inf\n0 1\n2 3\n"


def test_hand_written_file_parses(tmp_path):
    path = tmp_path / "hand.mat"
    path.write_text("4 2 2\ngirth inf\n0 1\n2 3\n")
    A = read_matrix(path)
    assert A.supports == ((0, 1), (2, 3))


def test_degree_mismatch_is_inconsistent_header(tmp_path):
    path = tmp_path / "bad.mat"
    path.write_text("4 2 3\ngirth inf\n0 1\n2 3\n")
    with pytest.raises(InconsistentHeader):
        read_matrix(path)


def test_wrong_girth_declaration_rejected(tmp_path):
    path = tmp_path / "bad.mat"
    path.write_text("4 2 2\ngirth 4\n0 1\n2 3\n")
    with pytest.raises(InconsistentHeader):
        read_matrix(path)


def test_parse_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.mat"
    path.write_text("4 2 2\ngirth inf\n0 x\n2 3\n")
    with pytest.raises(ParseError) as err:
        read_matrix(path)
    assert err.value.line == 3
    path.write_text("4 2 2\nnot-girth\n0 1\n2 3\n")
    with pytest.raises(ParseError) as err:
        read_matrix(path)
    assert err.value.line == 2
    path.write_text("4 2 2\ngirth inf\n1 0\n2 3\n")
    with pytest.raises(ParseError):
        read_matrix(path)
