"""Jacobi eigensolver against independent oracles; sampled Gram statistics."""

import math

import numpy as np
import pytest

from bincs.errors import KTooLarge, NotSymmetric
from bincs.matrix_core import from_supports
from bincs.spectral import (
    empirical_ric,
    extreme_eigenvalues,
    gram_eigenvalue_bounds,
    offdiag_proportion_stats,
)

FANO = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def cubic_extreme_roots(S):
    """Extreme eigenvalues of a symmetric 3x3 via its characteristic cubic.

    The monic cubic p(x) = x^3 - tr x^2 + m2 x - det has three real roots
    for symmetric S; the critical points of p isolate the outer roots,
    which bisection then pins down.  Independent of any matrix iteration.
    """
    tr = S[0, 0] + S[1, 1] + S[2, 2]
    m2 = (
        S[0, 0] * S[1, 1]
        - S[0, 1] * S[1, 0]
        + S[0, 0] * S[2, 2]
        - S[0, 2] * S[2, 0]
        + S[1, 1] * S[2, 2]
        - S[1, 2] * S[2, 1]
    )
    det = float(np.linalg.det(S))

    def p(x):
        return ((x - tr) * x + m2) * x - det

    disc = 4 * tr * tr - 12 * m2
    if disc <= 0:
        return tr / 3, tr / 3
    t1 = (2 * tr - math.sqrt(disc)) / 6
    t2 = (2 * tr + math.sqrt(disc)) / 6
    radius = max(abs(S[i, 0]) + abs(S[i, 1]) + abs(S[i, 2]) for i in range(3)) + 1.0

    def bisect(lo, hi):
        flo = p(lo)
        for _ in range(200):
            mid = (lo + hi) / 2
            fmid = p(mid)
            if fmid == 0.0:
                return mid
            if (flo < 0) == (fmid < 0):
                lo, flo = mid, fmid
            else:
                hi = mid
        return (lo + hi) / 2

    return bisect(-radius, t1), bisect(t2, radius)


def test_identity_eigenvalues():
    for k in (1, 2, 5, 9):
        res = extreme_eigenvalues(np.eye(k))
        assert res.lambda_max == res.lambda_min == 1.0
        assert res.converged


def test_uniform_offdiagonal_closed_form():
    # I + c(J - I) has eigenvalues 1 + (k-1)c and 1 - c.
    for k in range(2, 21):
        for c in (1 / 7, 0.03, -0.02):
            S = np.full((k, k), c)
            np.fill_diagonal(S, 1.0)
            res = extreme_eigenvalues(S)
            expected = sorted([1 + (k - 1) * c, 1 - c])
            assert abs(res.lambda_min - expected[0]) <= 1e-12
            assert abs(res.lambda_max - expected[1]) <= 1e-12


def test_random_3x3_against_characteristic_cubic():
    rng = np.random.Generator(np.random.PCG64(31))
    for _ in range(300):
        B = rng.standard_normal((3, 3))
        S = (B + B.T) / 2
        res = extreme_eigenvalues(S)
        lo, hi = cubic_extreme_roots(S)
        assert abs(res.lambda_min - lo) <= 1e-10
        assert abs(res.lambda_max - hi) <= 1e-10


def test_random_kxk_against_numpy():
    rng = np.random.Generator(np.random.PCG64(13))
    for _ in range(40):
        k = int(rng.integers(2, 16))
        B = rng.standard_normal((k, k))
        S = (B + B.T) / 2
        res = extreme_eigenvalues(S)
        w = np.linalg.eigvalsh(S)
        assert abs(res.lambda_min - w[0]) <= 1e-10
        assert abs(res.lambda_max - w[-1]) <= 1e-10
        assert res.converged


def test_trace_preserved():
    rng = np.random.Generator(np.random.PCG64(8))
    B = rng.standard_normal((9, 9))
    S = (B + B.T) / 2
    res = extreme_eigenvalues(S)
    assert res.converged
    # The sweep is a similarity transform, so extreme values bracket the trace mean.
    assert res.lambda_min <= np.trace(S) / 9 <= res.lambda_max


def test_not_symmetric_raises():
    with pytest.raises(NotSymmetric):
        extreme_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotSymmetric):
        extreme_eigenvalues(np.zeros((2, 3)))


def test_fano_pairs_have_exact_eigenvalues():
    A = from_supports(7, 7, 3, FANO)
    rep = empirical_ric(A, 2, 30, seed=5)
    # every pair overlaps in exactly one row: eigenvalues 1 +- 1/3
    assert abs(rep.delta_hat - 1 / 3) <= 1e-12
    assert rep.bound_violations == 0


def test_empirical_ric_k1_is_zero():
    A = from_supports(7, 7, 3, FANO)
    rep = empirical_ric(A, 1, 10, seed=0)
    assert rep.delta_hat == 0.0


def test_empirical_ric_k_too_large():
    A = from_supports(7, 7, 3, FANO)
    with pytest.raises(KTooLarge):
        empirical_ric(A, 8, 10, seed=0)


def test_empirical_ric_deterministic_in_seed():
    A = from_supports(7, 7, 3, FANO)
    a = empirical_ric(A, 3, 25, seed=42)
    b = empirical_ric(A, 3, 25, seed=42)
    assert a == b
    c = empirical_ric(A, 3, 25, seed=43)
    assert a.seed != c.seed


def test_gram_eigenvalue_bounds_girth_gt4():
    lo, hi = gram_eigenvalue_bounds(4, 7, 1, 200)
    assert float(lo) == 1 - 4 / 14
    assert float(hi) == (4 + 7 - 1) / 7


def test_offdiag_fano_all_ones():
    A = from_supports(7, 7, 3, FANO)
    stats = offdiag_proportion_stats(A, 4, 50, seed=1)
    assert stats.p_min == stats.p_mean == stats.p_max == 1.0


def test_offdiag_disjoint_all_zero():
    A = from_supports(8, 4, 2, [{0, 1}, {2, 3}, {4, 5}, {6, 7}])
    stats = offdiag_proportion_stats(A, 3, 40, seed=2)
    assert stats.p_min == stats.p_mean == stats.p_max == 0.0


def test_offdiag_bounds_ordering():
    rng = np.random.Generator(np.random.PCG64(77))
    sups = set()
    while len(sups) < 20:
        sups.add(tuple(sorted(rng.choice(16, size=4, replace=False).tolist())))
    A = from_supports(16, 20, 4, sorted(sups))
    stats = offdiag_proportion_stats(A, 5, 60, seed=3)
    assert 0.0 <= stats.p_min <= stats.p_mean <= stats.p_max <= 1.0


def test_girth4_coherence_bounds_certified():
    # Max overlap 2 with d=3: girth-4 class, coherence 2/3.  The sampled
    # extreme eigenvalues must respect the coherence-branch bounds.
    supports = [
        (0, 1, 2), (0, 1, 3), (4, 5, 6), (4, 5, 7),
        (8, 9, 10), (8, 9, 11), (2, 6, 10), (3, 7, 11),
    ]
    A = from_supports(12, 8, 3, supports)
    from bincs.matrix_core import correlation_spectrum

    assert correlation_spectrum(A).max_overlap == 2
    for k in (2, 3, 4):
        rep = empirical_ric(A, k, 200, seed=9)
        lo, hi = gram_eigenvalue_bounds(k, 3, 2, 12)
        assert rep.bound_lambda_min == float(lo)
        assert rep.bound_lambda_max == float(hi)
        assert rep.bound_violations == 0


def test_concentration_fraction_bounds():
    from bincs.spectral import offdiag_concentration

    A = from_supports(7, 7, 3, FANO)
    # every pair correlated: p == 1 always, so concentration at target 1 is total
    assert offdiag_concentration(A, 3, 40, seed=0, target=1.0) == 1.0
    assert offdiag_concentration(A, 3, 40, seed=0, target=0.5) == 0.0
