"""Exactness of the closed-form restricted-isometry and correlation laws."""

import math
from fractions import Fraction

import pytest

from bincs.errors import (
    InfeasibleParameters,
    InvalidRange,
    ParameterOutOfBranch,
    SideConditionViolated,
)
from bincs.rip_theory import (
    CONDITION_FAILS,
    NEAR_OPTIMAL_BETTER,
    UNBOUNDED,
    coherence_k_bound,
    correlated_pair_probability,
    near_optimal_dominance,
    overlap_pmf,
    ric_asymptotic,
    ric_girth4,
    ric_girth_gt4,
)


def test_coherence_k_bound_values():
    assert coherence_k_bound(Fraction(1, 7)) == 3
    assert coherence_k_bound(1) == 0
    assert coherence_k_bound(Fraction(2, 7)) == 2
    assert coherence_k_bound(0) == UNBOUNDED


def test_coherence_k_bound_rejects_out_of_range():
    with pytest.raises(InvalidRange):
        coherence_k_bound(Fraction(3, 2))


def test_coherence_k_bound_is_tight():
    # k must satisfy k < (1 + 1/mu)/2 and k+1 must not.
    for num, den in [(1, 7), (2, 7), (1, 3), (3, 5), (1, 100)]:
        mu = Fraction(num, den)
        k = coherence_k_bound(mu)
        limit = (1 + 1 / mu) / 2
        assert k < limit <= k + 1


def test_correlated_pair_probability_values():
    assert correlated_pair_probability(200, 400, 7) == Fraction(18200, 79800)
    assert correlated_pair_probability(7, 7, 3) == 1
    assert correlated_pair_probability(200, 400, 2) == Fraction(1200, 79800)


def test_correlated_pair_probability_infeasible():
    with pytest.raises(InfeasibleParameters):
        correlated_pair_probability(7, 7, 4)
    with pytest.raises(InfeasibleParameters):
        correlated_pair_probability(200, 400, 15)


def hypergeom_oracle(M, d, s):
    return Fraction(math.comb(d, s) * math.comb(M - d, d - s), math.comb(M, d))


def test_overlap_pmf_against_hypergeometric_oracle():
    assert overlap_pmf(6, 2, 0) == Fraction(2, 5) == hypergeom_oracle(6, 2, 0)
    assert overlap_pmf(6, 2, 1) == Fraction(8, 15) == hypergeom_oracle(6, 2, 1)
    for M in (5, 9, 16, 33):
        for d in range(1, M + 1):
            for s in range(0, d + 1):
                assert overlap_pmf(M, d, s) == hypergeom_oracle(M, d, s), (M, d, s)


def test_overlap_pmf_identical_support_case():
    for M, d in [(6, 3), (10, 4), (17, 8)]:
        assert overlap_pmf(M, d, d) == Fraction(1, math.comb(M, d))


def test_overlap_pmf_out_of_support_is_zero():
    assert overlap_pmf(5, 3, 0) == 0  # would need 6 distinct rows in 5


def test_overlap_pmf_sums_to_one():
    for M in (2, 7, 12, 25):
        for d in range(1, M + 1):
            assert sum(overlap_pmf(M, d, s) for s in range(d + 1)) == 1


def test_ric_girth_gt4_values():
    assert ric_girth_gt4(2, 7).delta_k == Fraction(1, 7)
    assert ric_girth_gt4(10, 7).delta_k == Fraction(28, 36) == Fraction(7, 9)
    for d in (2, 5, 11):
        assert ric_girth_gt4(1, d).delta_k == Fraction(1, 4 * d - 1)


def test_ric_girth_gt4_decreasing_in_d():
    for k in (2, 3, 8, 40):
        values = [ric_girth_gt4(k, d).delta_k for d in range(2, 30)]
        assert all(a > b for a, b in zip(values, values[1:]))


def test_ric_girth_gt4_delta2_matches_coherence():
    # At k = 2 the bound coincides with the coherence 1/d.
    for d in range(2, 12):
        assert ric_girth_gt4(2, d).delta_k == Fraction(1, d)


def test_ric_girth4_values():
    low = ric_girth4(4, 7, 2, 200)
    assert low.delta_k == Fraction(20, 32) == Fraction(5, 8)
    assert low.formula_id == "GIRTH4_LOW"
    high = ric_girth4(3, 8, 6, 10)
    assert high.delta_k == Fraction(36, 44) == Fraction(9, 11)
    assert high.formula_id == "GIRTH4_HIGH"


def test_ric_girth4_branch_validation():
    with pytest.raises(ParameterOutOfBranch):
        ric_girth4(4, 7, 1, 200)  # s < 2 in the low branch
    with pytest.raises(ParameterOutOfBranch):
        ric_girth4(4, 7, 7, 200)  # s > d-1
    with pytest.raises(ParameterOutOfBranch):
        ric_girth4(3, 8, 5, 10)  # s < 2d-M in the high branch


def test_girth_gt4_beats_girth4_at_equal_degree():
    # The girth>4 bound is strictly smaller wherever both formulas apply.
    for M in (20, 60, 200):
        for d in range(3, M // 2 + 1, max(1, M // 20)):
            for s in range(2, d):
                for k in (3, 5, 10, 50):
                    lhs = ric_girth_gt4(k, d).delta_k
                    rhs = ric_girth4(k, d, s, M).delta_k
                    assert lhs < rhs, (M, d, s, k)


def test_ric_asymptotic_matches_float_oracle():
    for k, d, rho in [(50, 7, 0.2281), (10, 7, 0.9), (200, 3, 0.05), (30, 14, 0.4)]:
        got = ric_asymptotic(k, d, rho).delta_k
        root = 2.0 * math.sqrt(k * rho * (1.0 - rho))
        expected = (k * rho + root + 1.0) / (k * rho - root + 2 * d + 1)
        assert abs(got - expected) <= 1e-12


def test_ric_asymptotic_side_conditions():
    with pytest.raises(SideConditionViolated):
        ric_asymptotic(2, 7, 0.2281)  # k(k-1)rho < 2
    with pytest.raises(SideConditionViolated):
        ric_asymptotic(50, 7, 0.0)
    with pytest.raises(SideConditionViolated):
        ric_asymptotic(50, 7, 1.0)
    result = ric_asymptotic(50, 7, 0.2281)
    assert any("asymptotic" in note for note in result.validity)


def test_dominance_examples():
    r = near_optimal_dominance(7, 8, 2, 200, 5)
    assert r.verdict == NEAR_OPTIMAL_BETTER and r.condition == "moderate_degree"
    assert r.threshold == Fraction(4)
    r = near_optimal_dominance(3, 8, 2, 200, 5)
    assert r.verdict == CONDITION_FAILS
    r = near_optimal_dominance(7, 150, 100, 200, 50)
    assert r.verdict == NEAR_OPTIMAL_BETTER and r.condition == "high_degree"
    assert r.threshold == Fraction(51 * 100, 800)


def test_dominance_low_degree_unconditional():
    r = near_optimal_dominance(7, 5, 3, 200, 10)
    assert r.verdict == NEAR_OPTIMAL_BETTER
    assert r.condition == "degree_within_dmax"


def test_dominance_invalid_range():
    from bincs.errors import InvalidRange as IR

    with pytest.raises(IR):
        near_optimal_dominance(7, 199, 2, 200, 5)


def test_delta_positive_for_k_at_least_2():
    for k in range(2, 40):
        for d in range(2, 20):
            assert ric_girth_gt4(k, d).delta_k > 0


def test_pair_probability_equals_measured_fraction_on_regular_matrices():
    """On a girth>4 matrix with exactly N*d/M nonzeros per row, the counting
    argument behind the pair-correlation probability is exact, so it must
    equal the measured fraction of correlated column pairs."""
    from collections import Counter

    from bincs.construction import PegConfig
    from bincs.matrix_core import correlation_spectrum, from_supports

    from bincs.construction import TIE_SEEDED_RANDOM, peg_construct
    from bincs.bipartite_graph import compute_girth

    fano = from_supports(7, 7, 3, [
        (0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5),
    ])
    assert correlation_spectrum(fano).correlated_fraction() == correlated_pair_probability(7, 7, 3)

    # Randomized PEG caps row degrees at N*d/M, so a girth>4 hit at a
    # divisible size is exactly row regular.
    M, N, d = 20, 40, 3
    for seed in range(30):
        A = peg_construct(M, N, d, PegConfig(tie_break=TIE_SEEDED_RANDOM, seed=seed))
        deg = Counter(r for sup in A.supports for r in sup)
        regular = len(deg) == M and len(set(deg.values())) == 1
        if regular and compute_girth(A.to_graph()).global_girth > 4:
            assert correlation_spectrum(A).correlated_fraction() == correlated_pair_probability(M, N, d)
            break
    else:
        pytest.fail("no exactly-regular girth>4 PEG draw in 30 seeds")
