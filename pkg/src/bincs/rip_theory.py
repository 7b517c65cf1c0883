"""Closed-form restricted-isometry and correlation laws for regular binary matrices.

Normalized regular {0,1/sqrt(d)} matrices admit exact expressions for
their restricted-isometry constants, driven entirely by the bipartite
girth and the maximum column correlation s/d:

* girth > 4: off-diagonal Gram entries are 0 or 1/d, giving
  delta_k = (3k-2)/(4d+k-2)                              (FORMULA_GIRTH_GT4)
* large k, girth > 4: a semicircle-law estimate with the pair-correlation
  probability rho                                        (FORMULA_ASYMPTOTIC)
* girth = 4 with coherence s/d: a two-branch formula in (k, d, s, M)
  (FORMULA_GIRTH4_LOW / FORMULA_GIRTH4_HIGH)

All rational formulas are evaluated in exact Fraction arithmetic; only
the asymptotic estimate (a square root) uses floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import (
    InfeasibleParameters,
    InvalidRange,
    ParameterOutOfBranch,
    SideConditionViolated,
)

UNBOUNDED = math.inf
"""Sentinel for quantities without a finite bound (e.g. sparsity at zero coherence)."""

FORMULA_GIRTH_GT4 = "GIRTH_GT4"
FORMULA_ASYMPTOTIC = "ASYMPTOTIC"
FORMULA_GIRTH4_LOW = "GIRTH4_LOW"
FORMULA_GIRTH4_HIGH = "GIRTH4_HIGH"

NEAR_OPTIMAL_BETTER = "NEAR_OPTIMAL_BETTER"
CONDITION_FAILS = "CONDITION_FAILS"


@dataclass(frozen=True)
class RicFormulaResult:
    """A closed-form delta_k value plus the formula identity that produced it.

    ``validity`` lists the side conditions that were checked, including
    caveats (the asymptotic formula is only an approximation at finite k).
    """

    delta_k: Union[Fraction, float]
    formula_id: str
    inputs: dict
    validity: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class DominanceVerdict:
    """Outcome of comparing the degree-d_max girth>4 matrix against a girth-4 rival."""

    verdict: str
    condition: str
    threshold: Union[Fraction, None]


def coherence_k_bound(mu) -> Union[int, float]:
    """Largest sparsity k admissible at coherence mu: k < (1 + 1/mu)/2.

    Returns UNBOUNDED for mu = 0 (pairwise-disjoint columns).
    """
    mu = Fraction(mu)
    if mu == 0:
        return UNBOUNDED
    if not 0 < mu <= 1:
        raise InvalidRange(f"coherence {mu} not in (0, 1]")
    bound = (1 + 1 / mu) / 2
    if bound.denominator == 1:
        return bound.numerator - 1
    return bound.numerator // bound.denominator


def correlated_pair_probability(M: int, N: int, d: int) -> Fraction:
    """Probability that two distinct columns of a girth>4 regular matrix correlate.

    Each column meets d*(N*d/M - 1) others through exactly one shared
    row, so the pair probability is (N*d^2 - M*d) / ((N-1)*M), exactly.
    Raises InfeasibleParameters when the value exceeds 1, i.e. when d is
    beyond the girth>4 capacity of (M, N).
    """
    if N < 2 or M < 1 or d < 1:
        raise InvalidRange(f"need N >= 2, M >= 1, d >= 1; got ({M}, {N}, {d})")
    rho = Fraction(N * d * d - M * d, (N - 1) * M)
    if rho > 1:
        raise InfeasibleParameters(f"rho = {rho} > 1: no girth>4 matrix exists at ({M}, {N}, {d})")
    if rho < 0:
        raise InfeasibleParameters(f"rho = {rho} < 0: fewer edges than rows at ({M}, {N}, {d})")
    return rho


def overlap_pmf(M: int, d: int, s: int) -> Fraction:
    """Probability that two independent uniform d-subsets of M rows share exactly s.

    Evaluated from the factorial form
    d! d! (M-d)! (M-d)! / ((d-s)! (d-s)! s! (M-2d+s)! M!),
    which equals the hypergeometric mass C(d,s) C(M-d,d-s) / C(M,d).
    Returns 0 outside the support (M - 2d + s < 0).
    """
    if not 0 <= s <= d:
        raise InvalidRange(f"overlap s={s} not in [0, d={d}]")
    if d > M:
        raise InvalidRange(f"degree d={d} exceeds M={M}")
    if M - 2 * d + s < 0:
        return Fraction(0)
    f = math.factorial
    return Fraction(
        f(d) * f(d) * f(M - d) * f(M - d),
        f(d - s) * f(d - s) * f(s) * f(M - 2 * d + s) * f(M),
    )


def ric_girth_gt4(k: int, d: int) -> RicFormulaResult:
    """Worst-case RIC for a girth>4 regular binary matrix of degree d.

    delta_k = (3k-2)/(4d+k-2), exact.  Strictly decreasing in d, which is
    what makes the largest constructible degree the preferred matrix.
    """
    if k < 1 or d < 2:
        raise InvalidRange(f"need k >= 1 and d >= 2; got k={k}, d={d}")
    return RicFormulaResult(
        delta_k=Fraction(3 * k - 2, 4 * d + k - 2),
        formula_id=FORMULA_GIRTH_GT4,
        inputs={"k": k, "d": d},
        validity=("girth > 4 (off-diagonal Gram entries in {0, 1/d})",),
    )


def ric_asymptotic(k: int, d: int, rho: float) -> RicFormulaResult:
    """Semicircle-law RIC estimate for girth>4 matrices at large k.

    delta_k = (k*rho + 2*sqrt(k*rho*(1-rho)) + 1)
            / (k*rho - 2*sqrt(k*rho*(1-rho)) + 2d + 1).
    Requires the pair-correlation side condition k*(k-1)*rho >= 2 and
    0 < rho < 1; the value is an approximation that sharpens as k grows.
    """
    rho = float(rho)
    if not 0.0 < rho < 1.0:
        raise SideConditionViolated(f"rho = {rho} not in (0, 1)")
    if k * (k - 1) * rho < 2:
        raise SideConditionViolated(f"k(k-1)rho = {k * (k - 1) * rho:.4g} < 2 at k={k}")
    root = 2.0 * math.sqrt(k * rho * (1.0 - rho))
    denom = k * rho - root + 2 * d + 1
    if denom <= 0:
        raise SideConditionViolated(f"denominator {denom:.4g} <= 0 at (k={k}, d={d}, rho={rho})")
    return RicFormulaResult(
        delta_k=(k * rho + root + 1.0) / denom,
        formula_id=FORMULA_ASYMPTOTIC,
        inputs={"k": k, "d": d, "rho": rho},
        validity=(
            "k(k-1)*rho >= 2 satisfied",
            "asymptotic: exact only in the large-k limit",
        ),
    )


def ric_girth4(k: int, d: int, s: int, M: int) -> RicFormulaResult:
    """Worst-case RIC for a girth-4 regular matrix with coherence s/d.

    Low branch  (3 <= d <= M/2,   2 <= s <= d-1):
        delta_k = (3k-2)s / ((k-2)s + 4d)
    High branch (M/2 < d <= M-2,  2d-M <= s <= d-1):
        delta_k = ((3k-2)s + (k-2)(M-2d)) / ((k-2)s - (M-2d)k + 2M)
    Inputs fitting neither branch raise ParameterOutOfBranch.
    """
    if k < 1:
        raise InvalidRange(f"need k >= 1; got k={k}")
    if 3 <= d and 2 * d <= M and 2 <= s <= d - 1:
        return RicFormulaResult(
            delta_k=Fraction((3 * k - 2) * s, (k - 2) * s + 4 * d),
            formula_id=FORMULA_GIRTH4_LOW,
            inputs={"k": k, "d": d, "s": s, "M": M},
            validity=("3 <= d <= M/2", "2 <= s <= d-1"),
        )
    if 2 * d > M and d <= M - 2 and 2 * d - M <= s <= d - 1:
        return RicFormulaResult(
            delta_k=Fraction(
                (3 * k - 2) * s + (k - 2) * (M - 2 * d),
                (k - 2) * s - (M - 2 * d) * k + 2 * M,
            ),
            formula_id=FORMULA_GIRTH4_HIGH,
            inputs={"k": k, "d": d, "s": s, "M": M},
            validity=("M/2 < d <= M-2", "2d-M <= s <= d-1"),
        )
    raise ParameterOutOfBranch(f"(d={d}, s={s}, M={M}) fits neither validity branch")


def near_optimal_dominance(d_max: int, d: int, s: int, M: int, k: int) -> DominanceVerdict:
    """Does the degree-d_max girth>4 matrix beat a girth-4 matrix of degree d?

    For d <= d_max the answer is unconditionally yes (its RIC formula
    decreases in d and beats the girth-4 formula at equal degree).  For
    larger d the verdict depends on one of two inequalities:

    * moderate degree (d <= M/2):  d_max >= d/s
    * high degree (M/2 < d <= M-2): d_max >= (k+1)(2d-M) / (6s + 2(2d-M))
    """
    if d > M - 2:
        raise InvalidRange(f"degree d={d} exceeds M-2={M - 2}")
    if d < 2 or d_max < 2 or s < 1:
        raise InvalidRange(f"need d, d_max >= 2 and s >= 1; got d={d}, d_max={d_max}, s={s}")
    if d <= d_max:
        return DominanceVerdict(NEAR_OPTIMAL_BETTER, "degree_within_dmax", None)
    if 2 * d <= M:
        threshold = Fraction(d, s)
        verdict = NEAR_OPTIMAL_BETTER if d_max >= threshold else CONDITION_FAILS
        return DominanceVerdict(verdict, "moderate_degree", threshold)
    threshold = Fraction((k + 1) * (2 * d - M), 6 * s + 2 * (2 * d - M))
    verdict = NEAR_OPTIMAL_BETTER if d_max >= threshold else CONDITION_FAILS
    return DominanceVerdict(verdict, "high_degree", threshold)
