"""Sparse recovery solvers: OMP, IHT, SP, and basis pursuit via ADMM.

All solvers run against a thin column-access layer so binary matrices in
support form and dense arrays share one code path.  Binary products use
index gathers scaled by 1/sqrt(d), never an explicit dense expansion,
except where a solver genuinely needs a column block.

Everything here is deterministic: ties break toward the lowest index,
and the single seeded quantity (the power-iteration start vector for the
operator norm) uses a fixed internal seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import KTooLarge, RankDeficient
from .matrix_core import SensingMatrix

_POWER_ITER_SEED = 0x51E9
_POWER_ITERS = 100


@dataclass(frozen=True)
class SparseSignal:
    """A k-sparse vector: sorted support plus the values on it."""

    N: int
    support: tuple[int, ...]
    values: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.N)
        x[list(self.support)] = self.values
        return x


@dataclass(frozen=True)
class RecoveryOutput:
    """Solver result: estimate, iteration count, recomputed residual norm."""

    x_hat: np.ndarray
    iterations: int
    final_residual_norm: float
    converged: bool


class BinaryOperator:
    """Matrix-vector products for a support-form binary matrix."""

    def __init__(self, matrix: SensingMatrix):
        self.matrix = matrix
        self.shape = (matrix.M, matrix.N)
        self._sup = np.asarray(matrix.supports, dtype=np.intp)
        self._cols_flat = np.repeat(np.arange(matrix.N), matrix.d)
        self._rows_flat = self._sup.ravel()
        self._scale = 1.0 / math.sqrt(matrix.d)
        self._norm_sq: Optional[float] = None
        self._pinv: Optional[np.ndarray] = None
        self._dense: Optional[np.ndarray] = None

    def matvec(self, x: np.ndarray) -> np.ndarray:
        contrib = x[self._cols_flat]
        return np.bincount(self._rows_flat, weights=contrib, minlength=self.shape[0]) * self._scale

    def rmatvec(self, r: np.ndarray) -> np.ndarray:
        return r[self._sup].sum(axis=1) * self._scale

    def columns(self, idx: Sequence[int]) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.intp)
        B = np.zeros((self.shape[0], len(idx)))
        d = self.matrix.d
        B[self._sup[idx].ravel(), np.repeat(np.arange(len(idx)), d)] = self._scale
        return B

    def dense(self) -> np.ndarray:
        if self._dense is None:
            self._dense = self.columns(np.arange(self.shape[1]))
        return self._dense

    def spectral_norm_sq(self) -> float:
        if self._norm_sq is None:
            self._norm_sq = _power_iteration_norm_sq(self)
        return self._norm_sq

    def pseudo_inverse(self) -> np.ndarray:
        if self._pinv is None:
            self._pinv = np.linalg.pinv(self.dense())
        return self._pinv


class DenseOperator:
    """Same access contract for an explicit dense matrix (e.g. Gaussian)."""

    def __init__(self, array: np.ndarray):
        self._A = np.asarray(array, dtype=float)
        self.shape = self._A.shape
        self._norm_sq: Optional[float] = None
        self._pinv: Optional[np.ndarray] = None

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._A @ x

    def rmatvec(self, r: np.ndarray) -> np.ndarray:
        return self._A.T @ r

    def columns(self, idx: Sequence[int]) -> np.ndarray:
        return self._A[:, np.asarray(idx, dtype=np.intp)]

    def dense(self) -> np.ndarray:
        return self._A

    def spectral_norm_sq(self) -> float:
        if self._norm_sq is None:
            self._norm_sq = _power_iteration_norm_sq(self)
        return self._norm_sq

    def pseudo_inverse(self) -> np.ndarray:
        if self._pinv is None:
            self._pinv = np.linalg.pinv(self._A)
        return self._pinv


Operator = Union[BinaryOperator, DenseOperator]


def as_operator(A) -> Operator:
    if isinstance(A, (BinaryOperator, DenseOperator)):
        return A
    if isinstance(A, SensingMatrix):
        return BinaryOperator(A)
    return DenseOperator(np.asarray(A, dtype=float))


def _power_iteration_norm_sq(op) -> float:
    """Largest squared singular value, estimated by fixed-seed power iterations."""
    rng = np.random.Generator(np.random.PCG64(_POWER_ITER_SEED))
    v = rng.standard_normal(op.shape[1])
    v /= np.linalg.norm(v)
    est = 1.0
    for _ in range(_POWER_ITERS):
        w = op.rmatvec(op.matvec(v))
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 1.0
        v = w / est
    return est


def least_squares(A_S: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimize ||y - A_S c|| over c via Householder QR.

    Raises RankDeficient when the columns are (numerically) dependent or
    outnumber the rows.
    """
    A = np.asarray(A_S, dtype=float)
    if A.ndim != 2:
        raise RankDeficient(f"expected a 2-d column block, got shape {A.shape}")
    m, k = A.shape
    if k > m:
        raise RankDeficient(f"{k} columns cannot be independent in {m} rows")
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    if k > 0:
        dmax = diag.max()
        if dmax == 0.0 or diag.min() <= np.finfo(float).eps * max(m, k) * dmax:
            raise RankDeficient("column block is numerically rank deficient")
    return np.linalg.solve(R, Q.T @ y)


def omp(A, y: np.ndarray, k: int) -> RecoveryOutput:
    """Orthogonal matching pursuit, exactly k selection steps.

    Each step picks the unselected column most correlated with the
    residual (ties to the lowest index) and re-projects y onto the span
    of everything selected so far.
    """
    op = as_operator(A)
    M, N = op.shape
    if not 1 <= k <= M:
        raise KTooLarge(f"sparsity {k} not in [1, M={M}]")
    y = np.asarray(y, dtype=float)
    residual = y.copy()
    selected: list[int] = []
    taken = np.zeros(N, dtype=bool)
    coeffs = np.zeros(0)
    for _ in range(k):
        corr = np.abs(op.rmatvec(residual))
        corr[taken] = -1.0
        j = int(np.argmax(corr))
        selected.append(j)
        taken[j] = True
        block = op.columns(selected)
        coeffs = least_squares(block, y)
        residual = y - block @ coeffs
    x_hat = np.zeros(N)
    x_hat[selected] = coeffs
    return RecoveryOutput(
        x_hat=x_hat,
        iterations=k,
        final_residual_norm=float(np.linalg.norm(y - op.matvec(x_hat))),
        converged=True,
    )


def _hard_threshold(v: np.ndarray, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries (ties toward lower indices)."""
    order = np.argsort(-np.abs(v), kind="stable")
    out = np.zeros_like(v)
    keep = order[:k]
    out[keep] = v[keep]
    return out


def iht(A, y: np.ndarray, k: int, max_iters: int = 1000, step_mode="normalized") -> RecoveryOutput:
    """Iterative hard thresholding from x = 0: x <- H_k(x + eta * A^T (y - A x)).

    ``step_mode`` selects the step size eta:

    * "normalized" (default): the adaptive step ||g_S||^2 / ||A g_S||^2,
      where g is the gradient and S the current support, halved until the
      residual does not increase.  This is the variant that actually
      recovers k anywhere near the matrix's capacity.
    * "spectral": the fixed step 1 / ||A||^2 (power-iteration estimate).
      Convergent but much weaker: it stalls on wrong supports well below
      the sparsity the adaptive step handles.
    * a float: that fixed step, unconditionally.

    Stops when the residual norm stalls (relative change below 1e-6) or
    after max_iters; non-convergence is reported via the flag.
    """
    op = as_operator(A)
    M, N = op.shape
    if not 1 <= k <= M:
        raise KTooLarge(f"sparsity {k} not in [1, M={M}]")
    if max_iters < 1:
        raise KTooLarge(f"need max_iters >= 1, got {max_iters}")
    adaptive = step_mode == "normalized"
    if adaptive:
        eta = 0.0
    elif step_mode == "spectral":
        eta = 1.0 / op.spectral_norm_sq()
    else:
        eta = float(step_mode)
    y = np.asarray(y, dtype=float)
    y_norm = float(np.linalg.norm(y))
    x = np.zeros(N)
    residual = y.copy()
    # Proxy support before the first thresholding step.
    support = np.argsort(-np.abs(op.rmatvec(y)), kind="stable")[:k]
    prev = y_norm
    iterations = 0
    converged = False
    for iterations in range(1, max_iters + 1):
        g = op.rmatvec(residual)
        if adaptive:
            g_s = np.zeros(N)
            g_s[support] = g[support]
            denom = float(np.linalg.norm(op.matvec(g_s)) ** 2)
            eta = float(np.linalg.norm(g_s) ** 2) / denom if denom > 0.0 else 1.0
            for _ in range(30):
                x_new = _hard_threshold(x + eta * g, k)
                new_residual = y - op.matvec(x_new)
                if float(np.linalg.norm(new_residual)) <= float(np.linalg.norm(residual)):
                    break
                eta *= 0.5
        else:
            x_new = _hard_threshold(x + eta * g, k)
            new_residual = y - op.matvec(x_new)
        x, residual = x_new, new_residual
        support = np.flatnonzero(x)
        rn = float(np.linalg.norm(residual))
        if rn <= 1e-12 * max(1.0, y_norm) or abs(prev - rn) <= 1e-6 * max(prev, 1e-30):
            converged = True
            break
        prev = rn
    return RecoveryOutput(
        x_hat=x,
        iterations=iterations,
        final_residual_norm=float(np.linalg.norm(y - op.matvec(x))),
        converged=converged,
    )


def _top_k_indices(v: np.ndarray, k: int) -> np.ndarray:
    order = np.argsort(-np.abs(v), kind="stable")
    return np.sort(order[:k])


def sp(A, y: np.ndarray, k: int, max_iters: int = 100) -> RecoveryOutput:
    """Subspace pursuit.

    Starts from the k best-correlated columns; each round merges the
    current support with the k columns most correlated with the residual,
    solves least squares on the union, prunes back to the k largest
    coefficients, and re-solves.  A round is only accepted while the
    residual norm strictly decreases.
    """
    op = as_operator(A)
    M, N = op.shape
    if not 1 <= k <= M // 2:
        raise KTooLarge(f"sparsity {k} not in [1, M/2={M // 2}]")
    y = np.asarray(y, dtype=float)
    support = _top_k_indices(op.rmatvec(y), k)
    coeffs = least_squares(op.columns(support), y)
    residual = y - op.columns(support) @ coeffs
    best = float(np.linalg.norm(residual))
    iterations = 0
    converged = False
    for _ in range(max_iters):
        if best <= 1e-14 * max(1.0, float(np.linalg.norm(y))):
            converged = True
            break
        merged = np.union1d(support, _top_k_indices(op.rmatvec(residual), k))
        merged_coeffs = least_squares(op.columns(merged), y)
        pruned = merged[_top_k_indices(merged_coeffs, k)]
        new_coeffs = least_squares(op.columns(pruned), y)
        new_residual = y - op.columns(pruned) @ new_coeffs
        rn = float(np.linalg.norm(new_residual))
        if rn >= best:
            converged = True
            break
        support, coeffs, residual, best = pruned, new_coeffs, new_residual, rn
        iterations += 1
    x_hat = np.zeros(N)
    x_hat[support] = coeffs
    return RecoveryOutput(
        x_hat=x_hat,
        iterations=iterations,
        final_residual_norm=float(np.linalg.norm(y - op.matvec(x_hat))),
        converged=converged,
    )


@dataclass(frozen=True)
class BpParams:
    """ADMM settings for equality-constrained l1 minimization."""

    penalty: float = 1.0
    over_relaxation: float = 1.0
    tol: float = 1e-6
    max_iters: int = 2000


def bp(A, y: np.ndarray, params: Optional[BpParams] = None) -> RecoveryOutput:
    """Basis pursuit: min ||x||_1 subject to A x = y, solved by ADMM.

    Alternates projection onto the affine constraint (through a cached
    pseudo-inverse) with soft-threshold shrinkage; stops when primal and
    dual residuals drop below params.tol.  The returned estimate is the
    projection-side iterate, so it satisfies A x = y to machine accuracy
    even when the flag reports non-convergence.
    """
    if params is None:
        params = BpParams()
    op = as_operator(A)
    M, N = op.shape
    y = np.asarray(y, dtype=float)
    D = op.dense()
    P = op.pseudo_inverse()
    x_particular = P @ y

    def project(v: np.ndarray) -> np.ndarray:
        return v - P @ (D @ v) + x_particular

    kappa = 1.0 / params.penalty
    alpha = params.over_relaxation
    z = np.zeros(N)
    u = np.zeros(N)
    x = project(z - u)
    iterations = 0
    converged = False
    for iterations in range(1, params.max_iters + 1):
        x = project(z - u)
        x_relaxed = alpha * x + (1.0 - alpha) * z
        z_new = _soft_threshold(x_relaxed + u, kappa)
        u = u + x_relaxed - z_new
        primal = float(np.linalg.norm(x - z_new))
        dual = params.penalty * float(np.linalg.norm(z_new - z))
        z = z_new
        if primal < params.tol and dual < params.tol:
            converged = True
            break
    return RecoveryOutput(
        x_hat=x,
        iterations=iterations,
        final_residual_norm=float(np.linalg.norm(y - op.matvec(x))),
        converged=converged,
    )


def _soft_threshold(v: np.ndarray, kappa: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
