"""Weighted Moore-Penrose pseudoinverses.

Three independent routes to T^+ for an operator between weighted spaces:

* ``pinv_svd``      -- Cholesky-transform both norms, SVD, transform back.
                       Deterministic and valid for any rank; the default.
* ``pinv_tikhonov`` -- regularized limit (T*T + delta^2 I)^{-1} T* along a
                       decreasing delta sequence.
* ``pinv_greville`` -- row-recursive construction (Euclidean norms only).

``check_penrose`` validates any candidate against the four generalized
Penrose conditions; note that the two orthogonality conditions pick up the
weight matrices,

    (ST)^T H1 = H1 (ST),      (TS)^T H2 = H2 (TS).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .spaces import LinearMap, SpaceError, maxabs

__all__ = [
    "RANK_RTOL",
    "PenroseReport",
    "TikhonovResult",
    "IllConditionedError",
    "pinv_svd",
    "pinv_tikhonov",
    "pinv_greville",
    "check_penrose",
    "canonical_projections",
]

# singular values below RANK_RTOL * sigma_max count as zero
RANK_RTOL = 1e-12

GREVILLE_BRANCH_RTOL = 1e-10


class IllConditionedError(ValueError):
    """Shifted normal equations lost positive definiteness."""


@dataclass(frozen=True)
class PenroseReport:
    """Measured defects of the four generalized Penrose conditions."""

    residuals: tuple[float, float, float, float]
    rank_estimate: int
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals)


@dataclass(frozen=True)
class TikhonovResult:
    """Final regularized inverse plus the iterates along the delta sequence."""

    map: LinearMap
    deltas: tuple[float, ...]
    iterates: tuple[np.ndarray, ...]


def _weighted_svd(t: LinearMap):
    """SVD of G2^T T G1^{-T} where G_i are the norm Cholesky factors."""
    g1 = t.domain.norm.cholesky
    g2 = t.codomain.norm.cholesky
    that = g2.T @ linalg.solve_triangular(g1, t.matrix.T, lower=True).T
    return g1, g2, np.linalg.svd(that, full_matrices=False)


def pinv_svd(t: LinearMap, rank_rtol: float = RANK_RTOL) -> LinearMap:
    """Weighted pseudoinverse T^+: codomain -> domain via transformed SVD."""
    g1, g2, (u, sigma, vt) = _weighted_svd(t)
    if sigma.size and sigma[0] > 0.0:
        keep = sigma > rank_rtol * sigma[0]
    else:
        keep = np.zeros_like(sigma, dtype=bool)
    sigma_plus = np.zeros_like(sigma)
    sigma_plus[keep] = 1.0 / sigma[keep]
    core = (vt.T * sigma_plus) @ u.T
    mat = linalg.solve_triangular(g1.T, core @ g2.T, lower=False)
    return LinearMap(mat, t.codomain, t.domain)


def rank_estimate(t: LinearMap, rank_rtol: float = RANK_RTOL) -> int:
    _, _, (_, sigma, _) = _weighted_svd(t)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rank_rtol * sigma[0]))


def _cholesky_ld(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor in extended precision."""
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if d <= 0.0:
            raise IllConditionedError("shifted normal matrix lost definiteness")
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low


def _solve_lower_ld(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=np.longdouble)
    for j in range(low.shape[0]):
        x[j] = (x[j] - low[j, :j] @ x[:j]) / low[j, j]
    return x


def _solve_upper_ld(upper: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = upper.shape[0]
    x = np.array(b, dtype=np.longdouble)
    for j in range(n - 1, -1, -1):
        x[j] = (x[j] - upper[j, j + 1 :] @ x[j + 1 :]) / upper[j, j]
    return x


def _cho_solve_ld(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _solve_upper_ld(low.T, _solve_lower_ld(low, b))


def pinv_tikhonov(t: LinearMap, deltas) -> TikhonovResult:
    """Regularized pseudoinverse (T*T + delta^2 I)^{-1} T* at the final delta.

    The deltas must be strictly decreasing with final value >= 1e-7.  All
    intermediate iterates are returned so convergence of the limit can be
    inspected; no stopping rule is imposed.

    Internals run in extended precision: the regularized inverse has
    condition number ~1/delta^2 against roundoff in forming the normal
    matrix, so at delta = 1e-6 plain double precision would bury the limit
    under a ~1e-4 noise floor whenever T*T is singular.  For wide maps the
    algebraically identical form T*(TT* + delta^2 I)^{-1} is used, which
    shrinks the shifted system to the smaller side.
    """
    deltas = tuple(float(d) for d in deltas)
    if not deltas:
        raise ValueError("empty delta sequence")
    if any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    if deltas[-1] < 1e-7:
        raise ValueError(f"final delta {deltas[-1]} below 1e-7")

    m, n = t.shape
    tm = t.matrix.astype(np.longdouble)
    h1 = t.domain.norm.matrix.astype(np.longdouble)
    h2 = t.codomain.norm.matrix.astype(np.longdouble)
    g1 = _cholesky_ld(h1)
    g2 = _cholesky_ld(h2)
    # that = G2^T T G1^{-T} is the map between the transformed spaces
    that = _solve_lower_ld(g1, (g2.T @ tm).T).T

    iterates = []
    for delta in deltas:
        shift = np.longdouble(delta) ** 2
        if m >= n:
            core = _cho_solve_ld(
                _cholesky_ld(that.T @ that + shift * np.eye(n, dtype=np.longdouble)),
                that.T,
            )
        else:
            core = that.T @ _cho_solve_ld(
                _cholesky_ld(that @ that.T + shift * np.eye(m, dtype=np.longdouble)),
                np.eye(m, dtype=np.longdouble),
            )
        mat = _solve_upper_ld(g1.T, core @ g2.T)
        iterates.append(mat.astype(float))
    final = LinearMap(iterates[-1], t.codomain, t.domain)
    return TikhonovResult(final, deltas, tuple(iterates))


def pinv_greville(rows) -> np.ndarray:
    """Pseudoinverse built row-recursively (Euclidean norms on both sides).

    ``rows`` is an iterable of row vectors; the result is the pseudoinverse
    of the matrix they stack to.  Each step appends row L_j via

        Lt_j^+ = [ (I - K_j^T L_j) Lt_{j-1}^+ ,  K_j^T ]

    with K_j chosen by whether L_j adds new row space (branch on
    ``L_j (I - Lt^+ Lt)`` vanishing).
    """
    rows = [np.asarray(r, dtype=float).ravel() for r in rows]
    if not rows:
        raise ValueError("empty row list")
    n = rows[0].size
    if any(r.size != n for r in rows):
        raise ValueError("rows have inconsistent lengths")

    first = rows[0]
    nrm2 = float(first @ first)
    pinv = (first / nrm2).reshape(n, 1) if nrm2 > 0.0 else np.zeros((n, 1))
    stacked = first.reshape(1, n)

    for row in rows[1:]:
        resid = row - (row @ pinv) @ stacked
        lam = np.linalg.norm(resid)
        if lam > GREVILLE_BRANCH_RTOL * max(np.linalg.norm(row), 1e-300):
            k = resid / lam**2
        else:
            mu = np.linalg.norm(row @ pinv)
            k = (row @ pinv) @ pinv.T / (1.0 + mu**2)
        left = pinv - np.outer(k, row @ pinv)
        pinv = np.hstack([left, k.reshape(n, 1)])
        stacked = np.vstack([stacked, row])
    return pinv


def check_penrose(t: LinearMap, s: LinearMap, tol: float = 1e-10) -> PenroseReport:
    """Relative defects of the four weighted Penrose conditions for S ~ T^+."""
    if s.shape != (t.shape[1], t.shape[0]):
        raise SpaceError("candidate pseudoinverse has wrong shape")
    tm, sm = t.matrix, s.matrix
    h1 = t.domain.norm.matrix
    h2 = t.codomain.norm.matrix

    st = sm @ tm
    ts = tm @ sm
    floor = 1e-300
    r1 = maxabs(tm @ st - tm) / max(maxabs(tm), floor)
    r2 = maxabs(st @ sm - sm) / max(maxabs(sm), floor)
    r3 = maxabs(st.T @ h1 - h1 @ st) / max(maxabs(h1 @ st), maxabs(h1), floor)
    r4 = maxabs(ts.T @ h2 - h2 @ ts) / max(maxabs(h2 @ ts), maxabs(h2), floor)
    return PenroseReport((r1, r2, r3, r4), rank_estimate(t), tol)


def canonical_projections(t: LinearMap) -> tuple[LinearMap, LinearMap]:
    """(T^+ T, T T^+): the projections onto range(T*) and range(T)."""
    tp = pinv_svd(t)
    return tp @ t, t @ tp
