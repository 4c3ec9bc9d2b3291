"""Diagonal-norm SBP first-derivative operators on [0, 1].

The operator pair (H, D) satisfies the summation-by-parts rule

    (u, Dv)_H + (Du, v)_H = u_N v_N - u_0 v_0,

equivalently HD + (HD)^T = diag(-1, 0, ..., 0, 1).  Interior rows carry the
standard antisymmetric central stencil of order 2p; the r boundary rows are
closure blocks of boundary order p, with the upper closure the anti-reflected
image of the lower one, D_R = -J D_L J.

Closure coefficients are hard-coded exact rationals.  The order-2 closure is
the width-3 variant whose first row is (-3/2, 2, -1/2)/h; orders 4 and 6 are
the classical diagonal-norm closures (for order 6 the one-parameter family is
fixed at q45 = 70057/99900, which reproduces the commonly tabulated operator).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

from .spaces import LinearMap, Norm, Space, maxabs

__all__ = [
    "SbpPair1D",
    "build_sbp1d",
    "anti_reflect",
    "accuracy_report",
    "sbp_defect",
    "sbp_matrix_defect",
    "AccuracyRow",
    "SUPPORTED_ORDERS",
]

# interior central-difference coefficients d_1..d_p for order 2p
_INTERIOR = {
    2: [F(1, 2)],
    4: [F(2, 3), F(-1, 12)],
    6: [F(3, 4), F(-3, 20), F(1, 60)],
}

# diagonal entries of H_L (dimensionless; H = h * diag(H_L, 1, ..., 1, H_L reversed))
_H_CLOSURE = {
    2: [F(1, 3), F(4, 3), F(5, 6)],
    4: [F(17, 48), F(59, 48), F(43, 48), F(49, 48)],
    6: [
        F(13649, 43200),
        F(12013, 8640),
        F(2711, 4320),
        F(5359, 4320),
        F(7877, 8640),
        F(43801, 43200),
    ],
}

# strict upper triangle of the antisymmetric part of Q_L; Q[0,0] = -1/2
_Q_UPPER = {
    2: {(0, 1): F(2, 3), (0, 2): F(-1, 6), (1, 2): F(2, 3)},
    4: {
        (0, 1): F(59, 96),
        (0, 2): F(-1, 12),
        (0, 3): F(-1, 32),
        (1, 2): F(59, 96),
        (1, 3): F(0),
        (2, 3): F(59, 96),
    },
    6: {
        (0, 1): F(385081, 599400),
        (0, 2): F(-85759, 1918080),
        (0, 3): F(-25273, 177600),
        (0, 4): F(316607, 9590400),
        (0, 5): F(55417, 4795200),
        (1, 2): F(127681, 319680),
        (1, 3): F(690233, 1918080),
        (1, 4): F(-30719, 319680),
        (1, 5): F(-22081, 1065600),
        (2, 3): F(182429, 479520),
        (2, 4): F(-1021, 71040),
        (2, 5): F(-3637, 319680),
        (3, 4): F(123791, 191808),
        (3, 5): F(-614387, 9590400),
        (4, 5): F(70057, 99900),
    },
}

SUPPORTED_ORDERS = (2, 4, 6)


def anti_reflect(a: np.ndarray) -> np.ndarray:
    """A^tau = J A J: reverse rows and columns, preserving the shape."""
    return np.asarray(a)[::-1, ::-1].copy()


def closure_tables(order: int):
    """(p, r, H_L diag, extended Q_L rows) as float arrays."""
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported order {order}; choose from {SUPPORTED_ORDERS}")
    d = _INTERIOR[order]
    p = len(d)
    hl = _H_CLOSURE[order]
    r = len(hl)
    q = np.zeros((r, r + p))
    q[0, 0] = -0.5
    for (i, j), val in _Q_UPPER[order].items():
        q[i, j] = float(val)
        q[j, i] = -float(val)
    # coupling to the first interior columns: tail of the central stencil
    for i in range(r - p, r):
        for k in range(1, p + 1):
            j = i + k
            if j >= r:
                q[i, j] = float(d[k - 1])
    return p, r, np.array([float(v) for v in hl]), q


@dataclass(frozen=True)
class SbpPair1D:
    """Matched (H, D) pair on N+1 uniform points spanning [0, 1]."""

    D: LinearMap
    H: Norm
    interior_order: int
    boundary_order: int
    closure_width: int
    N: int

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def space(self) -> Space:
        return self.D.domain

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)


def build_sbp1d(order: int, n: int) -> SbpPair1D:
    """Build the diagonal-norm SBP pair of interior order ``order`` on n intervals."""
    p, r, hl, q = closure_tables(order)
    if n + 1 < 2 * r + 1:
        raise ValueError(
            f"order {order} needs at least {2 * r} intervals, got N={n}"
        )
    h = 1.0 / n
    npts = n + 1

    weights = np.ones(npts)
    weights[:r] = hl
    weights[npts - r :] = hl[::-1]
    norm = Norm.diagonal(h * weights)

    dmat = np.zeros((npts, npts))
    d = [float(v) for v in _INTERIOR[order]]
    for i in range(r, npts - r):
        for k, dk in enumerate(d, start=1):
            dmat[i, i + k] = dk
            dmat[i, i - k] = -dk
    left = q / hl[:, None]
    dmat[:r, : r + p] = left
    dmat[npts - r :, npts - r - p :] = -anti_reflect(left)
    dmat /= h

    space = Space(npts, norm)
    return SbpPair1D(
        D=LinearMap(dmat, space, space),
        H=norm,
        interior_order=order,
        boundary_order=p,
        closure_width=r,
        N=n,
    )


@dataclass(frozen=True)
class AccuracyRow:
    """Max-abs defect of D x^k - k x^(k-1), split by row type."""

    k: int
    interior_defect: float
    closure_defect: float


def accuracy_report(op: SbpPair1D, q_max: int) -> list[AccuracyRow]:
    if q_max > op.interior_order:
        raise ValueError("q_max exceeds the interior order")
    x = op.grid
    r = op.closure_width
    n = op.N
    rows = []
    for k in range(q_max + 1):
        exact = np.zeros(n + 1) if k == 0 else k * x ** (k - 1)
        defect = np.abs(op.D(x**k) - exact)
        interior = defect[r : n + 1 - r]
        closure = np.concatenate([defect[:r], defect[n + 1 - r :]])
        rows.append(AccuracyRow(k, maxabs(interior), maxabs(closure)))
    return rows


def sbp_defect(op: SbpPair1D, u, v) -> float:
    """(u, Dv)_H + (Du, v)_H - (u_N v_N - u_0 v_0); zero for a valid pair."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    hmat = op.H.matrix
    lhs = u @ hmat @ op.D(v) + op.D(u) @ hmat @ v
    return float(lhs - (u[-1] * v[-1] - u[0] * v[0]))


def sbp_matrix_defect(hmat: np.ndarray, dmat: np.ndarray) -> float:
    """Relative max-abs defect of HD + (HD)^T = diag(-1, 0, ..., 0, 1)."""
    hd = hmat @ dmat
    b = np.zeros_like(hd)
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return maxabs(hd + hd.T - b) / max(maxabs(hd), 1e-300)
