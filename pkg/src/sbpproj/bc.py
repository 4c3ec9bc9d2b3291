"""Discrete boundary operators and projection boundary conditions.

A boundary operator L maps the state space V into a small boundary space
V_Gamma.  Homogeneous conditions Lv = 0 are enforced through the projection

    P = I - L^+ L,

which is well defined for any L, rank deficient or not.  Inhomogeneous data g
enters through the lift L^+ g, never through an explicit extension vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pinv import pinv_svd
from .spaces import LinearMap, Norm, Space, SpaceError, maxabs

__all__ = [
    "BoundaryOperator",
    "BoundaryProjection",
    "bc_char_scalar",
    "bc_char_system",
    "char_block",
    "bc_neumann_heat",
    "boundary_projection",
    "lift_boundary_data",
    "matched_boundary_norm",
]

MATCH_RTOL = 1e-12


@dataclass(frozen=True)
class BoundaryOperator:
    """L: V -> V_Gamma plus a tag describing where it came from."""

    L: LinearMap
    meta: str = "custom"

    @property
    def gamma_dim(self) -> int:
        return self.L.codomain.dim

    @property
    def state_dim(self) -> int:
        return self.L.domain.dim


@dataclass(frozen=True)
class BoundaryProjection:
    """P = I - L^+ L together with the lift L^+."""

    P: LinearMap
    Lplus: LinearMap
    source: BoundaryOperator


def _state_space(n_points: int, space: Space | None) -> Space:
    return space if space is not None else Space.euclidean(n_points)


def bc_char_scalar(
    delta0: int, delta1: int, n: int, space: Space | None = None
) -> BoundaryOperator:
    """Characteristic conditions for scalar advection on N+1 points.

    delta0 selects the condition at x=0, delta1 at x=1; both zero means no
    boundary condition at all (L = 0, P = I).
    """
    if delta0 not in (0, 1) or delta1 not in (0, 1):
        raise ValueError("delta flags must be 0 or 1")
    dom = _state_space(n + 1, space)
    mat = np.zeros((2, n + 1))
    mat[0, 0] = delta0
    mat[1, n] = delta1
    gamma = Space.euclidean(2)
    return BoundaryOperator(LinearMap(mat, dom, gamma), meta="char-scalar")


def char_block(lam, couplings, side: str = "left") -> np.ndarray:
    """Analytic characteristic boundary operator L0 for a diagonal system.

    Row i is delta_i (e_i - sum_{j != i} c_ij (1 - delta_j) e_j) with
    delta_i = [lambda_i > 0] at a left boundary, [lambda_i < 0] at a right.
    """
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    c = np.asarray(couplings, dtype=float)
    if c.shape != (d, d):
        raise ValueError(f"couplings must be {d}x{d}")
    if side == "left":
        delta = (lam > 0.0).astype(float)
    elif side == "right":
        delta = (lam < 0.0).astype(float)
    else:
        raise ValueError("side must be 'left' or 'right'")
    block = np.zeros((d, d))
    for i in range(d):
        if delta[i] == 0.0:
            continue
        block[i, i] = 1.0
        for j in range(d):
            if j != i:
                block[i, j] = -c[i, j] * (1.0 - delta[j])
    return block


def bc_char_system(
    lam,
    couplings,
    side: str,
    n: int,
    space: Space | None = None,
) -> BoundaryOperator:
    """Characteristic conditions for a d x d system, embedded at one endpoint.

    The state has d components per grid point, ordered point-major.  The
    operator has d rows acting on the boundary block at x=0 (side='left') or
    x=1 (side='right').
    """
    block = char_block(lam, couplings, side)
    d = block.shape[0]
    dom = _state_space((n + 1) * d, space)
    mat = np.zeros((d, (n + 1) * d))
    col = 0 if side == "left" else n * d
    mat[:, col : col + d] = block
    gamma = Space.euclidean(d)
    return BoundaryOperator(LinearMap(mat, dom, gamma), meta="char-system")


def bc_neumann_heat(op) -> BoundaryOperator:
    """Zero-derivative (adiabatic) conditions (Dv)_0 = 0, (Dv)_N = 0."""
    if op.H.structure != "diagonal":
        raise SpaceError("heat boundary operator requires a diagonal norm")
    dmat = op.D.matrix
    mat = np.vstack([dmat[0], dmat[-1]])
    gamma = Space.euclidean(2)
    return BoundaryOperator(LinearMap(mat, op.space, gamma), meta="neumann-heat")


def matched_boundary_norm(l_op: LinearMap) -> Norm:
    """Diagonal H_bar with L H = H_bar L, detected row by row.

    Exists whenever H is restricted-full and L only touches decoupled
    boundary points; rows of L must be eigenrows of right-multiplication
    by H.  Zero rows get weight 1.
    """
    lh = l_op.matrix @ l_op.domain.norm.matrix
    weights = np.ones(l_op.codomain.dim)
    for i, row in enumerate(l_op.matrix):
        nrm2 = float(row @ row)
        if nrm2 == 0.0:
            if maxabs(lh[i]):
                raise SpaceError("LH = H_bar L does not hold (zero row mismatch)")
            continue
        c = float(lh[i] @ row) / nrm2
        if maxabs(lh[i] - c * row) > MATCH_RTOL * max(maxabs(lh[i]), maxabs(row)):
            raise SpaceError(f"LH = H_bar L does not hold at row {i}")
        if c <= 0.0:
            raise SpaceError(f"matched boundary weight nonpositive at row {i}")
        weights[i] = c
    return Norm.diagonal(weights)


def boundary_projection(
    bop: BoundaryOperator,
    boundary_norm_choice: str = "identity",
) -> BoundaryProjection:
    """P = I - L^+ L with L^+ taken under the chosen boundary norm.

    For norms decoupling the boundary points the projection is independent of
    the choice; 'identity' is the default, 'matched' uses the H_bar from
    L H = H_bar L when that relation holds.
    """
    l_map = bop.L
    if boundary_norm_choice == "matched":
        gamma_norm = matched_boundary_norm(l_map)
    elif boundary_norm_choice == "identity":
        gamma_norm = Norm.identity(l_map.codomain.dim)
    else:
        raise ValueError("boundary_norm_choice must be 'identity' or 'matched'")
    gamma = Space(l_map.codomain.dim, gamma_norm)
    l_weighted = LinearMap(l_map.matrix, l_map.domain, gamma)
    lplus = pinv_svd(l_weighted)
    p = LinearMap.identity(l_map.domain) - lplus @ l_weighted
    return BoundaryProjection(P=p, Lplus=lplus, source=bop)


def lift_boundary_data(bp: BoundaryProjection, g) -> np.ndarray:
    """L^+ g: the minimum-norm state carrying boundary data g."""
    g = np.asarray(g, dtype=float)
    if g.shape != (bp.source.gamma_dim,):
        raise SpaceError("boundary data length does not match gamma dimension")
    return bp.Lplus(g)
