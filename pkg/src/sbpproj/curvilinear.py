"""Curvilinear geometry: metrics, Jacobian, chain-rule SBP derivatives and
boundary arc-length/normal operators.

The physical domain is the image of the unit reference square under a
diffeomorphism (x, y) = (x(xi, eta), y(xi, eta)).  Metric coefficients are
either sampled from analytic partials or computed with the reference SBP
derivatives themselves (discrete mode, the default for the solvers).  The
split chain-rule derivatives

    Dx = 1/2 J^{-1} (Y_eta D_xi + D_xi Y_eta - Y_xi D_eta - D_eta Y_xi)
    Dy = 1/2 J^{-1} (X_xi D_eta + D_eta X_xi - X_eta D_xi - D_xi X_eta)

satisfy a summation-by-parts rule whose boundary terms carry the arc lengths
and outward normals of the physical boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spaces import maxabs
from .tensor2d import (
    Ops2D,
    boundary_embedding_matrix,
    boundary_norm_gamma_plus,
    boundary_trace,
)

__all__ = [
    "Mapping",
    "identity_mapping",
    "affine_mapping",
    "rotation_mapping",
    "sinusoidal_mapping",
    "NonPositiveJacobianError",
    "CurvilinearGrid",
    "build_metrics",
    "build_curvilinear_diffops",
    "CurvilinearDiffOps",
    "BoundaryGeometry",
    "build_boundary_geometry",
    "curvilinear_sbp_defect",
    "load_grid_coordinates",
]


class NonPositiveJacobianError(ValueError):
    """The mapping is not orientation preserving on the grid."""


@dataclass(frozen=True)
class Mapping:
    """Reference-to-physical mapping, with optional analytic partials."""

    x: Callable[[np.ndarray, np.ndarray], np.ndarray]
    y: Callable[[np.ndarray, np.ndarray], np.ndarray]
    x_xi: Callable | None = None
    x_eta: Callable | None = None
    y_xi: Callable | None = None
    y_eta: Callable | None = None

    @property
    def has_partials(self) -> bool:
        return None not in (self.x_xi, self.x_eta, self.y_xi, self.y_eta)


def identity_mapping() -> Mapping:
    return Mapping(
        x=lambda xi, eta: xi + 0.0 * eta,
        y=lambda xi, eta: eta + 0.0 * xi,
        x_xi=lambda xi, eta: np.ones_like(xi * eta),
        x_eta=lambda xi, eta: np.zeros_like(xi * eta),
        y_xi=lambda xi, eta: np.zeros_like(xi * eta),
        y_eta=lambda xi, eta: np.ones_like(xi * eta),
    )


def affine_mapping(ax: float, by: float) -> Mapping:
    return Mapping(
        x=lambda xi, eta: ax * xi + 0.0 * eta,
        y=lambda xi, eta: by * eta + 0.0 * xi,
        x_xi=lambda xi, eta: ax * np.ones_like(xi * eta),
        x_eta=lambda xi, eta: np.zeros_like(xi * eta),
        y_xi=lambda xi, eta: np.zeros_like(xi * eta),
        y_eta=lambda xi, eta: by * np.ones_like(xi * eta),
    )


def rotation_mapping(theta: float) -> Mapping:
    c, s = np.cos(theta), np.sin(theta)
    return Mapping(
        x=lambda xi, eta: c * xi - s * eta,
        y=lambda xi, eta: s * xi + c * eta,
        x_xi=lambda xi, eta: c * np.ones_like(xi * eta),
        x_eta=lambda xi, eta: -s * np.ones_like(xi * eta),
        y_xi=lambda xi, eta: s * np.ones_like(xi * eta),
        y_eta=lambda xi, eta: c * np.ones_like(xi * eta),
    )


def sinusoidal_mapping(alpha: float = 0.1, waves: int = 1) -> Mapping:
    """Default smooth test mapping x = xi + a sin sin, y = eta + a sin sin.

    Both coordinates share the bump a sin(w pi xi) sin(w pi eta), so the
    Jacobian is J = 1 + a w pi sin(w pi (xi + eta)): strictly positive (a
    diffeomorphism) for |alpha| < 1/(w pi).  Block interface lines map to
    genuinely curved arcs while the outer edges stay put, which keeps the
    corner arc lengths compatible.  One wave across the square is gentle
    enough for asymptotic convergence rates at moderate resolutions;
    ``waves=2`` gives a rougher grid for stress tests.
    """
    w = waves * np.pi

    def bump(xi, eta):
        return np.sin(w * xi) * np.sin(w * eta)

    def bump_xi(xi, eta):
        return w * np.cos(w * xi) * np.sin(w * eta)

    def bump_eta(xi, eta):
        return w * np.sin(w * xi) * np.cos(w * eta)

    return Mapping(
        x=lambda xi, eta: xi + alpha * bump(xi, eta),
        y=lambda xi, eta: eta + alpha * bump(xi, eta),
        x_xi=lambda xi, eta: 1.0 + alpha * bump_xi(xi, eta),
        x_eta=lambda xi, eta: alpha * bump_eta(xi, eta),
        y_xi=lambda xi, eta: alpha * bump_xi(xi, eta),
        y_eta=lambda xi, eta: 1.0 + alpha * bump_eta(xi, eta),
    )


@dataclass(frozen=True)
class CurvilinearGrid:
    """Reference operators plus physical coordinates and metric fields.

    All 2D fields are stored as (n2+1, n1+1) arrays (row-major states).
    """

    ops: Ops2D
    x: np.ndarray
    y: np.ndarray
    x_xi: np.ndarray
    x_eta: np.ndarray
    y_xi: np.ndarray
    y_eta: np.ndarray
    jac: np.ndarray
    mode: str

    @property
    def shape(self):
        return self.x.shape

    def min_edge_length(self) -> float:
        """Smallest physical distance between neighbouring grid points."""
        dx1 = np.diff(self.x, axis=1)
        dy1 = np.diff(self.y, axis=1)
        dx2 = np.diff(self.x, axis=0)
        dy2 = np.diff(self.y, axis=0)
        exi = np.sqrt(dx1**2 + dy1**2)
        eeta = np.sqrt(dx2**2 + dy2**2)
        return float(min(exi.min(), eeta.min()))


def build_metrics(
    ops: Ops2D,
    mapping: Mapping | None = None,
    mode: str = "discrete",
    coords: tuple[np.ndarray, np.ndarray] | None = None,
) -> CurvilinearGrid:
    """Evaluate coordinates and metric terms on the reference grid.

    Discrete mode differentiates the coordinate fields with the reference
    operators; analytic mode samples the supplied partials.  Raises
    ``NonPositiveJacobianError`` when orientation fails anywhere.
    """
    xi, eta = np.meshgrid(ops.xgrid, ops.ygrid)
    if coords is not None:
        x, y = (np.asarray(c, dtype=float) for c in coords)
        if x.shape != xi.shape or y.shape != xi.shape:
            raise ValueError(f"coordinate arrays must have shape {xi.shape}")
        if mode != "discrete":
            raise ValueError("externally supplied coordinates require discrete mode")
    else:
        if mapping is None:
            raise ValueError("need a mapping or coordinate arrays")
        x = np.asarray(mapping.x(xi, eta), dtype=float)
        y = np.asarray(mapping.y(xi, eta), dtype=float)

    if mode == "analytic":
        if mapping is None or not mapping.has_partials:
            raise ValueError("analytic mode needs a mapping with partials")
        x_xi = np.asarray(mapping.x_xi(xi, eta), dtype=float)
        x_eta = np.asarray(mapping.x_eta(xi, eta), dtype=float)
        y_xi = np.asarray(mapping.y_xi(xi, eta), dtype=float)
        y_eta = np.asarray(mapping.y_eta(xi, eta), dtype=float)
    elif mode == "discrete":
        x_xi = ops.apply_dx(x)
        x_eta = ops.apply_dy(x)
        y_xi = ops.apply_dx(y)
        y_eta = ops.apply_dy(y)
    else:
        raise ValueError("mode must be 'analytic' or 'discrete'")

    jac = x_xi * y_eta - x_eta * y_xi
    if np.min(jac) <= 0.0:
        raise NonPositiveJacobianError(
            f"Jacobian reaches {np.min(jac):.3e}; mapping not orientation preserving"
        )
    return CurvilinearGrid(ops, x, y, x_xi, x_eta, y_xi, y_eta, jac, mode)


class CurvilinearDiffOps:
    """Physical-space derivative operators on a curvilinear grid."""

    def __init__(self, grid: CurvilinearGrid):
        self.grid = grid

    def apply_dx(self, u: np.ndarray) -> np.ndarray:
        g = self.grid
        ops = g.ops
        arr = u if u.ndim >= 2 else g.ops.grid.as_array(u)
        ye, yx = _bcast(g.y_eta, arr), _bcast(g.y_xi, arr)
        out = ye * ops.apply_dx(arr) + ops.apply_dx(ye * arr)
        out -= yx * ops.apply_dy(arr) + ops.apply_dy(yx * arr)
        out *= 0.5 / _bcast(g.jac, arr)
        return out if u.ndim >= 2 else out.ravel()

    def apply_dy(self, u: np.ndarray) -> np.ndarray:
        g = self.grid
        ops = g.ops
        arr = u if u.ndim >= 2 else g.ops.grid.as_array(u)
        xx, xe = _bcast(g.x_xi, arr), _bcast(g.x_eta, arr)
        out = xx * ops.apply_dy(arr) + ops.apply_dy(xx * arr)
        out -= xe * ops.apply_dx(arr) + ops.apply_dx(xe * arr)
        out *= 0.5 / _bcast(g.jac, arr)
        return out if u.ndim >= 2 else out.ravel()

    def dense_dx(self) -> np.ndarray:
        g = self.grid
        dxi = g.ops.Dx.matrix
        deta = g.ops.Dy.matrix
        ye = g.y_eta.ravel()
        yx = g.y_xi.ravel()
        core = ye[:, None] * dxi + dxi * ye[None, :]
        core -= yx[:, None] * deta + deta * yx[None, :]
        return 0.5 / g.jac.ravel()[:, None] * core

    def dense_dy(self) -> np.ndarray:
        g = self.grid
        dxi = g.ops.Dx.matrix
        deta = g.ops.Dy.matrix
        xx = g.x_xi.ravel()
        xe = g.x_eta.ravel()
        core = xx[:, None] * deta + deta * xx[None, :]
        core -= xe[:, None] * dxi + dxi * xe[None, :]
        return 0.5 / g.jac.ravel()[:, None] * core


def _bcast(field2d: np.ndarray, like: np.ndarray) -> np.ndarray:
    return field2d if like.ndim == 2 else field2d[..., None]


def build_curvilinear_diffops(grid: CurvilinearGrid) -> CurvilinearDiffOps:
    return CurvilinearDiffOps(grid)


@dataclass(frozen=True)
class BoundaryGeometry:
    """Arc lengths and outward normals along the four oriented segments.

    Segment arrays follow the counterclockwise trace orientation (segments 3
    and 4 reversed).  Composite operators live on the restricted boundary
    space of dimension 2N; the general normal operators are exact for any
    grid, the simplified ones only under corner compatibility.
    """

    seg_s: tuple[np.ndarray, ...]
    seg_nx: tuple[np.ndarray, ...]
    seg_ny: tuple[np.ndarray, ...]
    h_gamma_plus: np.ndarray
    embedding: np.ndarray
    h_gamma: np.ndarray
    s_composite: np.ndarray
    nx_general: np.ndarray
    ny_general: np.ndarray
    nx_simplified: np.ndarray
    ny_simplified: np.ndarray
    corner_compatible: bool

    @property
    def s_plus(self) -> np.ndarray:
        return np.concatenate(self.seg_s)

    @property
    def nx_plus(self) -> np.ndarray:
        return np.concatenate(self.seg_nx)

    @property
    def ny_plus(self) -> np.ndarray:
        return np.concatenate(self.seg_ny)


def build_boundary_geometry(grid: CurvilinearGrid, rtol: float = 1e-12) -> BoundaryGeometry:
    g = grid
    n1, n2 = g.ops.n1, g.ops.n2

    r_xi = np.sqrt(g.x_xi**2 + g.y_xi**2)
    r_eta = np.sqrt(g.x_eta**2 + g.y_eta**2)

    # oriented segments: bottom, right, top reversed, left reversed
    s1 = r_xi[0, :]
    s2 = r_eta[:, n1]
    s3 = r_xi[n2, :][::-1]
    s4 = r_eta[:, 0][::-1]
    seg_s = (s1, s2, s3, s4)

    with np.errstate(invalid="raise"):
        n1x = g.y_xi[0, :] / s1
        n1y = -g.x_xi[0, :] / s1
        n2x = g.y_eta[:, n1] / s2
        n2y = -g.x_eta[:, n1] / s2
        n3x = (-g.y_xi[n2, :] / r_xi[n2, :])[::-1]
        n3y = (g.x_xi[n2, :] / r_xi[n2, :])[::-1]
        n4x = (-g.y_eta[:, 0] / r_eta[:, 0])[::-1]
        n4y = (g.x_eta[:, 0] / r_eta[:, 0])[::-1]
    seg_nx = (n1x, n2x, n3x, n4x)
    seg_ny = (n1y, n2y, n3y, n4y)

    e = boundary_embedding_matrix(n1, n2)
    hgp = boundary_norm_gamma_plus(g.ops.h1, g.ops.h2)
    s_plus = np.concatenate(seg_s)
    nx_plus = np.concatenate(seg_nx)
    ny_plus = np.concatenate(seg_ny)

    h_gamma = e.T @ (hgp[:, None] * e)
    hg_diag = np.diag(h_gamma)
    s_comp = np.diag(e.T @ ((hgp * s_plus)[:, None] * e)) / hg_diag

    # E^+ = H_Gamma^{-1} E^T H_Gamma^(+) row by row (everything diagonal)
    e_pinv = (e.T * hgp[None, :]) / hg_diag[:, None]
    nx_gen = (e_pinv * (s_plus * nx_plus)[None, :]) @ e / s_comp[:, None]
    ny_gen = (e_pinv * (s_plus * ny_plus)[None, :]) @ e / s_comp[:, None]
    nx_simp = (e_pinv * nx_plus[None, :]) @ e
    ny_simp = (e_pinv * ny_plus[None, :]) @ e

    corners_ok = True
    for k in range(4):
        last = seg_s[k][-1]
        first = seg_s[(k + 1) % 4][0]
        if abs(last - first) > rtol * max(abs(last), abs(first)):
            corners_ok = False
    return BoundaryGeometry(
        seg_s=seg_s,
        seg_nx=seg_nx,
        seg_ny=seg_ny,
        h_gamma_plus=hgp,
        embedding=e,
        h_gamma=h_gamma,
        s_composite=s_comp,
        nx_general=nx_gen,
        ny_general=ny_gen,
        nx_simplified=nx_simp,
        ny_simplified=ny_simp,
        corner_compatible=corners_ok,
    )


def curvilinear_sbp_defect(
    grid: CurvilinearGrid,
    geom: BoundaryGeometry,
    u: np.ndarray,
    v: np.ndarray,
    direction: str = "x",
    normal_path: str = "general",
) -> float:
    """Relative defect of (u, D v) + (D u, v) = <u, N v> in one direction.

    The volume product uses J H, the boundary product the arc-length-weighted
    trace norm.  With the general normal operators the identity is exact up
    to roundoff for any metric mode.
    """
    diff = CurvilinearDiffOps(grid)
    apply_d = diff.apply_dx if direction == "x" else diff.apply_dy
    w = grid.jac * grid.ops.grid.as_array(grid.ops.h_diag)
    u2 = grid.ops.grid.as_array(u)
    v2 = grid.ops.grid.as_array(v)
    lhs = float(np.sum(w * (u2 * apply_d(v2) + apply_d(u2) * v2)))

    tu = boundary_trace(u2, grid.ops.grid).restricted
    tv = boundary_trace(v2, grid.ops.grid).restricted
    nmat = {
        ("x", "general"): geom.nx_general,
        ("y", "general"): geom.ny_general,
        ("x", "simplified"): geom.nx_simplified,
        ("y", "simplified"): geom.ny_simplified,
    }[(direction, normal_path)]
    hg_s = np.diag(geom.h_gamma) * geom.s_composite
    rhs = float(tu @ (hg_s * (nmat @ tv)))

    scale = max(
        np.sqrt(float(np.sum(w * u2**2)) * float(np.sum(w * v2**2))), 1e-300
    )
    return abs(lhs - rhs) / scale


def load_grid_coordinates(path, n1: int, n2: int) -> tuple[np.ndarray, np.ndarray]:
    """Read (i, j, x, y) rows from a plain-text or CSV table."""
    try:
        raw = np.loadtxt(path, delimiter=",")
    except ValueError:
        raw = np.loadtxt(path)
    raw = np.atleast_2d(raw)
    if raw.shape[1] != 4:
        raise ValueError("expected four columns: i, j, x, y")
    x = np.full((n2 + 1, n1 + 1), np.nan)
    y = np.full((n2 + 1, n1 + 1), np.nan)
    for i, j, xv, yv in raw:
        x[int(j), int(i)] = xv
        y[int(j), int(i)] = yv
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise ValueError("grid table does not cover every (i, j) point")
    return x, y
