"""Finite-dimensional weighted inner-product spaces and linear maps.

A space is R^n together with a symmetric positive definite weight matrix H
defining the scalar product (x, y) = x^T H y.  Operators between such spaces
carry their domain and codomain with them, which gives well-defined adjoints

    T* = H1^{-1} T^T H2

and, later on, weighted pseudoinverses.  Everything here is dense and
immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpaceError",
    "NotSPDError",
    "Norm",
    "Space",
    "LinearMap",
    "inner",
    "adjoint",
    "block_inverse_spd",
    "maxabs",
    "rel_defect",
]

SYMMETRY_RTOL = 1e-13


class SpaceError(ValueError):
    """Inconsistent space/operator construction."""


class NotSPDError(SpaceError):
    """Weight matrix is not symmetric positive definite."""


def maxabs(a) -> float:
    """Max-abs entry of an array (0.0 for empty)."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def rel_defect(defect, *references) -> float:
    """Max-abs of ``defect`` relative to the largest max-abs of the references."""
    scale = max([maxabs(r) for r in references] + [0.0])
    if scale == 0.0:
        return maxabs(defect)
    return maxabs(defect) / scale


@dataclass(frozen=True)
class Norm:
    """SPD weight matrix with a structural tag.

    structure is one of ``"diagonal"``, ``"restricted-full"`` or ``"full"``.
    For a diagonal norm all off-diagonal entries must vanish exactly; for a
    restricted-full norm the first and last rows/columns are zero apart from
    the diagonal entry, which decouples the boundary points.
    """

    matrix: np.ndarray
    structure: str = "full"
    dim: int = field(init=False)
    cholesky: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpaceError(f"norm matrix must be square, got {m.shape}")
        n = m.shape[0]
        scale = maxabs(m)
        if scale == 0.0 or maxabs(m - m.T) > SYMMETRY_RTOL * scale:
            raise NotSPDError("norm matrix is not symmetric")
        m = 0.5 * (m + m.T)
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError as exc:
            raise NotSPDError("norm matrix is not positive definite") from exc
        if self.structure == "diagonal":
            if np.any(m - np.diag(np.diag(m))):
                raise SpaceError("diagonal norm has nonzero off-diagonal entries")
        elif self.structure == "restricted-full":
            for row in (0, n - 1):
                off = np.delete(m[row], row)
                if np.any(off):
                    raise SpaceError(
                        "restricted-full norm couples a boundary point"
                    )
        elif self.structure != "full":
            raise SpaceError(f"unknown norm structure {self.structure!r}")
        m.setflags(write=False)
        chol.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "cholesky", chol)

    @staticmethod
    def diagonal(weights) -> "Norm":
        return Norm(np.diag(np.asarray(weights, dtype=float)), "diagonal")

    @staticmethod
    def identity(n: int) -> "Norm":
        return Norm(np.eye(n), "diagonal")

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.matrix)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """H^{-1} b via the cached Cholesky factor."""
        g = self.cholesky
        y = np.linalg.solve(g, b)
        return np.linalg.solve(g.T, y)


@dataclass(frozen=True)
class Space:
    """R^dim equipped with the scalar product of ``norm``."""

    dim: int
    norm: Norm

    def __post_init__(self):
        if self.norm.dim != self.dim:
            raise SpaceError(
                f"norm dimension {self.norm.dim} != space dimension {self.dim}"
            )

    @staticmethod
    def euclidean(n: int) -> "Space":
        return Space(n, Norm.identity(n))

    @staticmethod
    def weighted(norm: Norm) -> "Space":
        return Space(norm.dim, norm)


def inner(space: Space, x, y) -> float:
    """Scalar product x^T H y in ``space``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (space.dim,) or y.shape != (space.dim,):
        raise SpaceError("vector length does not match space dimension")
    return float(x @ space.norm.matrix @ y)


@dataclass(frozen=True)
class LinearMap:
    """Dense operator between two weighted spaces."""

    matrix: np.ndarray
    domain: Space
    codomain: Space

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise SpaceError("operator matrix must be 2-D")
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise SpaceError(
                f"operator shape {m.shape} does not map "
                f"dim {self.domain.dim} -> dim {self.codomain.dim}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.domain.dim:
            raise SpaceError("vector length does not match operator domain")
        return self.matrix @ x

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if other.codomain.dim != self.domain.dim:
            raise SpaceError("operator composition shape mismatch")
        return LinearMap(self.matrix @ other.matrix, other.domain, self.codomain)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix + other.matrix, self.domain, self.codomain)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix - other.matrix, self.domain, self.codomain)

    def __rmul__(self, scalar: float) -> "LinearMap":
        return LinearMap(scalar * self.matrix, self.domain, self.codomain)

    @staticmethod
    def identity(space: Space) -> "LinearMap":
        return LinearMap(np.eye(space.dim), space, space)


def adjoint(t: LinearMap) -> LinearMap:
    """Adjoint T*: codomain -> domain, with matrix H1^{-1} T^T H2."""
    h1 = t.domain.norm
    h2 = t.codomain.norm
    mat = h1.solve(t.matrix.T @ h2.matrix)
    return LinearMap(mat, t.codomain, t.domain)


def block_inverse_spd(h: Norm, split: int) -> np.ndarray:
    """Inverse of an SPD matrix assembled from its 2x2 block partition.

    The inverse is built from the Schur complement S = H22 - H21 H11^{-1} H12,

        [ H11^{-1} + H11^{-1} H12 S^{-1} H21 H11^{-1}    -H11^{-1} H12 S^{-1} ]
        [            -S^{-1} H21 H11^{-1}                       S^{-1}        ]
    """
    n = h.dim
    if not 0 < split < n:
        raise SpaceError(f"split {split} outside (0, {n})")
    m = h.matrix
    h11 = m[:split, :split]
    h12 = m[:split, split:]
    h21 = m[split:, :split]
    h22 = m[split:, split:]
    h11_inv = np.linalg.inv(h11)
    s = h22 - h21 @ h11_inv @ h12
    s_inv = np.linalg.inv(s)
    top_left = h11_inv + h11_inv @ h12 @ s_inv @ h21 @ h11_inv
    top_right = -h11_inv @ h12 @ s_inv
    out = np.block([[top_left, top_right], [-s_inv @ h21 @ h11_inv, s_inv]])
    return out
