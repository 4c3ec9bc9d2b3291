"""Two-block 1D SBP operators joined by an embedding, with no penalty terms.

The union grid on [0, 1] duplicates the interface point into a longer
"augmented" state; the 0/1 embedding E maps union states to augmented ones.
With H = E^T H^(+) E the embedding is an isometry, E^+ = E*, and

    D = E^+ D^(+) E

is again an SBP operator on the union grid.  Its interface row is the
chi-weighted mean of the two one-sided rows, chi = h1_NN / (h1_NN + h2_00).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sbp1d import SbpPair1D
from .spaces import LinearMap, Norm, Space, SpaceError

__all__ = [
    "Embedding1D",
    "MultiBlockAssembly1D",
    "build_embedding1d",
    "assemble_multiblock1d",
    "multiblock_interface_row",
]


def embedding_matrix_1d(n1: int, n2: int) -> np.ndarray:
    """(N+2) x (N+1) 0/1 matrix duplicating index n1, N = n1 + n2."""
    if n1 < 1 or n2 < 1:
        raise ValueError("both blocks need at least one interval")
    n = n1 + n2
    e = np.zeros((n + 2, n + 1))
    e[: n1 + 1, : n1 + 1] = np.eye(n1 + 1)
    e[n1 + 1 :, n1:] = np.eye(n2 + 1)
    return e


@dataclass(frozen=True)
class Embedding1D:
    """E: V -> V_+ for two 1D blocks sharing the interface point."""

    E: LinearMap
    chi: float
    n1: int
    n2: int

    @property
    def matrix(self) -> np.ndarray:
        return self.E.matrix

    def adjoint_matrix(self) -> np.ndarray:
        """E* = H^{-1} E^T H^(+); equals E^+ since E is an isometry."""
        h = self.E.domain.norm
        hplus = self.E.codomain.norm.matrix
        return h.solve(self.E.matrix.T @ hplus)


@dataclass(frozen=True)
class MultiBlockAssembly1D:
    """Composite (H, D) on the union grid plus its building blocks."""

    H: Norm
    D: LinearMap
    embedding: Embedding1D
    parts: tuple[SbpPair1D, SbpPair1D]

    @property
    def n(self) -> int:
        return self.embedding.n1 + self.embedding.n2

    @property
    def space(self) -> Space:
        return self.D.domain

    @property
    def grid(self) -> np.ndarray:
        a, b = self.parts
        left = 0.5 * np.linspace(0.0, 1.0, a.N + 1)
        right = 0.5 + 0.5 * np.linspace(0.0, 1.0, b.N + 1)
        return np.concatenate([left, right[1:]])


def build_embedding1d(n1: int, n2: int) -> np.ndarray:
    """Bare embedding matrix; see ``assemble_multiblock1d`` for the operator."""
    return embedding_matrix_1d(n1, n2)


def assemble_multiblock1d(a: SbpPair1D, b: SbpPair1D) -> MultiBlockAssembly1D:
    """Join two diagonal-norm SBP blocks covering [0, 1/2] and [1/2, 1].

    Each block's own operators live on a unit reference interval; the
    half-width rescaling (factor 2) is applied here.
    """
    if a.H.structure != "diagonal" or b.H.structure != "diagonal":
        raise SpaceError("multiblock assembly requires diagonal block norms")
    n1, n2 = a.N, b.N
    n = n1 + n2
    e = embedding_matrix_1d(n1, n2)

    # physical mesh sizes on the half intervals
    ha = np.diag(a.H.matrix) * 0.5
    hb = np.diag(b.H.matrix) * 0.5
    da = a.D.matrix * 2.0
    db = b.D.matrix * 2.0

    hplus = np.concatenate([ha, hb])
    hdiag = e.T @ (hplus[:, None] * e)
    h_norm = Norm.diagonal(np.diag(hdiag))
    space = Space(n + 1, h_norm)

    chi = ha[-1] / (ha[-1] + hb[0])

    dplus = np.zeros((n + 2, n + 2))
    dplus[: n1 + 1, : n1 + 1] = da
    dplus[n1 + 1 :, n1 + 1 :] = db
    dmat = (e.T @ (hplus[:, None] * (dplus @ e))) / np.diag(hdiag)[:, None]

    aug_norm = Norm.diagonal(hplus)
    aug_space = Space(n + 2, aug_norm)
    embedding = Embedding1D(
        E=LinearMap(e, space, aug_space), chi=float(chi), n1=n1, n2=n2
    )
    return MultiBlockAssembly1D(
        H=h_norm,
        D=LinearMap(dmat, space, space),
        embedding=embedding,
        parts=(a, b),
    )


def multiblock_interface_row(assembly: MultiBlockAssembly1D) -> np.ndarray:
    """Row n1 of the composite D: the chi-weighted mean of the one-sided rows."""
    return assembly.D.matrix[assembly.embedding.n1].copy()
