"""Single-block and multi-block 2D SBP operators via tensor products.

States are row-major: index(i, j) = j*(N1+1) + i, with i the x-index.  The
2D norm is H = H2 (x) H1 and the derivative operators are

    Dx = I2 (x) D1,      Dy = D2 (x) I1.

Multi-block operators joined in x (or y) reuse the 1D embedding machinery on
the corresponding factor; the four-block union composes an x-join inside each
horizontal slab with a final y-join, or the other way around, and both orders
give the same operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multiblock1d import MultiBlockAssembly1D, assemble_multiblock1d
from .sbp1d import SbpPair1D
from .spaces import LinearMap, Norm, Space, SpaceError

__all__ = [
    "Grid2D",
    "Block2D",
    "Ops2D",
    "BoundaryTrace2D",
    "build_ops2d",
    "boundary_trace",
    "boundary_embedding_matrix",
    "boundary_norm_gamma_plus",
    "boundary_norm_gamma",
    "assemble_two_block_x",
    "assemble_two_block_y",
    "assemble_four_block",
    "four_block_explicit",
    "build_char_bc_2d",
    "char_bc_commuting_weight",
]


@dataclass(frozen=True)
class Grid2D:
    """Index bookkeeping for an (N1+1) x (N2+1) tensor grid."""

    n1: int
    n2: int

    @property
    def npoints(self) -> int:
        return (self.n1 + 1) * (self.n2 + 1)

    def index(self, i: int, j: int) -> int:
        return j * (self.n1 + 1) + i

    def row_to_col_permutation(self) -> np.ndarray:
        """perm with u_col = u[perm]; column view is (i outer, j inner)."""
        n1, n2 = self.n1, self.n2
        perm = np.empty(self.npoints, dtype=int)
        for i in range(n1 + 1):
            for j in range(n2 + 1):
                perm[i * (n2 + 1) + j] = self.index(i, j)
        return perm

    def as_array(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(u).reshape(self.n2 + 1, self.n1 + 1)


@dataclass(frozen=True)
class Block2D:
    """One rectangular block: its x- and y-direction 1D SBP pairs."""

    opx: SbpPair1D
    opy: SbpPair1D


class Ops2D:
    """2D SBP operator set assembled from 1D factors.

    ``h1``/``h2`` are the diagonal 1D norm weights and ``d1``/``d2`` the 1D
    derivative matrices, already at physical scale.  Dense Kronecker forms
    are built on demand.
    """

    def __init__(self, h1, d1, h2, d2, *, xgrid=None, ygrid=None):
        self.h1 = np.asarray(h1, dtype=float)
        self.d1 = np.asarray(d1, dtype=float)
        self.h2 = np.asarray(h2, dtype=float)
        self.d2 = np.asarray(d2, dtype=float)
        self.n1 = self.d1.shape[0] - 1
        self.n2 = self.d2.shape[0] - 1
        self.grid = Grid2D(self.n1, self.n2)
        self.xgrid = np.linspace(0.0, 1.0, self.n1 + 1) if xgrid is None else np.asarray(xgrid)
        self.ygrid = np.linspace(0.0, 1.0, self.n2 + 1) if ygrid is None else np.asarray(ygrid)
        self._cache = {}

    # -- dense views -------------------------------------------------------
    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def h_diag(self) -> np.ndarray:
        return self._cached("h_diag", lambda: np.kron(self.h2, self.h1))

    @property
    def H(self) -> Norm:
        return self._cached("H", lambda: Norm.diagonal(self.h_diag))

    @property
    def space(self) -> Space:
        return self._cached("space", lambda: Space(self.grid.npoints, self.H))

    @property
    def Hx(self) -> np.ndarray:
        return self._cached(
            "Hx", lambda: np.kron(np.eye(self.n2 + 1), np.diag(self.h1))
        )

    @property
    def Hy(self) -> np.ndarray:
        return self._cached(
            "Hy", lambda: np.kron(np.diag(self.h2), np.eye(self.n1 + 1))
        )

    @property
    def Dx(self) -> LinearMap:
        def build():
            mat = np.kron(np.eye(self.n2 + 1), self.d1)
            return LinearMap(mat, self.space, self.space)

        return self._cached("Dx", build)

    @property
    def Dy(self) -> LinearMap:
        def build():
            mat = np.kron(self.d2, np.eye(self.n1 + 1))
            return LinearMap(mat, self.space, self.space)

        return self._cached("Dy", build)

    # -- matrix-free applications -------------------------------------------
    # scalar states are (n2+1, n1+1) arrays; an optional trailing axis holds
    # field components
    def apply_dx(self, u: np.ndarray) -> np.ndarray:
        arr = np.asarray(u)
        flat = arr.ndim == 1
        if flat:
            arr = self.grid.as_array(arr)
        out = np.moveaxis(np.tensordot(arr, self.d1, axes=(1, 1)), -1, 1)
        return out.ravel() if flat else out

    def apply_dy(self, u: np.ndarray) -> np.ndarray:
        arr = np.asarray(u)
        flat = arr.ndim == 1
        if flat:
            arr = self.grid.as_array(arr)
        out = np.tensordot(self.d2, arr, axes=(1, 0))
        return out.ravel() if flat else out


def build_ops2d(opx: SbpPair1D, opy: SbpPair1D) -> Ops2D:
    """Single-block tensor operators on the unit square."""
    return Ops2D(
        opx.H.diag, opx.D.matrix, opy.H.diag, opy.D.matrix,
        xgrid=opx.grid, ygrid=opy.grid,
    )


# ---------------------------------------------------------------------------
# boundary trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryTrace2D:
    """Counterclockwise boundary segments of a 2D state.

    ``segments`` hold the full (endpoint-inclusive) oriented segments; the
    embedded vector stacks them (length 2(N+2)), the restricted vector drops
    each segment's last entry (length 2N), N = N1 + N2.
    """

    segments: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @property
    def embedded(self) -> np.ndarray:
        return np.concatenate(self.segments)

    @property
    def restricted(self) -> np.ndarray:
        return np.concatenate([s[:-1] for s in self.segments])


def boundary_trace(u: np.ndarray, grid: Grid2D) -> BoundaryTrace2D:
    """Oriented traversal: bottom, right, top (reversed), left (reversed)."""
    arr = grid.as_array(u)
    g1 = arr[0, :].copy()
    g2 = arr[:, grid.n1].copy()
    g3 = arr[grid.n2, :][::-1].copy()
    g4 = arr[:, 0][::-1].copy()
    return BoundaryTrace2D((g1, g2, g3, g4))


def boundary_embedding_matrix(n1: int, n2: int) -> np.ndarray:
    """E in R^{2(N+2) x 2N} embedding the restricted trace, N = n1 + n2.

    Each restricted segment fills the head of its embedded segment; the
    embedded segment's last entry duplicates the next segment's first point
    (corner sharing).
    """
    sizes = (n1, n2, n1, n2)
    offsets = np.concatenate([[0], np.cumsum(sizes)])[:4]
    total = 2 * (n1 + n2)
    e = np.zeros((total + 4, total))
    row = 0
    for k, m in enumerate(sizes):
        for i in range(m + 1):
            col = offsets[k] + i if i < m else offsets[(k + 1) % 4]
            e[row, col] = 1.0
            row += 1
    return e


def boundary_norm_gamma_plus(h1_diag, h2_diag) -> np.ndarray:
    """Diagonal of H_Gamma^(+) = blockdiag(H1, H2, J H1 J, J H2 J)."""
    h1 = np.asarray(h1_diag, dtype=float)
    h2 = np.asarray(h2_diag, dtype=float)
    return np.concatenate([h1, h2, h1[::-1], h2[::-1]])


def boundary_norm_gamma(h1_diag, h2_diag) -> Norm:
    """H_Gamma = E^T H_Gamma^(+) E on the restricted boundary space."""
    n1 = len(h1_diag) - 1
    n2 = len(h2_diag) - 1
    e = boundary_embedding_matrix(n1, n2)
    w = boundary_norm_gamma_plus(h1_diag, h2_diag)
    mat = e.T @ (w[:, None] * e)
    off = mat - np.diag(np.diag(mat))
    structure = "diagonal" if not np.any(off) else "full"
    return Norm(mat, structure)


# ---------------------------------------------------------------------------
# multi-block assembly
# ---------------------------------------------------------------------------

def _require_same_op(a: SbpPair1D, b: SbpPair1D, what: str) -> None:
    if a.interior_order != b.interior_order or a.N != b.N:
        raise SpaceError(f"blocks must share the {what} operator")


def assemble_two_block_x(left: Block2D, right: Block2D) -> Ops2D:
    """Join two blocks across a vertical interface; y-operators must match."""
    _require_same_op(left.opy, right.opy, "y-direction")
    mb = assemble_multiblock1d(left.opx, right.opx)
    return Ops2D(
        mb.H.diag, mb.D.matrix, left.opy.H.diag, left.opy.D.matrix,
        xgrid=mb.grid, ygrid=left.opy.grid,
    )


def assemble_two_block_y(bottom: Block2D, top: Block2D) -> Ops2D:
    """Join two blocks across a horizontal interface; x-operators must match."""
    _require_same_op(bottom.opx, top.opx, "x-direction")
    mb = assemble_multiblock1d(bottom.opy, top.opy)
    return Ops2D(
        bottom.opx.H.diag, bottom.opx.D.matrix, mb.H.diag, mb.D.matrix,
        xgrid=bottom.opx.grid, ygrid=mb.grid,
    )


def _check_four_block(blocks) -> None:
    if len(blocks) != 2 or any(len(col) != 2 for col in blocks):
        raise SpaceError("four-block assembly expects a 2x2 block array")
    for i in range(2):
        _require_same_op(blocks[i][0].opx, blocks[i][1].opx, "x-direction")
    for j in range(2):
        _require_same_op(blocks[0][j].opy, blocks[1][j].opy, "y-direction")


def assemble_four_block(blocks) -> Ops2D:
    """Union operators for a 2x2 block layout; blocks[i][j], i = x, j = y.

    The per-direction factors must match along each interface line, after
    which the union operators are the tensor products of the two 1D
    multi-block operators (the x-then-y and y-then-x embeddings give the
    same result; see ``four_block_explicit``).
    """
    _check_four_block(blocks)
    mbx = assemble_multiblock1d(blocks[0][0].opx, blocks[1][0].opx)
    mby = assemble_multiblock1d(blocks[0][0].opy, blocks[0][1].opy)
    ops = Ops2D(
        mbx.H.diag, mbx.D.matrix, mby.H.diag, mby.D.matrix,
        xgrid=mbx.grid, ygrid=mby.grid,
    )
    # both 2D joins scale every block by 1/2 per direction, which is exactly
    # what the two 1D assemblies already encode
    return ops


def _mb_pieces(mb: MultiBlockAssembly1D):
    e = mb.embedding.matrix
    n1 = mb.embedding.n1
    return e[: n1 + 1, :], e[n1 + 1 :, :]


def four_block_explicit(blocks, order: str = "xy"):
    """Dense (H, Dx, Dy) built through explicit embedding products.

    ``order="xy"`` joins in x inside each horizontal slab and then in y;
    ``order="yx"`` the other way around.  Except for roundoff both agree
    with each other and with ``assemble_four_block``.
    """
    _check_four_block(blocks)
    if order not in ("xy", "yx"):
        raise ValueError("order must be 'xy' or 'yx'")

    mbx = assemble_multiblock1d(blocks[0][0].opx, blocks[1][0].opx)
    mby = assemble_multiblock1d(blocks[0][0].opy, blocks[0][1].opy)

    def block_pieces(i, j):
        bx = blocks[i][j].opx
        by = blocks[i][j].opy
        hx = bx.H.diag * 0.5
        hy = by.H.diag * 0.5
        dx = bx.D.matrix * 2.0
        dy = by.D.matrix * 2.0
        return hx, dx, hy, dy

    ex = _mb_pieces(mbx)
    ey = _mb_pieces(mby)

    def join(embeds, parts):
        """Sum_i E_i^T H_i E_i etc. for parts [(h_i, ops_i...)] of any count."""
        hsum = 0.0
        sums = None
        for e_i, (h_i, *ops_i) in zip(embeds, parts):
            hsum = hsum + e_i.T @ (h_i[:, None] * e_i)
            contribs = [e_i.T @ (h_i[:, None] * (op @ e_i)) for op in ops_i]
            sums = contribs if sums is None else [s + c for s, c in zip(sums, contribs)]
        hinv = np.linalg.inv(hsum)
        return hsum, [hinv @ s for s in sums]

    if order == "xy":
        slabs = []
        for j in range(2):
            embeds, parts = [], []
            for i in range(2):
                hx, dx, hy, dy = block_pieces(i, j)
                nyj = blocks[i][j].opy.N
                e_ij = np.kron(np.eye(nyj + 1), ex[i])
                h_ij = np.kron(hy, hx)
                dmat_x = np.kron(np.eye(nyj + 1), dx)
                dmat_y = np.kron(dy, np.eye(hx.size))
                embeds.append(e_ij)
                parts.append((h_ij, dmat_x, dmat_y))
            hj, (dxj, dyj) = join(embeds, parts)
            slabs.append((np.diag(hj), dxj, dyj))
        n1u = mbx.n
        embeds = [np.kron(ey[j], np.eye(n1u + 1)) for j in range(2)]
        parts = [(slabs[j][0], slabs[j][1], slabs[j][2]) for j in range(2)]
        h, (dx_u, dy_u) = join(embeds, parts)
        return h, dx_u, dy_u

    columns = []
    for i in range(2):
        embeds, parts = [], []
        for j in range(2):
            hx, dx, hy, dy = block_pieces(i, j)
            e_ij = np.kron(ey[j], np.eye(hx.size))
            h_ij = np.kron(hy, hx)
            dmat_x = np.kron(np.eye(hy.size), dx)
            dmat_y = np.kron(dy, np.eye(hx.size))
            embeds.append(e_ij)
            parts.append((h_ij, dmat_x, dmat_y))
        hi, (dxi, dyi) = join(embeds, parts)
        columns.append((np.diag(hi), dxi, dyi))
    n2u = mby.n
    embeds = [np.kron(np.eye(n2u + 1), ex[i]) for i in range(2)]
    parts = [(columns[i][0], columns[i][1], columns[i][2]) for i in range(2)]
    h, (dx_u, dy_u) = join(embeds, parts)
    return h, dx_u, dy_u


# ---------------------------------------------------------------------------
# characteristic boundary conditions in 2D
# ---------------------------------------------------------------------------

def _char_block_padded(q: np.ndarray, s: np.ndarray, d_in: int) -> np.ndarray:
    """Padded d x d block ([I 0 -S] on the ingoing rows) times Q^T."""
    d = q.shape[0]
    lead = np.zeros((d, d))
    lead[:d_in, :d_in] = np.eye(d_in)
    lead[:d_in, d - s.shape[1] :] = -s
    return lead @ q.T


def build_char_bc_2d(ops: Ops2D, qs, ss, d_ins, d: int) -> np.ndarray:
    """Block boundary operator L: V -> V_Gamma+ for a d-component system.

    qs/ss/d_ins give, per segment k = 1..4, the eigenvector matrix, the
    coupling block and the ingoing multiplicity.  State ordering is
    point-major with d components per point.
    """
    n1, n2 = ops.n1, ops.n2
    i1 = np.eye(n1 + 1)
    i2 = np.eye(n2 + 1)
    l0 = [
        _char_block_padded(np.asarray(qs[k]), np.atleast_2d(ss[k]), d_ins[k])
        for k in range(4)
    ]
    r1 = np.kron(np.kron(i2[0:1, :], i1), l0[0])
    r2 = np.kron(np.kron(i2, i1[n1 : n1 + 1, :]), l0[1])
    r3 = np.kron(np.kron(i2[n2 : n2 + 1, :], i1), l0[2])
    r4 = np.kron(np.kron(i2, i1[0:1, :]), l0[3])
    return np.vstack([r1, r2, r3, r4])


def char_bc_commuting_weight(ops: Ops2D, d: int) -> np.ndarray:
    """Diagonal of H_bar with L H = H_bar L for the segment-stacked L."""
    h1, h2 = ops.h1, ops.h2
    parts = [
        h2[0] * np.kron(h1, np.ones(d)),
        h1[-1] * np.kron(h2, np.ones(d)),
        h2[-1] * np.kron(h1, np.ones(d)),
        h1[0] * np.kron(h2, np.ones(d)),
    ]
    return np.concatenate(parts)
