import numpy as np
import pytest

from sbpproj.sbp1d import build_sbp1d
from sbpproj.spaces import maxabs
from sbpproj.tensor2d import (
    Block2D,
    Grid2D,
    assemble_four_block,
    assemble_two_block_x,
    assemble_two_block_y,
    boundary_embedding_matrix,
    boundary_norm_gamma,
    boundary_norm_gamma_plus,
    boundary_trace,
    build_char_bc_2d,
    build_ops2d,
    char_bc_commuting_weight,
    four_block_explicit,
)


def boundary_matrix(n):
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return b


def sbp_defect_2d(ops):
    """Max relative defect of the x- and y-direction matrix identities."""
    h = ops.H.matrix
    bx = np.kron(np.diag(ops.h2), boundary_matrix(ops.n1 + 1))
    by = np.kron(boundary_matrix(ops.n2 + 1), np.diag(ops.h1))
    out = 0.0
    for d, b in ((ops.Dx.matrix, bx), (ops.Dy.matrix, by)):
        hd = h @ d
        out = max(out, maxabs(hd + hd.T - b) / maxabs(hd))
    return out


class TestGrid2D:
    def test_index_round_trip(self):
        grid = Grid2D(3, 4)
        perm = grid.row_to_col_permutation()
        u = np.arange(grid.npoints)
        ucol = u[perm]
        # inverse permutation restores the row view
        inv = np.argsort(perm)
        assert np.array_equal(ucol[inv], u)


class TestSingleBlock:
    def test_dx_on_x(self):
        ops = build_ops2d(build_sbp1d(4, 10), build_sbp1d(4, 8))
        xi, eta = np.meshgrid(ops.xgrid, ops.ygrid)
        assert maxabs(ops.apply_dx(xi) - 1.0) < 1e-11
        assert maxabs(ops.apply_dy(eta) - 1.0) < 1e-11

    def test_mixed_product_law(self, rng):
        a, b = rng.standard_normal((3, 4)), rng.standard_normal((2, 5))
        c, d = rng.standard_normal((4, 3)), rng.standard_normal((5, 2))
        lhs = np.kron(a, b) @ np.kron(c, d)
        rhs = np.kron(a @ c, b @ d)
        assert maxabs(lhs - rhs) < 1e-12 * maxabs(rhs)

    def test_kron_inverse_transpose(self, rng):
        a = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        b = rng.standard_normal((4, 4)) + 4 * np.eye(4)
        assert (
            maxabs(np.linalg.inv(np.kron(a, b)) - np.kron(np.linalg.inv(a), np.linalg.inv(b)))
            < 1e-9
        )
        assert maxabs(np.kron(a, b).T - np.kron(a.T, b.T)) == 0.0

    def test_2d_partsum(self, rng):
        ops = build_ops2d(build_sbp1d(4, 10), build_sbp1d(2, 8))
        u = rng.standard_normal(ops.grid.npoints)
        v = rng.standard_normal(ops.grid.npoints)
        hmat = ops.H.matrix
        lhs = u @ hmat @ ops.Dx(v) + ops.Dx(u) @ hmat @ v
        ua = ops.grid.as_array(u)
        va = ops.grid.as_array(v)
        h2 = ops.h2
        rhs = float(
            ua[:, -1] @ (h2 * va[:, -1]) - ua[:, 0] @ (h2 * va[:, 0])
        )
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)

    def test_norm_commutations(self):
        ops = build_ops2d(build_sbp1d(4, 10), build_sbp1d(4, 8))
        hx, hy = ops.Hx, ops.Hy
        assert maxabs(hx @ hy - ops.H.matrix) < 1e-14
        assert maxabs(hx @ hy - hy @ hx) < 1e-14
        dx, dy = ops.Dx.matrix, ops.Dy.matrix
        assert maxabs(dx @ hy - hy @ dx) < 1e-12
        assert maxabs(dy @ hx - hx @ dy) < 1e-12

    def test_matrix_free_matches_dense(self, rng):
        ops = build_ops2d(build_sbp1d(4, 10), build_sbp1d(6, 12))
        u = rng.standard_normal(ops.grid.npoints)
        assert maxabs(ops.apply_dx(u) - ops.Dx(u)) < 1e-12
        assert maxabs(ops.apply_dy(u) - ops.Dy(u)) < 1e-12


class TestBoundaryTrace:
    def test_constant_field(self):
        ops = build_ops2d(build_sbp1d(2, 8), build_sbp1d(2, 6))
        trace = boundary_trace(np.ones(ops.grid.npoints), ops.grid)
        assert all(maxabs(seg - 1.0) == 0.0 for seg in trace.segments)
        hg = boundary_norm_gamma(ops.h1, ops.h2)
        ones = np.ones(2 * (ops.n1 + ops.n2))
        assert abs(ones @ hg.matrix @ ones - 4.0) < 1e-12

    def test_corner_duplication(self, rng):
        grid = Grid2D(4, 5)
        u = rng.standard_normal(grid.npoints)
        trace = boundary_trace(u, grid)
        segs = trace.segments
        for k in range(4):
            assert segs[k][-1] == segs[(k + 1) % 4][0]

    def test_embedding_round_trip(self, rng):
        grid = Grid2D(4, 5)
        u = rng.standard_normal(grid.npoints)
        trace = boundary_trace(u, grid)
        e = boundary_embedding_matrix(4, 5)
        assert maxabs(e @ trace.restricted - trace.embedded) == 0.0

    def test_gamma_norm_positive_and_consistent(self, rng):
        ops = build_ops2d(build_sbp1d(4, 8), build_sbp1d(4, 10))
        hg = boundary_norm_gamma(ops.h1, ops.h2)
        assert np.all(np.linalg.eigvalsh(hg.matrix) > 0.0)
        # two evaluation paths of the boundary product agree
        u = rng.standard_normal(ops.grid.npoints)
        v = rng.standard_normal(ops.grid.npoints)
        tu = boundary_trace(u, ops.grid)
        tv = boundary_trace(v, ops.grid)
        via_norm = tu.restricted @ hg.matrix @ tv.restricted
        w = boundary_norm_gamma_plus(ops.h1, ops.h2)
        via_segments = float(np.sum(w * tu.embedded * tv.embedded))
        assert abs(via_norm - via_segments) < 1e-12 * max(abs(via_norm), 1.0)


class TestTwoBlock:
    def test_x_join_identity_and_consistency(self, rng):
        op = build_sbp1d(4, 8)
        ops = assemble_two_block_x(Block2D(op, op), Block2D(op, op))
        assert sbp_defect_2d(ops) < 1e-12
        xi, eta = np.meshgrid(ops.xgrid, ops.ygrid)
        assert maxabs(ops.apply_dx(xi) - 1.0) < 1e-10
        # interface column: centered antisymmetric stencil for equal h
        row = ops.d1[8]
        assert row[8] == 0.0
        assert maxabs(row[9:11] + row[7:5:-1]) < 1e-12

    def test_x_join_needs_matching_y(self):
        from sbpproj.spaces import SpaceError

        with pytest.raises(SpaceError):
            assemble_two_block_x(
                Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8)),
                Block2D(build_sbp1d(4, 8), build_sbp1d(4, 10)),
            )

    def test_embedding_pinv_relation(self):
        # E_x^* E_x = I through the 1D factor
        from sbpproj.multiblock1d import assemble_multiblock1d

        mb = assemble_multiblock1d(build_sbp1d(4, 8), build_sbp1d(4, 12))
        e = mb.embedding
        ex = np.kron(np.eye(5), e.matrix)
        ex_adj = np.kron(np.eye(5), e.adjoint_matrix())
        assert maxabs(ex_adj @ ex - np.eye(5 * (mb.n + 1))) < 1e-12

    def test_y_join_mirrors_x(self, rng):
        opx = build_sbp1d(4, 8)
        ops = assemble_two_block_y(Block2D(opx, build_sbp1d(4, 8)), Block2D(opx, build_sbp1d(4, 12)))
        assert sbp_defect_2d(ops) < 1e-12
        xi, eta = np.meshgrid(ops.xgrid, ops.ygrid)
        assert maxabs(ops.apply_dy(eta) - 1.0) < 1e-10

    def test_random_sbp_defect(self, rng):
        op = build_sbp1d(6, 12)
        ops = assemble_two_block_x(Block2D(op, op), Block2D(op, op))
        u = rng.standard_normal(ops.grid.npoints)
        v = rng.standard_normal(ops.grid.npoints)
        hmat = ops.H.matrix
        lhs = u @ hmat @ ops.Dx(v) + ops.Dx(u) @ hmat @ v
        ua, va = ops.grid.as_array(u), ops.grid.as_array(v)
        rhs = float(ua[:, -1] @ (ops.h2 * va[:, -1]) - ua[:, 0] @ (ops.h2 * va[:, 0]))
        scale = np.linalg.norm(u) * np.linalg.norm(v)
        assert abs(lhs - rhs) < 1e-12 * scale


class TestFourBlock:
    def test_identical_blocks_vs_single(self):
        blk = Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8))
        union = assemble_four_block([[blk, blk], [blk, blk]])
        # equals the single-block operator on the union grid away from the
        # interface region (rows within one closure width of the join)
        single = build_sbp1d(4, 16)
        r = single.closure_width
        n1 = 8
        outside = [i for i in range(17) if not (n1 - r < i < n1 + r)]
        diff = union.d1[outside] - single.D.matrix[outside]
        assert maxabs(diff) < 1e-11 / single.h
        inside = union.d1[n1 - r + 1 : n1 + r] - single.D.matrix[n1 - r + 1 : n1 + r]
        assert maxabs(inside) > 1.0  # the interface rows genuinely differ
        assert maxabs(np.diag(np.kron(union.h2, union.h1))) > 0
        assert sbp_defect_2d(union) < 1e-12

    def test_assembly_order_independence(self):
        blk = Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8))
        blocks = [[blk, blk], [blk, blk]]
        h_xy, dx_xy, dy_xy = four_block_explicit(blocks, "xy")
        h_yx, dx_yx, dy_yx = four_block_explicit(blocks, "yx")
        assert maxabs(h_xy - h_yx) < 1e-13 * maxabs(h_xy)
        assert maxabs(dx_xy - dx_yx) < 1e-13 * maxabs(dx_xy)
        assert maxabs(dy_xy - dy_yx) < 1e-13 * maxabs(dy_xy)

    def test_kron_shortcut_matches_explicit(self):
        blk = Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8))
        blocks = [[blk, blk], [blk, blk]]
        union = assemble_four_block(blocks)
        h_xy, dx_xy, dy_xy = four_block_explicit(blocks, "xy")
        assert maxabs(np.kron(union.h2, union.h1) - np.diag(h_xy)) < 1e-14
        assert maxabs(union.Dx.matrix - dx_xy) < 1e-13 * maxabs(dx_xy)
        assert maxabs(union.Dy.matrix - dy_xy) < 1e-13 * maxabs(dy_xy)

    def test_consistency_on_union(self):
        blk = Block2D(build_sbp1d(6, 12), build_sbp1d(6, 12))
        union = assemble_four_block([[blk, blk], [blk, blk]])
        xi, eta = np.meshgrid(union.xgrid, union.ygrid)
        assert maxabs(union.apply_dx(xi) - 1.0) < 1e-10
        assert maxabs(union.apply_dy(eta) - 1.0) < 1e-10

    def test_mismatched_blocks_rejected(self):
        from sbpproj.spaces import SpaceError

        blk = Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8))
        other = Block2D(build_sbp1d(4, 10), build_sbp1d(4, 8))
        with pytest.raises(SpaceError):
            assemble_four_block([[blk, other], [blk, blk]])


class TestCharBc2D:
    def test_commutation_and_projection(self, rng):
        d = 3
        ops = build_ops2d(build_sbp1d(4, 8), build_sbp1d(4, 10))
        qs = []
        ss = []
        d_ins = []
        for _ in range(4):
            q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            d_in = int(rng.integers(1, d))
            qs.append(q)
            ss.append(0.1 * rng.standard_normal((d_in, d - d_in)))
            d_ins.append(d_in)
        lmat = build_char_bc_2d(ops, qs, ss, d_ins, d)
        h = np.kron(np.kron(np.diag(ops.h2), np.diag(ops.h1)), np.eye(d))
        hbar = char_bc_commuting_weight(ops, d)
        # L H = H_bar L
        assert maxabs(lmat @ h - hbar[:, None] * lmat) < 1e-12 * maxabs(lmat @ h)
        # with the commutation, P = I - L^T (L L^T)^+ L satisfies the
        # projection invariants under H
        lls = lmat @ lmat.T
        p = np.eye(lmat.shape[1]) - lmat.T @ np.linalg.pinv(lls) @ lmat
        assert maxabs(p @ p - p) < 1e-10
        assert maxabs(h @ p - p.T @ h) < 1e-10 * maxabs(h @ p)
