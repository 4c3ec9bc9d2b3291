import numpy as np
import pytest

from conftest import random_spd
from sbpproj.bc import (
    bc_char_scalar,
    bc_char_system,
    bc_neumann_heat,
    boundary_projection,
    char_block,
    lift_boundary_data,
    matched_boundary_norm,
)
from sbpproj.pinv import check_penrose, pinv_greville, pinv_svd
from sbpproj.sbp1d import build_sbp1d
from sbpproj.spaces import LinearMap, Norm, Space, maxabs


def projection_invariant_defects(p, h):
    return max(
        maxabs(p @ p - p) / max(maxabs(p), 1.0),
        maxabs(h @ p - p.T @ h) / max(maxabs(h @ p), 1.0),
    )


class TestCharScalar:
    def test_inflow_only(self):
        bop = bc_char_scalar(1, 0, 8)
        proj = boundary_projection(bop)
        expected = np.eye(9)
        expected[0, 0] = 0.0
        assert maxabs(proj.P.matrix - expected) < 1e-13

    def test_no_conditions_gives_identity(self):
        bop = bc_char_scalar(0, 0, 8)
        proj = boundary_projection(bop)
        assert maxabs(proj.P.matrix - np.eye(9)) < 1e-14

    def test_both_ends(self):
        bop = bc_char_scalar(1, 1, 8)
        proj = boundary_projection(bop)
        expected = np.eye(9)
        expected[0, 0] = expected[8, 8] = 0.0
        assert maxabs(proj.P.matrix - expected) < 1e-13
        # P = I - L^T L here
        lm = bop.L.matrix
        assert maxabs(proj.P.matrix - (np.eye(9) - lm.T @ lm)) < 1e-13


class TestCharSystem:
    def test_2x2_mixed(self, rng):
        c = rng.standard_normal((2, 2))
        block = char_block([0.7, -0.3], c, side="left")
        t = LinearMap(block, Space.euclidean(2), Space.euclidean(2))
        tp = pinv_svd(t)
        assert maxabs((t @ tp).matrix - np.diag([1.0, 0.0])) < 1e-12

    def test_3x3_supersonic_inflow(self, rng):
        c = rng.standard_normal((3, 3))
        block = char_block([2.0, 1.0, 0.5], c, side="left")
        # all deltas on: rows are plain unit vectors, mutually orthogonal
        assert maxabs(block - np.eye(3)) == 0.0
        bop = bc_char_system([2.0, 1.0, 0.5], c, "left", 10)
        lm = bop.L.matrix
        lp = pinv_svd(bop.L).matrix
        expected = lm.T @ np.linalg.inv(lm @ lm.T)
        assert maxabs(lp - expected) < 1e-12

    def test_3x3_subsonic_inflow_greville_vs_svd(self, rng):
        c = rng.standard_normal((3, 3))
        block = char_block([1.0, 0.5, -2.0], c, side="left")
        assert abs(block[0] @ block[1]) > 1e-12  # rows not orthogonal
        grev = pinv_greville(list(block))
        svd = pinv_svd(
            LinearMap(block, Space.euclidean(3), Space.euclidean(3))
        ).matrix
        assert maxabs(grev - svd) < 1e-9 * max(maxabs(svd), 1.0)

    def test_right_side_embedding(self):
        bop = bc_char_system([-1.0, 2.0], np.zeros((2, 2)), "right", 6)
        lm = bop.L.matrix
        assert maxabs(lm[:, :-2]) == 0.0
        assert lm[0, -2] == 1.0  # lambda_1 < 0 is ingoing at the right

    def test_3x3_case_classification(self, rng):
        # row orthogonality by flow regime: only two ingoing characteristics
        # (subsonic inflow) break it
        c = rng.standard_normal((3, 3))

        def row_products(lam):
            block = char_block(lam, c, side="left")
            return [
                abs(block[i] @ block[j])
                for i in range(3)
                for j in range(i + 1, 3)
            ]

        assert max(row_products([3.0, 2.0, 1.0])) == 0.0  # supersonic inflow
        assert max(row_products([1.0, 0.5, -1.0])) > 1e-12  # subsonic inflow
        assert max(row_products([1.0, -0.5, -1.0])) == 0.0  # subsonic outflow
        assert max(row_products([-1.0, -2.0, -3.0])) == 0.0  # supersonic outflow


class TestNeumannHeat:
    def test_rows_are_derivative_rows(self):
        op = build_sbp1d(2, 12)
        bop = bc_neumann_heat(op)
        assert np.allclose(bop.L.matrix[0, :3] * op.h, [-1.5, 2.0, -0.5])
        assert maxabs(bop.L.matrix[0] - op.D.matrix[0]) == 0.0
        assert maxabs(bop.L.matrix[1] - op.D.matrix[-1]) == 0.0

    def test_constant_in_kernel(self):
        op = build_sbp1d(4, 12)
        bop = bc_neumann_heat(op)
        assert maxabs(bop.L(np.ones(13))) < 1e-12 / op.h

    def test_lift_matches_hat_d_columns(self):
        op = build_sbp1d(4, 16)
        bop = bc_neumann_heat(op)
        proj = boundary_projection(bop)
        d_row = op.D.matrix[0]
        h_diag = op.H.diag
        hat_d = d_row / h_diag / np.sum(d_row**2 / h_diag)
        lifted = lift_boundary_data(proj, [1.0, -1.0])
        expected = hat_d + hat_d[::-1]  # second column is -reflected first
        assert maxabs(lifted - expected) < 1e-11 * maxabs(expected)


class TestBoundaryProjection:
    def test_zero_operator(self):
        op = build_sbp1d(2, 8)
        bop = bc_char_scalar(0, 0, 8, space=op.space)
        proj = boundary_projection(bop)
        assert maxabs(proj.P.matrix - np.eye(9)) < 1e-14

    def test_invariants_all_constructions(self, rng):
        op = build_sbp1d(4, 14)
        cases = [
            bc_char_scalar(1, 1, 14, space=op.space),
            bc_char_scalar(1, 0, 14, space=op.space),
            bc_neumann_heat(op),
        ]
        for bop in cases:
            proj = boundary_projection(bop)
            p = proj.P.matrix
            assert projection_invariant_defects(p, op.H.matrix) < 1e-11
            assert maxabs(p @ proj.Lplus.matrix) < 1e-11

    def test_gamma_norm_independence(self, rng):
        # duplicated row makes L rank deficient; P must not care, nor about
        # rescaling H_Gamma
        op = build_sbp1d(4, 12)
        row = np.zeros(13)
        row[0] = 1.0
        lmat = np.vstack([row, row, np.eye(13)[12]])
        p_list = []
        for gamma_scale in (1.0, 2.0):
            gamma = Space(3, Norm(gamma_scale * np.eye(3)))
            lmap = LinearMap(lmat, op.space, gamma)
            lp = pinv_svd(lmap)
            p_list.append(np.eye(13) - lp.matrix @ lmat)
        assert maxabs(p_list[0] - p_list[1]) < 1e-10

    def test_matched_norm_choice(self):
        op = build_sbp1d(4, 12)
        bop = bc_char_scalar(1, 1, 12, space=op.space)
        pm = boundary_projection(bop, "matched").P.matrix
        pi = boundary_projection(bop, "identity").P.matrix
        assert maxabs(pm - pi) < 1e-10
        hbar = matched_boundary_norm(bop.L)
        # weights are the boundary entries of H
        assert np.allclose(hbar.diag, [op.H.diag[0], op.H.diag[-1]])

    def test_matched_norm_detects_mismatch(self):
        # derivative rows span several norm weights: L H = H_bar L fails
        from sbpproj.spaces import SpaceError

        op = build_sbp1d(4, 12)
        bop = bc_neumann_heat(op)
        with pytest.raises(SpaceError):
            matched_boundary_norm(bop.L)

    def test_projection_data_equivalence(self, rng):
        # (I - P)(v - lift) = 0  <=>  Lv = g
        op = build_sbp1d(4, 12)
        bop = bc_neumann_heat(op)
        proj = boundary_projection(bop)
        g = rng.standard_normal(2)
        lifted = lift_boundary_data(proj, g)
        for _ in range(20):
            w = proj.P(rng.standard_normal(13))
            v = w + lifted
            assert maxabs(bop.L(v) - g) < 1e-10 * max(maxabs(g), 1.0)
            # converse: a state satisfying Lv = g has (I-P)(v - lift) = 0
            resid = (v - lifted) - proj.P(v - lifted)
            assert maxabs(resid) < 1e-10

    def test_block_corner_structure(self, rng):
        # for block-boundary L the lift only touches the end blocks
        c = rng.standard_normal((2, 2))
        bop = bc_char_system([1.0, -1.0], c, "left", 10)
        proj = boundary_projection(bop)
        lp = proj.Lplus.matrix
        assert maxabs(lp[2:, :]) < 1e-13

    def test_two_sided_block_pinv_structure(self, rng):
        # L with analytic blocks L0, L1 at the two ends of a state with d
        # components per point on a restricted-full (diagonal) norm: L^+ has
        # L0^+, L1^+ in the corner blocks and zeros elsewhere, for any
        # boundary norm diag(hL I, hR I)
        d, npts = 2, 9
        op = build_sbp1d(4, npts - 1)
        l0 = char_block([1.0, -0.5], rng.standard_normal((d, d)), "left")
        l1 = char_block([1.0, -0.5], rng.standard_normal((d, d)), "right")
        lmat = np.zeros((2 * d, npts * d))
        lmat[:d, :d] = l0
        lmat[d:, -d:] = l1
        state_norm = Norm.diagonal(np.kron(op.H.diag, np.ones(d)))
        dom = Space(npts * d, state_norm)
        for h_l, h_r in ((1.0, 1.0), (2.0, 5.0)):
            gamma = Space(2 * d, Norm.diagonal([h_l] * d + [h_r] * d))
            lp = pinv_svd(LinearMap(lmat, dom, gamma)).matrix
            assert maxabs(lp[d:-d, :]) < 1e-12
            assert maxabs(lp[:d, d:]) < 1e-12
            assert maxabs(lp[-d:, :d]) < 1e-12
            for block, corner in ((l0, lp[:d, :d]), (l1, lp[-d:, d:])):
                small = pinv_svd(
                    LinearMap(block, Space.euclidean(d), Space.euclidean(d))
                ).matrix
                assert maxabs(corner - small) < 1e-11


class TestLift:
    def test_zero_data(self):
        op = build_sbp1d(2, 8)
        proj = boundary_projection(bc_char_scalar(1, 1, 8, space=op.space))
        assert maxabs(lift_boundary_data(proj, [0.0, 0.0])) == 0.0

    def test_dirichlet_point_values(self):
        op = build_sbp1d(2, 8)
        proj = boundary_projection(bc_char_scalar(1, 1, 8, space=op.space))
        lifted = lift_boundary_data(proj, [2.5, -1.0])
        expected = np.zeros(9)
        expected[0] = 2.5
        expected[8] = -1.0
        assert maxabs(lifted - expected) < 1e-13

    def test_full_rank_reproduces_data(self, rng):
        op = build_sbp1d(4, 12)
        bop = bc_neumann_heat(op)
        proj = boundary_projection(bop)
        g = rng.standard_normal(2)
        assert maxabs(bop.L(lift_boundary_data(proj, g)) - g) < 1e-11
