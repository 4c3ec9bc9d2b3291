import numpy as np
import pytest

from conftest import random_spd, random_weighted_map
from sbpproj.sbp1d import build_sbp1d
from sbpproj.spaces import (
    LinearMap,
    Norm,
    NotSPDError,
    Space,
    SpaceError,
    adjoint,
    block_inverse_spd,
    inner,
    maxabs,
)


class TestNorm:
    def test_rejects_nonsymmetric(self):
        with pytest.raises(NotSPDError):
            Norm(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(NotSPDError):
            Norm(np.diag([1.0, -1.0]))

    def test_diagonal_tag_enforced(self):
        with pytest.raises(SpaceError):
            Norm(np.array([[2.0, 0.1], [0.1, 2.0]]), "diagonal")

    def test_restricted_full_tag(self):
        m = np.diag([1.0, 2.0, 3.0, 1.0])
        m[1, 2] = m[2, 1] = 0.25
        Norm(m, "restricted-full")
        bad = m.copy()
        bad[0, 1] = bad[1, 0] = 0.25
        with pytest.raises(SpaceError):
            Norm(bad, "restricted-full")


class TestInner:
    def test_orthogonal_unit_vectors(self):
        space = Space.euclidean(2)
        assert inner(space, [1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_sbp_norm_of_ones(self):
        # (1, 1)_H = 1 for any SBP norm on [0, 1]
        op = build_sbp1d(2, 12)
        ones = np.ones(13)
        assert abs(inner(Space(13, op.H), ones, ones) - 1.0) < 1e-13

    def test_matches_triple_product(self, rng):
        h = random_spd(rng, 7)
        space = Space(7, Norm(h))
        x = rng.standard_normal(7)
        brute = sum(x[i] * h[i, j] * x[j] for i in range(7) for j in range(7))
        assert inner(space, x, x) > 0.0
        assert abs(inner(space, x, x) - brute) < 1e-12 * abs(brute)

    def test_dimension_mismatch(self):
        with pytest.raises(SpaceError):
            inner(Space.euclidean(3), [1.0, 2.0], [1.0, 2.0, 3.0])


class TestAdjoint:
    def test_identity_self_adjoint(self, rng):
        h = Norm(random_spd(rng, 4))
        space = Space(4, h)
        ident = LinearMap.identity(space)
        assert maxabs(adjoint(ident).matrix - np.eye(4)) < 1e-12

    def test_h_symmetric_operator_is_self_adjoint(self, rng):
        h = random_spd(rng, 5)
        space = Space(5, Norm(h))
        s = rng.standard_normal((5, 5))
        t = LinearMap(np.linalg.solve(h, 0.5 * (s + s.T)), space, space)
        # HT = T^T H by construction
        assert maxabs(adjoint(t).matrix - t.matrix) < 1e-11

    def test_defining_identity(self, rng):
        t = random_weighted_map(rng, 3, 2)
        ts = adjoint(t)
        h1 = t.domain.norm.matrix
        h2 = t.codomain.norm.matrix
        for _ in range(100):
            x = rng.standard_normal(2)
            z = rng.standard_normal(3)
            lhs = t(x) @ h2 @ z
            rhs = x @ h1 @ ts(z)
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_reflexivity(self, rng):
        t = random_weighted_map(rng, 6, 4)
        assert maxabs(adjoint(adjoint(t)).matrix - t.matrix) < 1e-12 * maxabs(t.matrix)

    def test_product_rule(self, rng):
        spaces = [Space(n, Norm(random_spd(rng, n))) for n in (3, 4, 5)]
        s = LinearMap(rng.standard_normal((4, 3)), spaces[0], spaces[1])
        t = LinearMap(rng.standard_normal((5, 4)), spaces[1], spaces[2])
        lhs = adjoint(t @ s).matrix
        rhs = (adjoint(s) @ adjoint(t)).matrix
        assert maxabs(lhs - rhs) < 1e-12 * maxabs(rhs)

    def test_inverse_rule(self, rng):
        space = Space(5, Norm(random_spd(rng, 5)))
        mat = rng.standard_normal((5, 5)) + 5.0 * np.eye(5)
        t = LinearMap(mat, space, space)
        t_inv = LinearMap(np.linalg.inv(mat), space, space)
        lhs = adjoint(t_inv).matrix
        rhs = np.linalg.inv(adjoint(t).matrix)
        assert maxabs(lhs - rhs) < 1e-10 * maxabs(rhs)

    def test_transpose_iff_commutation(self, rng):
        # T* = T^T iff T H1 = H2 T; test both directions
        h = random_spd(rng, 4)
        space = Space(4, Norm(h))
        # positive: T = H + I commutes with H1 = H2 = H and is symmetric
        t = LinearMap(h + np.eye(4), space, space)
        assert maxabs(t.matrix @ h - h @ t.matrix) < 1e-10
        assert maxabs(adjoint(t).matrix - t.matrix.T) < 1e-11 * maxabs(t.matrix)
        # negative: a generic map does not commute with the norms
        t2 = random_weighted_map(rng, 4, 4)
        comm = t2.matrix @ t2.domain.norm.matrix - t2.codomain.norm.matrix @ t2.matrix
        assert maxabs(comm) > 1e-6
        assert maxabs(adjoint(t2).matrix - t2.matrix.T) > 1e-6


class TestBlockInverse:
    def test_diagonal(self):
        h = Norm.diagonal([1.0, 2.0, 4.0])
        out = block_inverse_spd(h, 1)
        assert maxabs(out - np.diag([1.0, 0.5, 0.25])) < 1e-14

    def test_matches_dense_inverse(self, rng):
        h = Norm(random_spd(rng, 6))
        out = block_inverse_spd(h, 2)
        expected = np.linalg.inv(h.matrix)
        assert maxabs(h.matrix @ out - np.eye(6)) < 1e-11
        assert maxabs(out - expected) < 1e-11 * maxabs(expected)

    def test_two_restricted_full_blocks(self):
        # multi-block H built from two restricted-full norms is block
        # diagonal, and so is its inverse
        h = np.diag([0.5, 1.0, 1.0, 1.5, 1.0, 0.5])
        h[1, 2] = h[2, 1] = 0.2
        h[4, 4] = 1.3
        norm = Norm(h)
        out = block_inverse_spd(norm, 3)
        assert maxabs(out - np.linalg.inv(h)) < 1e-12
        assert maxabs(out[:3, 3:]) < 1e-14

    def test_bad_split(self, rng):
        with pytest.raises(SpaceError):
            block_inverse_spd(Norm(random_spd(rng, 4)), 0)
