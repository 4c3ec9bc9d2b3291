"""Multi-block SBP operators through embeddings, with no interface penalties.

Duplicating the interface point gives an augmented space V_+; the 0/1
embedding E: V -> V_+ is an isometry under H = E^T H^(+) E, and

    D = E^+ D^(+) E

is an SBP operator on the union grid.  Nothing else is needed at the
interface: E^+ = E* averages the two one-sided derivatives with weight chi.
"""

import numpy as np

from sbpproj import assemble_multiblock1d, build_sbp1d, multiblock_interface_row
from sbpproj.sbp1d import sbp_matrix_defect
from sbpproj.tensor2d import Block2D, assemble_four_block, four_block_explicit

# unequal resolutions left/right of x = 1/2
asm = assemble_multiblock1d(build_sbp1d(4, 8), build_sbp1d(4, 12))
print(f"chi = {asm.embedding.chi:.4f} (h-weighted interface average)")
print(f"union SBP identity defect: {sbp_matrix_defect(asm.H.matrix, asm.D.matrix):.2e}")
print(f"D x - 1 on the union grid: {np.abs(asm.D(asm.grid) - 1).max():.2e}")

row = multiblock_interface_row(asm)
nz = np.nonzero(np.abs(row) > 1e-12)[0]
print(f"interface row support: columns {nz.min()}..{nz.max()}, diagonal = {row[asm.embedding.n1]:.1e}")

# isometry: ||E u||_{H+} = ||u||_H
rng = np.random.default_rng(0)
u = rng.standard_normal(asm.n + 1)
e = asm.embedding
lhs = u @ asm.H.matrix @ u
rhs = (e.matrix @ u) @ e.E.codomain.norm.matrix @ (e.matrix @ u)
print(f"isometry defect: {abs(lhs - rhs):.2e}")

# 2x2 blocks in 2D: join in x then y, or y then x -- same operators
blk = Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8))
blocks = [[blk, blk], [blk, blk]]
h_xy, dx_xy, dy_xy = four_block_explicit(blocks, "xy")
h_yx, dx_yx, dy_yx = four_block_explicit(blocks, "yx")
print(f"four-block H (xy vs yx): {np.abs(h_xy - h_yx).max():.2e}")
print(f"four-block Dx (xy vs yx): {np.abs(dx_xy - dx_yx).max():.2e}")

union = assemble_four_block(blocks)
xi, eta = np.meshgrid(union.xgrid, union.ygrid)
print(f"union Dx x - 1: {np.abs(union.apply_dx(xi) - 1).max():.2e}")
