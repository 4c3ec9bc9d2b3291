"""Named verification checks over all module invariants.

Each check measures a defect against a fixed tolerance and reports one line;
the CLI ``verify`` command runs them and turns any failure into a nonzero
exit code.  Checks are deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bc as bc_mod
from . import pinv as pinv_mod
from .curvilinear import (
    build_boundary_geometry,
    build_metrics,
    curvilinear_sbp_defect,
    sinusoidal_mapping,
)
from .multiblock1d import assemble_multiblock1d
from .sbp1d import build_sbp1d, sbp_matrix_defect
from .spaces import LinearMap, Norm, Space, adjoint, maxabs
from .tensor2d import Block2D, assemble_four_block, build_ops2d, four_block_explicit
from .solvers import build_four_block_reference

__all__ = ["CheckResult", "run_checks", "CHECK_GROUPS"]


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.tolerance


def _random_weighted_map(rng, m, n):
    h1 = _random_spd(rng, n)
    h2 = _random_spd(rng, m)
    dom = Space(n, Norm(h1))
    cod = Space(m, Norm(h2))
    return LinearMap(rng.standard_normal((m, n)), dom, cod)


def _random_spd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def _check_adjoint(rng) -> list[CheckResult]:
    out = []
    worst = 0.0
    for _ in range(25):
        t = _random_weighted_map(rng, 5, 3)
        ts = adjoint(t)
        x = rng.standard_normal(3)
        z = rng.standard_normal(5)
        lhs = t(x) @ t.codomain.norm.matrix @ z
        rhs = x @ t.domain.norm.matrix @ ts(z)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
        worst = max(worst, maxabs(adjoint(ts).matrix - t.matrix) / maxabs(t.matrix))
    out.append(CheckResult("spaces", "adjoint defining identity + reflexivity", worst, 1e-12))
    return out


def _check_penrose(rng) -> list[CheckResult]:
    worst = 0.0
    for _ in range(50):
        m, n = int(rng.integers(2, 9)), int(rng.integers(2, 7))
        t = _random_weighted_map(rng, m, n)
        s = pinv_mod.pinv_svd(t)
        report = pinv_mod.check_penrose(t, s, tol=1e-10)
        worst = max(worst, max(report.residuals))
    return [CheckResult("pinv", "four weighted Penrose conditions (random maps)", worst, 1e-10)]


def _check_sbp1d(rng) -> list[CheckResult]:
    out = []
    for order in (2, 4, 6):
        op = build_sbp1d(order, 24)
        defect = sbp_matrix_defect(op.H.matrix, op.D.matrix)
        out.append(CheckResult("sbp1d", f"order {order}: HD + (HD)^T boundary identity", defect, 1e-12))
        ones = np.ones(op.N + 1)
        one_norm = abs(float(ones @ op.H.matrix @ ones) - 1.0)
        out.append(CheckResult("sbp1d", f"order {order}: (1,1)_H = 1", one_norm, 1e-13))
    return out


def _check_multiblock(rng) -> list[CheckResult]:
    out = []
    for order, (na, nb) in ((2, (8, 12)), (4, (8, 12)), (6, (16, 12))):
        asm = assemble_multiblock1d(build_sbp1d(order, na), build_sbp1d(order, nb))
        defect = sbp_matrix_defect(asm.H.matrix, asm.D.matrix)
        out.append(
            CheckResult("multiblock1d", f"order {order}: two-block SBP identity", defect, 1e-12)
        )
        e = asm.embedding
        iso = maxabs(e.adjoint_matrix() @ e.matrix - np.eye(asm.n + 1))
        out.append(CheckResult("multiblock1d", f"order {order}: E*E = I", iso, 1e-12))
    return out


def _check_tensor2d(rng) -> list[CheckResult]:
    out = []
    op1 = build_sbp1d(4, 12)
    op2 = build_sbp1d(4, 10)
    ops = build_ops2d(op1, op2)
    hd = ops.H.matrix @ ops.Dx.matrix
    bx = np.kron(np.diag(ops.h2), _boundary_matrix(ops.n1 + 1))
    out.append(
        CheckResult(
            "tensor2d",
            "single-block 2D SBP identity (x)",
            maxabs(hd + hd.T - bx) / maxabs(hd),
            1e-12,
        )
    )
    block = Block2D(build_sbp1d(4, 8), build_sbp1d(4, 8))
    blocks = [[block, block], [block, block]]
    h_xy, dx_xy, dy_xy = four_block_explicit(blocks, "xy")
    h_yx, dx_yx, dy_yx = four_block_explicit(blocks, "yx")
    out.append(
        CheckResult(
            "tensor2d",
            "four-block assembly order independence",
            max(
                maxabs(h_xy - h_yx) / maxabs(h_xy),
                maxabs(dx_xy - dx_yx) / maxabs(dx_xy),
                maxabs(dy_xy - dy_yx) / maxabs(dy_xy),
            ),
            1e-13,
        )
    )
    union = assemble_four_block(blocks)
    out.append(
        CheckResult(
            "tensor2d",
            "four-block kron shortcut matches explicit embedding",
            max(
                maxabs(np.kron(union.h2, union.h1) - np.diag(h_xy)) / maxabs(h_xy),
                maxabs(union.Dx.matrix - dx_xy) / maxabs(dx_xy),
            ),
            1e-13,
        )
    )
    return out


def _boundary_matrix(n: int) -> np.ndarray:
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return b


def _check_projection(rng) -> list[CheckResult]:
    out = []
    op = build_sbp1d(4, 16)
    bop = bc_mod.bc_neumann_heat(op)
    proj = bc_mod.boundary_projection(bop)
    p = proj.P.matrix
    h = op.H.matrix
    defect = max(
        maxabs(p @ p - p) / maxabs(p),
        maxabs(h @ p - p.T @ h) / maxabs(h @ p),
        maxabs(p @ proj.Lplus.matrix),
    )
    out.append(CheckResult("bc", "heat projection: P^2 = P, HP = P^T H, P L+ = 0", defect, 1e-11))
    return out


def _check_curvilinear(rng, inject_fault: bool = False) -> list[CheckResult]:
    out = []
    for order in (2, 4, 6):
        ops = build_four_block_reference(order, 16)
        if inject_fault:
            # negative control: silently corrupt one norm weight
            ops.h1 = ops.h1.copy()
            ops.h1[3] *= 1.0 + 1e-6
            ops._cache.clear()
        grid = build_metrics(ops, mapping=sinusoidal_mapping(), mode="discrete")
        geom = build_boundary_geometry(grid)
        worst = 0.0
        for _ in range(5):
            u = rng.standard_normal(grid.shape)
            v = rng.standard_normal(grid.shape)
            worst = max(worst, curvilinear_sbp_defect(grid, geom, u, v, "x"))
            worst = max(worst, curvilinear_sbp_defect(grid, geom, u, v, "y"))
        out.append(
            CheckResult("curvilinear", f"order {order}: curvilinear SBP identity", worst, 1e-11)
        )
    return out


CHECK_GROUPS: dict[str, Callable] = {
    "spaces": _check_adjoint,
    "pinv": _check_penrose,
    "sbp1d": _check_sbp1d,
    "multiblock1d": _check_multiblock,
    "tensor2d": _check_tensor2d,
    "bc": _check_projection,
    "curvilinear": _check_curvilinear,
}


def run_checks(
    only: str | None = None,
    seed: int = 0,
    inject_fault: bool = False,
    tol_scale: float = 1.0,
) -> list[CheckResult]:
    if tol_scale <= 0.0:
        raise ValueError("tol-scale must be positive")
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []
    for group, fn in CHECK_GROUPS.items():
        if only is not None and group != only:
            continue
        if group == "curvilinear":
            results.extend(fn(rng, inject_fault=inject_fault))
        else:
            results.extend(fn(rng))
    if only is not None and not results:
        raise ValueError(f"unknown check group {only!r}; choose from {sorted(CHECK_GROUPS)}")
    if tol_scale != 1.0:
        results = [
            CheckResult(r.group, r.name, r.defect, r.tolerance * tol_scale)
            for r in results
        ]
    return results
