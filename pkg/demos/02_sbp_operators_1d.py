"""Diagonal-norm SBP first-derivative operators of orders 2, 4, 6.

The pair (H, D) mimics integration by parts exactly:

    (u, Dv)_H + (Du, v)_H = u_N v_N - u_0 v_0,

which as a matrix identity reads HD + (HD)^T = diag(-1, 0, ..., 0, 1).
"""

import numpy as np

from sbpproj import accuracy_report, build_sbp1d, sbp_defect

for order in (2, 4, 6):
    op = build_sbp1d(order, 24)
    print(f"--- order {order} (closure width {op.closure_width}) ---")
    print("first row of h*D:", np.round(op.D.matrix[0, : op.closure_width + 2] * op.h, 4))

    ones = np.ones(op.N + 1)
    print(f"(1,1)_H = {ones @ op.H.matrix @ ones:.15f}")
    print(
        "closure weight sum =",
        f"{op.H.diag[: op.closure_width].sum() / op.h:.15f}",
        f"(= r - 1/2 = {op.closure_width - 0.5})",
    )

    rng = np.random.default_rng(1)
    u = rng.standard_normal(op.N + 1)
    v = rng.standard_normal(op.N + 1)
    print(f"SBP rule defect on random (u, v): {sbp_defect(op, u, v):.2e}")

    for row in accuracy_report(op, op.boundary_order):
        print(
            f"  k={row.k}: interior defect {row.interior_defect:.2e}, "
            f"closure defect {row.closure_defect:.2e}"
        )
