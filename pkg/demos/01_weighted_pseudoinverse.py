"""Weighted pseudoinverses: three routes to T^+ and what they guarantee.

A map between weighted spaces (R^n, H1) -> (R^m, H2) has a unique
pseudoinverse characterized by four generalized Penrose conditions; the
orthogonality conditions pick up the weights:

    (ST)^T H1 = H1 (ST),    (TS)^T H2 = H2 (TS).

T^+ z is the minimizer of ||z - Tx||_{H2} of least ||x||_{H1}.
"""

import numpy as np

from sbpproj import (
    LinearMap,
    Norm,
    Space,
    adjoint,
    check_penrose,
    pinv_greville,
    pinv_svd,
    pinv_tikhonov,
)

rng = np.random.default_rng(0)

# a rank-deficient 5x7 map between randomly weighted spaces
a1 = rng.standard_normal((7, 7))
a2 = rng.standard_normal((5, 5))
dom = Space(7, Norm(a1 @ a1.T + 7 * np.eye(7)))
cod = Space(5, Norm(a2 @ a2.T + 5 * np.eye(5)))
t = LinearMap(rng.standard_normal((5, 3)) @ rng.standard_normal((3, 7)), dom, cod)

tplus = pinv_svd(t)
report = check_penrose(t, tplus, tol=1e-10)
print("rank estimate:", report.rank_estimate)
print("Penrose residuals:", ["%.2e" % r for r in report.residuals])

# least-squares optimality: T^+ z beats any competitor in the H2 residual
z = rng.standard_normal(5)
xhat = tplus(z)
h2 = cod.norm.matrix
best = np.sqrt((z - t(xhat)) @ h2 @ (z - t(xhat)))
trial = min(
    np.sqrt((z - t(x)) @ h2 @ (z - t(x)))
    for x in rng.standard_normal((200, 7))
)
print(f"residual via T^+: {best:.6f}; best of 200 random tries: {trial:.6f}")

# the adjoint is what makes this work: (Tx, z)_H2 = (x, T*z)_H1
x = rng.standard_normal(7)
ts = adjoint(t)
lhs = t(x) @ h2 @ z
rhs = x @ dom.norm.matrix @ ts(z)
print(f"adjoint defining identity defect: {abs(lhs - rhs):.2e}")

# regularized route: (T*T + d^2 I)^{-1} T* converges as d -> 0
res = pinv_tikhonov(t, [1e-2, 1e-3, 1e-4, 1e-5])
for d, it in zip(res.deltas, res.iterates):
    print(f"  delta={d:.0e}: |T_delta - T^+|_max = {np.abs(it - tplus.matrix).max():.2e}")

# row-recursive route (Euclidean): exercises the rank-deficient branch
rows = [np.array([1.0, 2.0, 0.0]), np.array([1.0, 2.0, 0.0]), np.array([0.0, 1.0, 1.0])]
grev = pinv_greville(rows)
te = LinearMap(np.vstack(rows), Space.euclidean(3), Space.euclidean(3))
print(
    "Greville vs SVD on duplicated rows:",
    f"{np.abs(grev - pinv_svd(te).matrix).max():.2e}",
)
