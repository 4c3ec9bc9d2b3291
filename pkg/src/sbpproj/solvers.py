"""Time integration and the model experiments.

The simplified projection semidiscretization drives everything here:

    w_t = Q w + G(t),   Q = P C^{-1}(A Dx + B Dy) P,
    G(t) = P C^{-1}(A Dx + B Dy) L^+ g(t),   v = w + L^+ g(t),

with the boundary condition absorbed into the projection P = I - L^+ L and
the data entering only through the lift L^+ g.  Included experiments: 1D
advection demos (single-block and two-block skew form), and the 2D Maxwell
system on a curvilinear four-block square with spectrum, energy and
manufactured-solution convergence studies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bc import bc_char_scalar, boundary_projection
from .curvilinear import (
    CurvilinearDiffOps,
    CurvilinearGrid,
    Mapping,
    build_metrics,
    sinusoidal_mapping,
)
from .multiblock1d import assemble_multiblock1d
from .sbp1d import build_sbp1d, closure_tables
from .spaces import maxabs
from .tensor2d import Block2D, Ops2D, assemble_four_block

__all__ = [
    "rk4_step",
    "SemidiscreteSystem",
    "MaxwellProblem",
    "assemble_maxwell",
    "maxwell_exact_solution",
    "spectrum",
    "energy_run",
    "random_compatible_state",
    "convergence_study",
    "ConvergenceRow",
    "feasible_order_n",
    "advection_demo_1d",
    "EnergyTrace",
    "DT_SPECTRAL_CAP",
]

# dt is min(h_min / 10, DT_SPECTRAL_CAP / rho(Q)); RK4's imaginary-axis
# stability limit is 2*sqrt(2) ~ 2.83
DT_SPECTRAL_CAP = 2.5


def rk4_step(f: Callable, t: float, w: np.ndarray, dt: float):
    """One classical fourth-order Runge-Kutta step for w' = f(t, w)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    k1 = f(t, w)
    k2 = f(t + 0.5 * dt, w + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, w + 0.5 * dt * k2)
    k4 = f(t + dt, w + dt * k3)
    return w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class SemidiscreteSystem:
    """Evolution pieces of w_t = Q w + G(t)."""

    apply_q: Callable[[np.ndarray], np.ndarray]
    project: Callable[[np.ndarray], np.ndarray]
    lift: Callable[[float], np.ndarray]
    forcing: Callable[[float], np.ndarray]
    energy_weights: np.ndarray

    def energy(self, w: np.ndarray) -> float:
        return float(np.sum(self.energy_weights * np.asarray(w) ** 2))

    def rhs(self, t: float, w: np.ndarray) -> np.ndarray:
        return self.apply_q(w) + self.forcing(t)


# ---------------------------------------------------------------------------
# Maxwell on the curvilinear four-block square
# ---------------------------------------------------------------------------

# fields ordered (E_x, H, E_y); the system is C u_t = A u_x + B u_y
A3 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, -1.0, 0.0]])
B3 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def maxwell_exact_solution(eps: float = 0.2, mu: float = 5.0):
    """Plane-wave solution cos(3x + 4y - omega t) of the Maxwell system.

    The frequency follows from the dispersion relation,
    omega = |(3, 4)| / sqrt(eps mu), and the amplitudes from the field
    equations with the magnetic amplitude fixed at 1/5.
    """
    k1, k2 = 3.0, 4.0
    omega = 5.0 / np.sqrt(eps * mu)
    b = 0.2
    a_ex = -k2 * b / (eps * omega)
    a_ey = k1 * b / (eps * omega)

    def fields(x, y, t):
        phase = np.cos(k1 * x + k2 * y - omega * t)
        return np.stack([a_ex * phase, b * phase, a_ey * phase], axis=-1)

    return fields


class MaxwellProblem:
    """Four-block curvilinear Maxwell semidiscretization.

    States are (ny+1, nx+1, 3) arrays (fields E_x, H, E_y per point); flat
    vectors of length 3*(nx+1)*(ny+1) are accepted at the API edges.  The
    magnetic field is prescribed on the whole boundary; after removing the
    duplicated corner rows the boundary operator has orthonormal rows, so
    P = I - L^T L simply zeroes the boundary H values.
    """

    def __init__(
        self,
        grid: CurvilinearGrid,
        eps: float,
        mu: float,
        order: int,
        n_per_block: int,
        bc_data: Callable | None = None,
    ):
        self.grid = grid
        self.diff = CurvilinearDiffOps(grid)
        self.eps = float(eps)
        self.mu = float(mu)
        self.order = order
        self.n_per_block = n_per_block
        ny1, nx1 = grid.shape
        self.shape = (ny1, nx1, 3)
        self.ndof = ny1 * nx1 * 3
        mask = np.zeros((ny1, nx1), dtype=bool)
        mask[0, :] = mask[-1, :] = True
        mask[:, 0] = mask[:, -1] = True
        self.boundary_mask = mask
        self.c_diag = np.array([self.eps, self.mu, self.eps])
        jh = grid.jac * grid.ops.grid.as_array(grid.ops.h_diag)
        self.jh = jh
        self.energy_weights = jh[:, :, None] * self.c_diag
        self.bc_data = bc_data if bc_data is not None else (lambda t: 0.0)
        self._rho_cache = None

    # -- state plumbing ----------------------------------------------------
    def as_state(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return w.reshape(self.shape) if w.ndim == 1 else w

    def boundary_values(self, t: float) -> np.ndarray:
        """Boundary data g(t) on the masked points (scalar or array)."""
        g = self.bc_data(t)
        if np.isscalar(g):
            return np.full(int(self.boundary_mask.sum()), float(g))
        return np.asarray(g, dtype=float)

    # -- operators -----------------------------------------------------------
    def project(self, u: np.ndarray) -> np.ndarray:
        out = u.copy()
        out[self.boundary_mask, 1] = 0.0
        return out

    def lift(self, t: float) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.boundary_mask, 1] = self.boundary_values(t)
        return out

    def apply_spatial(self, u: np.ndarray) -> np.ndarray:
        """C^{-1} (A Dx + B Dy) u."""
        ux = self.diff.apply_dx(u)
        uy = self.diff.apply_dy(u)
        out = np.empty_like(u)
        out[..., 0] = uy[..., 1] / self.eps
        out[..., 1] = (-ux[..., 2] + uy[..., 0]) / self.mu
        out[..., 2] = -ux[..., 1] / self.eps
        return out

    def apply_q(self, w: np.ndarray) -> np.ndarray:
        return self.project(self.apply_spatial(self.project(w)))

    def rhs(self, t: float, w: np.ndarray) -> np.ndarray:
        """P C^{-1}(A Dx + B Dy)(P w + L^+ g): equals Q w + G(t)."""
        v = self.project(w) + self.lift(t)
        return self.project(self.apply_spatial(v))

    def recover(self, w: np.ndarray, t: float) -> np.ndarray:
        """v = w + L^+ g(t)."""
        return self.as_state(w) + self.lift(t)

    def residual_bc(self, v: np.ndarray, t: float) -> float:
        """max |Lv - g(t)|."""
        return maxabs(v[self.boundary_mask, 1] - self.boundary_values(t))

    def energy(self, w) -> float:
        return float(np.sum(self.energy_weights * self.as_state(w) ** 2))

    @property
    def system(self) -> SemidiscreteSystem:
        return SemidiscreteSystem(
            apply_q=lambda w: self.apply_q(self.as_state(w)),
            project=lambda w: self.project(self.as_state(w)),
            lift=self.lift,
            forcing=lambda t: self.project(self.apply_spatial(self.lift(t))),
            energy_weights=self.energy_weights,
        )

    # -- dense assembly (spectrum-sized problems only) -----------------------
    def dense_q(self) -> np.ndarray:
        dx = self.diff.dense_dx()
        dy = self.diff.dense_dy()
        c_inv_a = np.diag(1.0 / self.c_diag) @ A3
        c_inv_b = np.diag(1.0 / self.c_diag) @ B3
        q = np.kron(dx, c_inv_a)
        q += np.kron(dy, c_inv_b)
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.boundary_mask, 1] = True
        flat = mask.ravel()
        q[flat, :] = 0.0
        q[:, flat] = 0.0
        return q

    # -- time stepping --------------------------------------------------------
    def spectral_radius_estimate(self, iterations: int = 30, seed: int = 0) -> float:
        if self._rho_cache is None:
            rng = np.random.default_rng(seed)
            w = rng.standard_normal(self.shape)
            rho = 0.0
            for _ in range(iterations):
                w = self.apply_q(w)
                nrm = float(np.sqrt(np.sum(w**2)))
                if nrm == 0.0:
                    break
                rho = nrm
                w /= nrm
            self._rho_cache = max(rho, 1e-300)
        return self._rho_cache

    def time_step(self) -> float:
        dt = self.grid.min_edge_length() / 10.0
        return min(dt, DT_SPECTRAL_CAP / self.spectral_radius_estimate())

    def integrate(
        self,
        w0: np.ndarray,
        t_final: float,
        dt: float | None = None,
        callback: Callable | None = None,
    ):
        """March w' = Qw + G(t) from 0 to t_final; returns (t, w)."""
        if dt is None:
            dt = self.time_step()
        nsteps = max(int(np.ceil(t_final / dt - 1e-12)), 1)
        dt = t_final / nsteps
        w = self.as_state(w0).copy()
        t = 0.0
        if callback is not None:
            callback(t, w)
        for _ in range(nsteps):
            w = rk4_step(self.rhs, t, w, dt)
            t += dt
            if callback is not None:
                callback(t, w)
        return t, w


def build_four_block_reference(order: int, n_per_block: int) -> Ops2D:
    """Union reference operators: 2x2 identical blocks per direction."""
    op = build_sbp1d(order, n_per_block)
    block = Block2D(op, op)
    return assemble_four_block([[block, block], [block, block]])


def assemble_maxwell(
    order: int,
    n_per_block: int,
    mapping: Mapping | None = None,
    eps: float = 0.2,
    mu: float = 5.0,
    metric_mode: str = "discrete",
    bc_data: Callable | None = None,
    initial: np.ndarray | None = None,
) -> MaxwellProblem:
    """Build the four-block curvilinear Maxwell problem.

    When initial data are supplied they are checked against the boundary
    data at t = 0; an incompatibility is reported as a warning (with the
    measured defect) before projecting.
    """
    if mapping is None:
        mapping = sinusoidal_mapping()
    ops = build_four_block_reference(order, n_per_block)
    grid = build_metrics(ops, mapping=mapping, mode=metric_mode)
    problem = MaxwellProblem(grid, eps, mu, order, n_per_block, bc_data=bc_data)
    if initial is not None:
        defect = problem.residual_bc(problem.as_state(initial), 0.0)
        if defect > 1e-10:
            warnings.warn(
                f"initial data violate the boundary condition by {defect:.3e}; "
                "projecting",
                stacklevel=2,
            )
    return problem


def spectrum(problem: MaxwellProblem):
    """Eigenvalues of Q, computed on the H_C-rescaled similar matrix.

    The scaling D^{1/2} Q D^{-1/2} with D = diag(C J H) leaves the spectrum
    unchanged and makes the matrix antisymmetric up to roundoff, which keeps
    the spurious real parts at rounding level.
    """
    q = problem.dense_q()
    w = np.sqrt(problem.energy_weights.ravel())
    k = q * w[:, None] / w[None, :]
    eigs = np.linalg.eigvals(k)
    max_abs = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    max_re = float(np.max(np.abs(eigs.real))) if eigs.size else 0.0
    return eigs, max_re, max_abs


def random_compatible_state(problem: MaxwellProblem, seed: int = 0) -> np.ndarray:
    """Seeded random smooth field whose H component vanishes on the boundary.

    Built from a handful of low-frequency harmonics so the energy content
    sits well inside the resolved part of the spectrum; high-frequency noise
    would measure RK4's dissipation instead of the scheme's conservation.
    """
    rng = np.random.default_rng(seed)
    ops = problem.grid.ops
    xi, eta = np.meshgrid(ops.xgrid, ops.ygrid)
    modes = [
        np.ones_like(xi),
        np.sin(2 * np.pi * xi),
        np.sin(2 * np.pi * eta),
        np.cos(2 * np.pi * xi) * np.sin(2 * np.pi * eta),
        np.sin(2 * np.pi * xi) * np.cos(2 * np.pi * eta),
    ]
    bump = np.sin(np.pi * xi) * np.sin(np.pi * eta)
    state = np.zeros(problem.shape)
    for comp in range(3):
        coeffs = rng.standard_normal(len(modes))
        fld = sum(c * m for c, m in zip(coeffs, modes))
        if comp == 1:
            fld = fld * bump
        state[:, :, comp] = fld
    return problem.project(state)


def energy_run(
    problem: MaxwellProblem,
    w0: np.ndarray,
    t_final: float = 1.0,
    dt: float | None = None,
):
    """Integrate with g = 0 and return (initial energy, final energy)."""
    e0 = problem.energy(w0)
    _, w = problem.integrate(w0, t_final, dt=dt)
    return e0, problem.energy(w)


@dataclass(frozen=True)
class ConvergenceRow:
    order: int
    n_per_block: int
    npoints: int
    error: float
    log10_error: float
    rate: float | None


def feasible_order_n(order: int, n_per_block: int) -> bool:
    """Per-block operators need N+1 >= 2r+1 grid points."""
    _, r, _, _ = closure_tables(order)
    return n_per_block + 1 >= 2 * r + 1


def attach_manufactured_data(problem: MaxwellProblem, exact=None):
    """Point the problem's boundary data at the exact solution's H trace."""
    if exact is None:
        exact = maxwell_exact_solution(problem.eps, problem.mu)
    xb = problem.grid.x[problem.boundary_mask]
    yb = problem.grid.y[problem.boundary_mask]
    problem.bc_data = lambda t: exact(xb, yb, t)[..., 1]
    return exact


def run_manufactured(problem: MaxwellProblem, t_final: float = 1.0) -> float:
    """March the manufactured solution; JH-weighted error at t_final."""
    exact = attach_manufactured_data(problem)
    g = problem.grid
    f0 = exact(g.x, g.y, 0.0)
    w = problem.project(f0)
    t, w = problem.integrate(w, t_final)
    v = problem.recover(w, t)
    diff = v - exact(g.x, g.y, t)
    return float(np.sqrt(np.sum(problem.jh[:, :, None] * diff**2)))


def convergence_study(
    orders=(2, 4, 6),
    n_list=(10, 20, 30, 40, 50),
    mapping: Mapping | None = None,
    t_final: float = 1.0,
    eps: float = 0.2,
    mu: float = 5.0,
    progress: Callable | None = None,
    workers: int = 1,
) -> list[ConvergenceRow]:
    """Manufactured-solution error table with per-refinement rates.

    Rates between consecutive resolutions use q = log(e1/e2) / log(sqrt(M2/M1))
    with M the total grid point count.  Cells whose per-block operator does
    not fit (order 6 below N = 12) are skipped.  Cells are independent (no
    shared mutable state) and run concurrently when ``workers > 1``; the
    results are identical either way.
    """
    if mapping is None:
        mapping = sinusoidal_mapping()
    cells = [
        (order, n) for order in orders for n in n_list if feasible_order_n(order, n)
    ]

    def run_cell(cell):
        order, n = cell
        problem = assemble_maxwell(order, n, mapping=mapping, eps=eps, mu=mu)
        return run_manufactured(problem, t_final)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = dict(zip(cells, pool.map(run_cell, cells)))
    else:
        errors = {cell: run_cell(cell) for cell in cells}

    rows: list[ConvergenceRow] = []
    for order in orders:
        prev: tuple[int, float] | None = None
        for n in n_list:
            if (order, n) not in errors:
                continue
            err = errors[(order, n)]
            npoints = (2 * n + 1) ** 2
            rate = None
            if prev is not None:
                n_prev, e_prev = prev
                m_prev = (2 * n_prev + 1) ** 2
                rate = float(
                    np.log(e_prev / err) / np.log(np.sqrt(npoints / m_prev))
                )
            rows.append(
                ConvergenceRow(order, n, npoints, err, float(np.log10(err)), rate)
            )
            prev = (n, err)
            if progress is not None:
                progress(rows[-1])
    return rows


# ---------------------------------------------------------------------------
# 1D advection demos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyTrace:
    times: np.ndarray
    energies: np.ndarray
    swap_times: tuple[float, ...] = field(default_factory=tuple)

    def max_step_increase(self) -> float:
        return float(np.max(np.diff(self.energies), initial=0.0))


def _char_flags(c_value: float) -> tuple[int, int]:
    return (1 if c_value > 0.0 else 0), (1 if c_value < 0.0 else 0)


def advection_demo_1d(
    flavor: str = "single",
    c: Callable[[float], float] = lambda t: 1.0,
    order: int = 4,
    n: int = 40,
    t_final: float = 1.0,
    dt: float | None = None,
    f: np.ndarray | None = None,
) -> EnergyTrace:
    """Integrate the advection model and return its energy trace.

    ``flavor="single"`` solves v_t + c(t) P D P v = 0 on one block;
    ``flavor="multiblock-skew"`` uses the two-block operator in split form
    v_t + P (D C + C D)/2 P v = 0.  The projection is rebuilt whenever the
    sign pattern of c changes (piecewise constant in time); with zero
    boundary data the energy trace is non-increasing.
    """
    if flavor == "single":
        op = build_sbp1d(order, n)
        dmat = op.D.matrix
        hdiag = op.H.diag
        npts = n + 1
        space = op.space
        grid = op.grid
    elif flavor == "multiblock-skew":
        half = build_sbp1d(order, n)
        asm = assemble_multiblock1d(half, half)
        dmat = asm.D.matrix
        hdiag = asm.H.diag
        npts = asm.n + 1
        space = asm.space
        grid = asm.grid
    else:
        raise ValueError("flavor must be 'single' or 'multiblock-skew'")

    if f is None:
        f = np.exp(-100.0 * (grid - 0.5) ** 2)
    w = np.asarray(f, dtype=float).copy()

    if dt is None:
        dt = (grid[1] - grid[0]) / 10.0
    nsteps = max(int(np.ceil(t_final / dt - 1e-12)), 1)
    dt = t_final / nsteps

    def projector(flags):
        bop = bc_char_scalar(flags[0], flags[1], npts - 1, space=space)
        return boundary_projection(bop).P.matrix

    flags = _char_flags(c(0.0))
    p = projector(flags)
    w = p @ w

    def rhs_at(cval, pmat):
        if flavor == "single":
            def rhs(t, v):
                return -cval * (pmat @ (dmat @ (pmat @ v)))
        else:
            def rhs(t, v):
                pv = pmat @ v
                return -pmat @ (0.5 * (dmat @ (cval * pv)) + 0.5 * cval * (dmat @ pv))
        return rhs

    times = [0.0]
    energies = [float(np.sum(hdiag * w * w))]
    swaps = []
    t = 0.0
    for _ in range(nsteps):
        cval = c(t)
        new_flags = _char_flags(cval)
        if new_flags != flags:
            flags = new_flags
            p = projector(flags)
            w = p @ w
            swaps.append(t)
        w = rk4_step(rhs_at(cval, p), t, w, dt)
        t += dt
        times.append(t)
        energies.append(float(np.sum(hdiag * w * w)))
    return EnergyTrace(np.array(times), np.array(energies), tuple(swaps))
