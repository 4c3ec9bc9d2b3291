"""Weighted pseudoinverses, projection boundary conditions, and multi-block
summation-by-parts operators built from embeddings, with a 2D Maxwell solver
on a curvilinear four-block domain."""

from .spaces import (
    LinearMap,
    Norm,
    NotSPDError,
    Space,
    SpaceError,
    adjoint,
    block_inverse_spd,
    inner,
)
from .pinv import (
    PenroseReport,
    TikhonovResult,
    canonical_projections,
    check_penrose,
    pinv_greville,
    pinv_svd,
    pinv_tikhonov,
)
from .sbp1d import SbpPair1D, accuracy_report, anti_reflect, build_sbp1d, sbp_defect
from .bc import (
    BoundaryOperator,
    BoundaryProjection,
    bc_char_scalar,
    bc_char_system,
    bc_neumann_heat,
    boundary_projection,
    lift_boundary_data,
)
from .multiblock1d import (
    Embedding1D,
    MultiBlockAssembly1D,
    assemble_multiblock1d,
    build_embedding1d,
    multiblock_interface_row,
)
from .tensor2d import (
    Block2D,
    BoundaryTrace2D,
    Grid2D,
    Ops2D,
    assemble_four_block,
    assemble_two_block_x,
    assemble_two_block_y,
    boundary_norm_gamma,
    boundary_trace,
    build_ops2d,
)
from .curvilinear import (
    BoundaryGeometry,
    CurvilinearGrid,
    Mapping,
    build_boundary_geometry,
    build_curvilinear_diffops,
    build_metrics,
    curvilinear_sbp_defect,
    sinusoidal_mapping,
)
from .solvers import (
    MaxwellProblem,
    SemidiscreteSystem,
    advection_demo_1d,
    assemble_maxwell,
    convergence_study,
    energy_run,
    maxwell_exact_solution,
    rk4_step,
    spectrum,
)

__version__ = "0.1.0"
