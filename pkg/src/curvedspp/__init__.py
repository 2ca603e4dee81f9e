"""Surface plasmon polaritons on weakly curved metal-dielectric interfaces.

The package derives the closed-form scalars of the bound TM surface mode,
assembles the curvature-modified surface wave operator on spheroids, solves
the per-azimuthal-mode Green's function problem with an absorbing layer, and
turns the mode sums into collective decay rates and cooperative frequency
shifts for rings of surface-normal emitters.
"""

__version__ = "0.1.0"

from .analytics import (
    CylinderCase,
    cylinder_ktheta,
    cylinder_kz,
    cylinder_momentum_ellipse,
    cylinder_paraxial_potential,
    make_cylinder_case,
    sphere_keff,
    sphere_keff_unexpanded,
)
from .geometry import (
    AblationOptions,
    OperatorCoefficients,
    SpheroidSurface,
    mean_curvature,
    operator_coefficients,
    rho,
    sigma_components,
)
from .greens import (
    GreensEvaluation,
    SelfSums,
    default_m_max,
    flat_reference,
    greens_series,
    hankel0_first_kind,
    self_sums,
    solve_mode_bank,
)
from .materials import (
    GOLDEN_RATIO_SQUARED,
    MaterialError,
    MaterialPair,
    SppScalars,
    coupling_constant_C0,
    golden_ratio_deviation,
    load_material_table,
    lossless,
    make_material_pair,
    spp_scalars,
)
from .radial_solver import (
    ModeProblem,
    ModeSolution,
    PmlConfig,
    RadialGrid,
    SolverError,
    SolverSetup,
    assemble_system,
    default_setup,
    make_grid,
    solve_mode,
    solve_tridiagonal,
    stretch,
)
from .radiance import (
    CollectiveSpectrum,
    EmitterRing,
    brute_force_spectrum,
    collective_spectrum,
    make_ring,
    planar_spectrum,
    ring_polar_angle,
    spectrum_from_self_sums,
)

__all__ = [name for name in dir() if not name.startswith("_")]
