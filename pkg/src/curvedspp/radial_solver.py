"""Finite-difference solver for one azimuthal mode on the stretched polar axis.

Each mode g_m(theta; theta0) satisfies a second-order complex ODE on
[0, theta_max] driven by a delta source at theta0, terminated by an absorbing
layer (complex coordinate stretching with a cubic absorption ramp) in
(theta_pml, theta_max].  Discretization is second-order central differences on
a uniform grid; the resulting tridiagonal system is inverted by the Thomas
algorithm in complex arithmetic.

Boundary rows: Dirichlet g = 0 at theta_max (behind the absorber) and at the
pole for m != 0; for m = 0 the pole row is the even-symmetry ghost-node
stencil of the regularized operator, which lets the axisymmetric wave pass
through the pole without artificial reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    NO_ABLATION,
    AblationOptions,
    SpheroidSurface,
    operator_coefficients,
    pole_coefficients,
    rho,
)
from .materials import SppScalars

# Snap tolerance for a source angle that lands on a grid node (rad).
_ON_NODE_TOL = 1e-9

# Relative pivot magnitude below which the tridiagonal sweep is near-singular.
_PIVOT_TOL = 1e-14


class SolverError(RuntimeError):
    """Numerical failure in the mode solve (near-singular system, bad PML)."""


@dataclass(frozen=True)
class PmlConfig:
    """Absorbing-layer parameters: cubic ramp from theta_pml to theta_max."""

    theta_pml: float
    theta_max: float
    sigma_max: float
    ramp_exponent: int = 3

    def __post_init__(self):
        if not (0.0 < self.theta_pml < self.theta_max < math.pi):
            raise ValueError(
                f"need 0 < theta_pml < theta_max < pi, got "
                f"({self.theta_pml}, {self.theta_max})"
            )
        if self.sigma_max <= 0.0:
            raise ValueError(f"sigma_max must be positive, got {self.sigma_max}")
        if self.ramp_exponent != 3:
            raise ValueError("only the cubic absorption ramp is supported")


def stretch(theta, pml: PmlConfig):
    """Complex stretching at angle theta: (zeta, zeta', theta_tilde).

    zeta = 1 + i*sigma(theta) with sigma the cubic ramp, zero up to theta_pml;
    theta_tilde = theta + i * integral of sigma, using the closed-form quartic
    antiderivative of the ramp.
    """
    theta = np.asarray(theta, dtype=float)
    width = pml.theta_max - pml.theta_pml
    u = np.clip((theta - pml.theta_pml) / width, 0.0, None)
    sigma = pml.sigma_max * u**3
    sigma_prime = 3.0 * pml.sigma_max * u**2 / width
    zeta = 1.0 + 1j * sigma
    zeta_prime = 1j * sigma_prime
    theta_tilde = theta + 0.25j * pml.sigma_max * width * u**4
    if theta.ndim == 0:
        return complex(zeta), complex(zeta_prime), complex(theta_tilde)
    return zeta, zeta_prime, theta_tilde


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid theta_i = i*h, i = 0..n_points-1, ending at theta_max."""

    n_points: int
    h: float
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_points < 64:
            raise ValueError(f"need at least 64 grid points, got {self.n_points}")


def make_grid(theta_max: float, n_points: int) -> RadialGrid:
    n_points = max(int(n_points), 64)
    nodes = np.linspace(0.0, theta_max, n_points)
    return RadialGrid(n_points=n_points, h=theta_max / (n_points - 1), nodes=nodes)


@dataclass(frozen=True)
class SolverSetup:
    """Grid plus absorber configuration shared by all modes of one problem."""

    grid: RadialGrid
    pml: PmlConfig


def default_setup(
    surface: SpheroidSurface,
    scalars: SppScalars,
    theta0: float,
    *,
    grid_density: float = 20.0,
    pml_sigma_max: float = 2.5,
    pml_width_wavelengths: float = 2.0,
    domain_reduced_wavelengths: float = 25.0,
    theta_max: float | None = None,
) -> SolverSetup:
    """Build the default grid and absorber for a source at theta0.

    Resolution: grid_density points per local mode wavelength, converted to
    angle with the conservative arc radius max(a, c).  Domain: 25 reduced
    wavelengths of arc beyond the source (capped at 0.95*pi, clear of the
    south pole which has no boundary treatment), the last
    pml_width_wavelengths full wavelengths of which are the absorber.
    """
    lam_bar = scalars.lambda_bar_spp
    a = surface.a
    if theta_max is None:
        theta_max = min(theta0 + domain_reduced_wavelengths * lam_bar / a, 0.95 * math.pi)
    pml_width = pml_width_wavelengths * 2.0 * math.pi * lam_bar / a
    theta_pml = theta_max - pml_width
    if theta_pml <= theta0:
        raise ValueError(
            f"absorber would start at {theta_pml:.4f} rad, before the source at "
            f"{theta0:.4f} rad; enlarge theta_max or shrink the absorber"
        )
    h_target = 2.0 * math.pi / (grid_density * scalars.k_spp.real * max(surface.a, surface.c))
    n_points = max(64, int(math.ceil(theta_max / h_target)) + 1)
    grid = make_grid(theta_max, n_points)
    return SolverSetup(grid=grid, pml=PmlConfig(theta_pml, theta_max, pml_sigma_max))


@dataclass(frozen=True)
class ModeProblem:
    """One azimuthal-mode boundary-value problem with a delta source.

    A theta0 within 1e-9 rad of a grid node is snapped onto that node exactly
    (a physically negligible move), so the source weights become the clean
    single-node delta (1, 0) instead of float fuzz.  Any larger displacement
    of the source would shift every coupling phase by O(k*h) and is never
    applied.
    """

    surface: SpheroidSurface
    scalars: SppScalars
    m: int
    theta0: float
    grid: RadialGrid
    pml: PmlConfig
    ablation: AblationOptions = NO_ABLATION

    def __post_init__(self):
        h = self.grid.h
        theta0 = float(self.theta0)
        nearest = round(theta0 / h) * h
        if abs(theta0 - nearest) < _ON_NODE_TOL:
            object.__setattr__(self, "theta0", nearest)
        if not (h < self.theta0 < self.pml.theta_pml - h):
            raise ValueError(
                f"source angle {self.theta0:.6f} rad must lie strictly inside "
                f"(h, theta_pml - h) = ({h:.6f}, {self.pml.theta_pml - h:.6f})"
            )


@dataclass(frozen=True)
class ModeSolution:
    """Discrete mode solution with source-point bookkeeping.

    values holds g_m at the grid nodes; at_source is g_m(theta0, theta0) with
    the known derivative-jump contribution removed from the interpolation, so
    it converges at second order like the nodal values.  jump_residual is the
    defect of the analytic derivative-jump condition measured with one-sided
    second-order differences (first-order small under refinement).
    """

    problem: ModeProblem
    values: np.ndarray = field(repr=False)
    at_source: complex
    jump_residual: float
    source_jump: complex   # derivative jump of g across theta0
    source_cell: int       # index i with theta_i <= theta0 < theta_{i+1}

    def eval(self, theta):
        """Interpolate g_m at angles theta (kink-aware in the source cell)."""
        grid = self.problem.grid
        theta = np.asarray(theta, dtype=float)
        scalar_input = theta.ndim == 0
        th = np.atleast_1d(theta)
        if np.any(th < 0.0) or np.any(th > grid.nodes[-1] + 1e-12):
            raise ValueError("evaluation angle outside the grid")
        idx = np.clip((th / grid.h).astype(int), 0, grid.n_points - 2)
        tl = grid.nodes[idx]
        w = (th - tl) / grid.h
        out = (1.0 - w) * self.values[idx] + w * self.values[idx + 1]
        # Linear interpolation through the derivative kink at theta0 carries an
        # O(h) error inside the source cell; subtract the known kink profile.
        in_cell = idx == self.source_cell
        if np.any(in_cell):
            t0 = self.problem.theta0
            tr = grid.nodes[self.source_cell + 1]
            kink = self.source_jump * np.maximum(0.0, th - t0)
            kink_lin = self.source_jump * (tr - t0) * (th - tl) / grid.h
            out = np.where(in_cell, out + kink - kink_lin, out)
        return complex(out[0]) if scalar_input else out


def solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas sweep for a complex tridiagonal system.

    lower[i] multiplies x[i-1], diag[i] multiplies x[i], upper[i] multiplies
    x[i+1].  Raises SolverError when a pivot falls below 1e-14 of its row
    magnitude, which signals an accidental real eigenvalue of the operator.
    """
    n = len(diag)
    a = list(map(complex, lower))
    b = list(map(complex, diag))
    c = list(map(complex, upper))
    d = list(map(complex, rhs))

    cp = [0j] * n
    dp = [0j] * n
    scale = abs(b[0]) + abs(c[0])
    if abs(b[0]) < _PIVOT_TOL * scale or scale == 0.0:
        raise SolverError("near-singular pivot in row 0; perturb loss or grid")
    cp[0] = c[0] / b[0]
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        piv = b[i] - a[i] * cp[i - 1]
        scale = abs(a[i]) + abs(b[i]) + abs(c[i])
        if abs(piv) < _PIVOT_TOL * scale:
            raise SolverError(
                f"near-singular pivot in row {i}; perturb loss or grid"
            )
        cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i] * dp[i - 1]) / piv
    x = np.empty(n, dtype=complex)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def _source_geometry(problem: ModeProblem):
    """Source cell index, interpolation weights and delta amplitude."""
    grid = problem.grid
    t0 = problem.theta0
    i = int(t0 / grid.h)
    w_right = (t0 - grid.nodes[i]) / grid.h
    w_left = 1.0 - w_right
    amp = -1.0 / (
        problem.surface.a * math.sin(t0) * math.sqrt(rho(problem.surface, t0))
    )
    return i, w_left, w_right, amp


def assemble_system(problem: ModeProblem):
    """Build the tridiagonal system (lower, diag, upper, rhs) for one mode.

    Interior rows discretize [A/zeta^2] d2 + [B/zeta - A zeta'/zeta^3] d1 + Cm
    with central stencils on the stretched coefficients; the delta source is
    split over the two bracketing nodes with linear weights and divided by h.
    """
    grid, pml = problem.grid, problem.pml
    n, h = grid.n_points, grid.h
    theta = grid.nodes

    zeta, zeta_p, theta_t = stretch(theta[1:-1], pml)
    coeff = operator_coefficients(
        problem.surface, problem.scalars, theta_t, problem.m, problem.ablation
    )
    c2 = coeff.A / zeta**2
    c1 = coeff.B / zeta - coeff.A * zeta_p / zeta**3
    c0 = coeff.Cm

    lower = np.zeros(n, dtype=complex)
    diag = np.zeros(n, dtype=complex)
    upper = np.zeros(n, dtype=complex)
    rhs = np.zeros(n, dtype=complex)

    lower[1:-1] = c2 / h**2 - c1 / (2.0 * h)
    diag[1:-1] = -2.0 * c2 / h**2 + c0
    upper[1:-1] = c2 / h**2 + c1 / (2.0 * h)

    if problem.m == 0:
        # Ghost-node elimination of the even extension g(-h) = g(h) in the
        # pole-regularized operator A_pole * g'' + C_pole * g.
        a_pole, c_pole = pole_coefficients(
            problem.surface, problem.scalars, problem.ablation
        )
        diag[0] = -2.0 * a_pole / h**2 + c_pole
        upper[0] = 2.0 * a_pole / h**2
    else:
        diag[0] = 1.0

    diag[n - 1] = 1.0

    i, w_left, w_right, amp = _source_geometry(problem)
    if i < 1 or i + 1 > n - 2:
        raise ValueError("delta source may not load a boundary row")
    rhs[i] = w_left * amp / h
    rhs[i + 1] = w_right * amp / h
    return lower, diag, upper, rhs


def solve_mode(problem: ModeProblem) -> ModeSolution:
    """Solve one azimuthal mode and populate the source-point diagnostics."""
    grid = problem.grid
    h = grid.h
    values = solve_tridiagonal(*assemble_system(problem))

    i, w_left, w_right, amp = _source_geometry(problem)
    a_at_source = operator_coefficients(
        problem.surface, problem.scalars, problem.theta0, problem.m, problem.ablation
    ).A
    jump = amp / a_at_source  # A(theta0) * [dg/dtheta] = amp

    t0 = problem.theta0
    tl, tr = grid.nodes[i], grid.nodes[i + 1]
    at_source = (
        w_left * values[i]
        + w_right * values[i + 1]
        - jump * (tr - t0) * (t0 - tl) / h
    )

    # One-sided second-order derivatives on each side of the source cell.
    if i >= 2 and i + 3 <= grid.n_points - 1:
        d_left = (3.0 * values[i] - 4.0 * values[i - 1] + values[i - 2]) / (2.0 * h)
        d_right = (-3.0 * values[i + 1] + 4.0 * values[i + 2] - values[i + 3]) / (2.0 * h)
    else:
        d_left = (values[i] - values[i - 1]) / h
        d_right = (values[i + 2] - values[i + 1]) / h
    residual = abs(a_at_source * (d_right - d_left) - amp)

    return ModeSolution(
        problem=problem,
        values=values,
        at_source=complex(at_source),
        jump_residual=float(residual),
        source_jump=complex(jump),
        source_cell=i,
    )
