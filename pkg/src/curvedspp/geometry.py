"""Spheroid differential geometry and the surface-wave operator coefficients.

The spheroid is parametrized by polar angle theta (from the north pole) and
azimuth phi, with equatorial semi-axis a and polar semi-axis c (nm).  The
orientation sign s is +1 for a convex metal surface (outward normal into the
dielectric) and -1 for a concave one; flipping s negates the second
fundamental form, the mean curvature and the traceless shape tensor, while
intrinsic quantities (metric, Laplace-Beltrami coefficients) are unchanged.

All angle-dependent functions accept scalars or numpy arrays, and complex
angles: the operator coefficients are evaluated on the complex-stretched
coordinate inside the absorbing layer with the very same code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .materials import SppScalars


@dataclass(frozen=True)
class SpheroidSurface:
    """Spheroid with semi-axes a (equatorial), c (polar) in nm and sign s."""

    a: float
    c: float
    s: int = +1

    def __post_init__(self):
        if self.a <= 0.0 or self.c <= 0.0:
            raise ValueError(f"semi-axes must be positive, got a={self.a}, c={self.c}")
        if self.s not in (+1, -1):
            raise ValueError(f"orientation sign must be +1 or -1, got {self.s}")


@dataclass(frozen=True)
class AblationOptions:
    """Switches that drop one or both curvature potentials from the operator."""

    ablate_vh: bool = False
    ablate_vsigma: bool = False


NO_ABLATION = AblationOptions()


@dataclass(frozen=True)
class OperatorCoefficients:
    """Coefficients of one azimuthal mode: A*d2/dtheta2 + B*d/dtheta + Cm."""

    A: complex
    B: complex
    Cm: complex


def rho(surface: SpheroidSurface, theta):
    """Metric weight rho = a^2 cos^2(theta) + c^2 sin^2(theta), nm^2."""
    a, c = surface.a, surface.c
    return a * a * np.cos(theta) ** 2 + c * c * np.sin(theta) ** 2


def metric_components(surface: SpheroidSurface, theta):
    """Diagonal intrinsic metric (gamma_theta_theta, gamma_phi_phi)."""
    return rho(surface, theta), (surface.a * np.sin(theta)) ** 2


def second_fundamental_form(surface: SpheroidSurface, theta):
    """Diagonal second fundamental form (h_theta_theta, h_phi_phi)."""
    a, c, s = surface.a, surface.c, surface.s
    r = rho(surface, theta)
    h_tt = -s * a * c / np.sqrt(r)
    return h_tt, h_tt * np.sin(theta) ** 2


def mean_curvature(surface: SpheroidSurface, theta):
    """Mean curvature H = -(s/2) c (a^2 + rho) / (a rho^{3/2}), nm^-1.

    Strictly negative everywhere for a convex metal surface (s = +1);
    reduces to -s/R on the sphere and to -s*c/a^2 at the poles.
    """
    a, c, s = surface.a, surface.c, surface.s
    r = rho(surface, theta)
    return -0.5 * s * c * (a * a + r) / (a * r ** 1.5)


def sigma_components(surface: SpheroidSurface, theta):
    """Traceless shape tensor components (sigma^theta_theta, sigma^phi_phi).

    Contravariant components; the trace gamma_ab sigma^ab vanishes
    identically.  Both are zero on a sphere.
    """
    a, c, s = surface.a, surface.c, surface.s
    r = rho(surface, theta)
    sigma_tt = s * c * (c * c - a * a) * np.sin(theta) ** 2 / (2.0 * a * r ** 2.5)
    sigma_pp = s * c * (a * a - c * c) / (2.0 * a**3 * r ** 1.5)
    return sigma_tt, sigma_pp


def christoffel_theta(surface: SpheroidSurface, theta):
    """The two Christoffel symbols entering the operator:
    Gamma^theta_{theta,theta} and Gamma^theta_{phi,phi}."""
    a, c = surface.a, surface.c
    r = rho(surface, theta)
    sc = np.sin(theta) * np.cos(theta)
    return (c * c - a * a) * sc / r, -a * a * sc / r


def operator_coefficients(
    surface: SpheroidSurface,
    scalars: SppScalars,
    theta_tilde,
    m: int,
    ablation: AblationOptions = NO_ABLATION,
) -> OperatorCoefficients:
    """Coefficients of the azimuthal-mode wave operator at (possibly complex)
    angle theta_tilde.

    A multiplies d^2/dtheta^2, B multiplies d/dtheta, and Cm collects the
    zeroth-order terms: the centrifugal -m^2(...) piece, the squared mode
    wavenumber, and the isotropic curvature potential.  m enters only as m^2,
    so +m and -m produce identical coefficients.  With ablate_vh the isotropic
    potential term is dropped; with ablate_vsigma every anisotropic term is
    dropped.  Angles with Re outside (0, pi) are rejected: the poles are
    handled by boundary rows, not by coefficient evaluation.
    """
    re = np.real(theta_tilde)
    if np.any(re <= 0.0) or np.any(re >= np.pi):
        raise ValueError("Re(theta_tilde) must lie strictly inside (0, pi)")

    a, c, s = surface.a, surface.c, surface.s
    th = np.asarray(theta_tilde) + 0j
    sin_t, cos_t = np.sin(th), np.cos(th)
    r = a * a * cos_t**2 + c * c * sin_t**2
    sqrt_r = np.sqrt(r)
    r32 = r * sqrt_r
    r52 = r * r32

    A = 1.0 / r
    B = a * a * cos_t / (sin_t * r * r)
    Cm = -(m * m) / (a * a * sin_t**2) + scalars.k_spp**2

    if not ablation.ablate_vsigma:
        cs = scalars.C_sigma
        diff = c * c - a * a
        A = A + s * cs * c * diff * sin_t**2 / (2.0 * a * r52)
        B = B - s * cs * c * diff * sin_t * cos_t / (2.0 * a * r52) * (
            1.0 + diff * sin_t**2 / r
        )
        Cm = Cm - (m * m) * s * cs * c * (-diff) / (2.0 * a**3 * r32)

    if not ablation.ablate_vh:
        Cm = Cm - s * scalars.C_H * c * (a * a + r) / (2.0 * a * r32)

    if np.ndim(theta_tilde) == 0:
        return OperatorCoefficients(complex(A), complex(B), complex(Cm))
    return OperatorCoefficients(A, B, Cm)


def pole_coefficients(
    surface: SpheroidSurface,
    scalars: SppScalars,
    ablation: AblationOptions = NO_ABLATION,
) -> tuple[complex, complex]:
    """theta -> 0 limits used by the m = 0 pole row: (A_pole, C_pole).

    Near the pole the operator degenerates to A_pole * d^2/dtheta^2 + C_pole
    with A_pole = 2/a^2: the singular (1/theta) first-derivative term
    contributes a second A(0) = 1/a^2 to the second derivative of an even
    solution, and every anisotropic term vanishes there.
    """
    a, c, s = surface.a, surface.c, surface.s
    a_pole = 2.0 / (a * a)
    c_pole = scalars.k_spp**2 + 0j
    if not ablation.ablate_vh:
        c_pole = c_pole - s * scalars.C_H * c / (a * a)
    return complex(a_pole), complex(c_pole)
