"""Closed-form dispersion results for spheres and cylinders.

These are consistency formulas used as cross-checks against the numerical
Green's function and as standalone CLI outputs.  They are derived for real
permittivities, so every function here evaluates at the lossless projection
Re(eps_m) of the supplied material (complex input is accepted everywhere).

Sign conventions: s_sign = +1 is the convex metal body (sphere of radius R has
mean curvature -1/R, cylinder -1/(2R)), s_sign = -1 the concave counterpart.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .materials import SppScalars, lossless, make_material_pair, spp_scalars


def _lossless_scalars(scalars: SppScalars) -> SppScalars:
    if scalars.pair.eps_m.imag == 0.0:
        return scalars
    return spp_scalars(lossless(scalars.pair))


@dataclass(frozen=True)
class CylinderCase:
    """Cylinder of radius R (nm) with the dimensionless size parameter
    V = k0 * R * sqrt(-(eps_d + eps_m))."""

    R: float
    s_sign: int
    V_param: float


def make_cylinder_case(scalars: SppScalars, R: float, s_sign: int = +1) -> CylinderCase:
    if R <= 0.0:
        raise ValueError("R must be positive")
    if s_sign not in (+1, -1):
        raise ValueError("s_sign must be +1 or -1")
    sc = _lossless_scalars(scalars)
    pair = sc.pair
    v = pair.k0 * R * math.sqrt(-(pair.eps_d + pair.eps_m.real))
    return CylinderCase(R=float(R), s_sign=s_sign, V_param=v)


def sphere_keff(scalars: SppScalars, R: float) -> complex:
    """First-order effective wavenumber on a convex metal sphere of radius R.

    k_eff = k_spp * (1 - (ed^2 + ed*em + em^2) / (2 k0 R em ed sqrt(-(ed+em)))),
    which exceeds k_spp for any valid pair: convex curvature blue-shifts the
    mode.
    """
    if R <= 0.0:
        raise ValueError("R must be positive")
    sc = _lossless_scalars(scalars)
    ed, em, k0 = sc.pair.eps_d, sc.pair.eps_m.real, sc.pair.k0
    correction = (ed * ed + ed * em + em * em) / (
        2.0 * k0 * R * em * ed * math.sqrt(-(ed + em))
    )
    return sc.k_spp * (1.0 - correction)


def sphere_keff_unexpanded(scalars: SppScalars, R: float) -> complex:
    """Unexpanded form sqrt(k_spp^2 + C_H * H) with H = -1/R on the sphere."""
    if R <= 0.0:
        raise ValueError("R must be positive")
    sc = _lossless_scalars(scalars)
    w = cmath.sqrt(sc.k_spp**2 - sc.C_H / R)
    return -w if w.real < 0 else w


def cylinder_paraxial_potential(scalars: SppScalars, R: float) -> float:
    """Magnitude of the curvature potential in the paraxial envelope equation
    on a cylinder: lambda_bar0 * n_e / (2 R sqrt(-(eps_m + eps_d))), nm^-1.

    Scales as 1/R and diverges toward the surface-mode resonance.
    """
    if R <= 0.0:
        raise ValueError("R must be positive")
    sc = _lossless_scalars(scalars)
    pair = sc.pair
    lam_bar0 = 1.0 / pair.k0
    return (
        lam_bar0
        * sc.n_e.real
        / (2.0 * R * math.sqrt(-(pair.eps_d + pair.eps_m.real)))
    )


def cylinder_momentum_ellipse(
    scalars: SppScalars, R: float, s_sign: int = +1
) -> tuple[complex, complex, complex]:
    """Coefficients (on k_z^2, on k_theta^2, right-hand side) of the local
    momentum ellipse on a cylinder.

    Returns (1 + s*C_sigma/2R, 1 - s*C_sigma/2R, k_spp^2 - s*C_H/2R); at the
    golden-ratio permittivity point the ellipse degenerates to a circle.
    """
    if R <= 0.0:
        raise ValueError("R must be positive")
    if s_sign not in (+1, -1):
        raise ValueError("s_sign must be +1 or -1")
    sc = _lossless_scalars(scalars)
    half = s_sign * 0.5 / R
    return (
        1.0 + sc.C_sigma * half,
        1.0 - sc.C_sigma * half,
        sc.k_spp**2 - sc.C_H * half,
    )


def cylinder_kz(scalars: SppScalars, R: float, m: int, s_sign: int = +1) -> complex:
    """Axial wavenumber k_z(m) = sqrt(k_spp^2 (1 + s/V) - m^2/R^2).

    A negative radicand means an evanescent axial mode, flagged by the nonzero
    imaginary part of the returned value.
    """
    case = make_cylinder_case(scalars, R, s_sign)
    sc = _lossless_scalars(scalars)
    kz2 = sc.k_spp.real ** 2 * (1.0 + s_sign / case.V_param) - (m / R) ** 2
    if kz2 >= 0.0:
        return complex(math.sqrt(kz2))
    return 1j * math.sqrt(-kz2)


def cylinder_ktheta(scalars: SppScalars, R: float, s_sign: int = +1) -> complex:
    """Azimuthal wavenumber of the purely circumferential mode (k_z = 0):
    k_theta = k_spp * sqrt(1 - s * (ed+em)^2 / (ed*em) / V).

    On the convex metal cylinder the radicand exceeds one ((ed+em)^2/(ed*em)
    is negative), so k_theta > k_spp.  For the concave pin (s_sign = -1) this
    keeps the single-interface material prefactor; treatments that model the
    pin as a metal-dielectric-metal channel obtain a different prefactor,
    (em^2+ed^2)(em+ed)^2/(ed*em*(em^2-ed^2)), which is close to the one used
    here except near the surface-mode resonance.
    """
    case = make_cylinder_case(scalars, R, s_sign)
    sc = _lossless_scalars(scalars)
    ed, em = sc.pair.eps_d, sc.pair.eps_m.real
    radicand = 1.0 - s_sign * (ed + em) ** 2 / (ed * em) / case.V_param
    if radicand >= 0.0:
        return complex(sc.k_spp.real * math.sqrt(radicand))
    return sc.k_spp.real * 1j * math.sqrt(-radicand)
