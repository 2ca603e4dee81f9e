"""Collective radiance of an emitter ring coupled through the surface mode.

N identical, surface-normal emitters sit at equal azimuthal spacing on a
parallel circle near the pole.  The coupling matrix is circulant, so its
eigenvectors are the discrete Fourier vectors and its eigenvalues reduce to
residue-class sums S_k of the coincident-point modes.  Normalized observables
per collective index k:

    gamma_k / gamma_0 = N * Im(S_k) / Im(S)
    delta_k / gamma_0 = -(1/2) * Re(N*S_k - S) / Im(S)

The common coupling prefactor and the dipole constant cancel in both ratios
(the small Im part of the dipole constant is dropped, consistent with
absorbing the divergent self-energy into the transition frequency).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import NO_ABLATION, AblationOptions, SpheroidSurface
from .greens import SelfSums, default_m_max, flat_reference, self_sums, solve_mode_bank
from .materials import SppScalars
from .radial_solver import SolverError, SolverSetup

_BISECTION_TOL = 1e-13
_MAX_DENSE_EMITTERS = 16


@dataclass(frozen=True)
class EmitterRing:
    """Ring of N emitters at polar angle theta0 with the given nearest-neighbor
    spacing (nm, chord model); azimuths are 2*pi*(j-1)/N."""

    n_emitters: int
    theta0: float
    spacing: float
    phi: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CollectiveSpectrum:
    """Normalized decay rates and cooperative shifts per collective index k."""

    gamma_norm: np.ndarray
    delta_norm: np.ndarray
    n_emitters: int
    m_max: int

    @property
    def sum_rule_residual(self) -> float:
        """|sum_k gamma_k/gamma_0 - N|; zero under any paired truncation."""
        return float(abs(self.gamma_norm.sum() - self.n_emitters))


def ring_polar_angle(surface: SpheroidSurface, n_emitters: int, spacing: float) -> float:
    """Solve 2*a*sin(theta0)*sin(pi/N) = spacing for theta0 by bisection.

    The chord through the embedding space stands in for the geodesic
    nearest-neighbor distance; near the pole the relative error is
    O(theta0^2).  Fails if no solution exists with theta0 < pi/4 (ring too
    large for the near-pole regime).
    """
    if n_emitters < 2:
        raise ValueError("need at least 2 emitters")
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    factor = 2.0 * surface.a * math.sin(math.pi / n_emitters)

    def chord_defect(theta: float) -> float:
        return factor * math.sin(theta) - spacing

    hi = 0.25 * math.pi
    if chord_defect(hi) < 0.0:
        raise ValueError(
            f"no ring with spacing {spacing} nm fits below theta0 = pi/4 on "
            f"a = {surface.a} nm; ring too large for the near-pole regime"
        )
    lo = 0.0
    while hi - lo > _BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if chord_defect(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def make_ring(surface: SpheroidSurface, n_emitters: int, spacing: float) -> EmitterRing:
    theta0 = ring_polar_angle(surface, n_emitters, spacing)
    phi = 2.0 * math.pi * np.arange(n_emitters) / n_emitters
    return EmitterRing(n_emitters=n_emitters, theta0=theta0, spacing=spacing, phi=phi)


def spectrum_from_self_sums(sums: SelfSums) -> CollectiveSpectrum:
    """Normalized collective observables from paired-truncation self-sums.

    Aborts when Im(S) <= 0: the single-emitter rate must be positive, so a
    non-positive value signals an unphysical solve (absorber misconfigured or
    resonance hit).
    """
    im_s = sums.S.imag
    if im_s <= 0.0:
        raise SolverError(
            f"Im(S) = {im_s:.3e} <= 0: unphysical single-emitter rate; "
            "check the absorbing-layer configuration"
        )
    n = sums.n_emitters
    gamma = n * sums.S_k.imag / im_s
    delta = -0.5 * (n * sums.S_k - sums.S).real / im_s
    return CollectiveSpectrum(
        gamma_norm=gamma, delta_norm=delta, n_emitters=n, m_max=sums.m_max
    )


def collective_spectrum(
    surface: SpheroidSurface,
    scalars: SppScalars,
    ring: EmitterRing,
    m_max_blocks: int | None = None,
    ablation: AblationOptions = NO_ABLATION,
    setup: SolverSetup | None = None,
) -> CollectiveSpectrum:
    """Collective spectrum by the circulant fast path (residue-class sums)."""
    sums = self_sums(
        surface,
        scalars,
        ring.theta0,
        ring.n_emitters,
        m_max_blocks=m_max_blocks,
        ablation=ablation,
        setup=setup,
    )
    return spectrum_from_self_sums(sums)


def brute_force_spectrum(
    surface: SpheroidSurface,
    scalars: SppScalars,
    ring: EmitterRing,
    m_max_blocks: int | None = None,
    ablation: AblationOptions = NO_ABLATION,
    setup: SolverSetup | None = None,
) -> CollectiveSpectrum:
    """Dense-coupling oracle for the circulant shortcut.

    Builds the first row of the N x N coupling matrix from the mode sum at
    every pairwise azimuth (self-coupling included), then projects onto the
    known Fourier eigenvectors instead of running a general eigensolver.
    Must agree with collective_spectrum to rounding error, since it reorganizes
    the very same g_m data.
    """
    n = ring.n_emitters
    if n > _MAX_DENSE_EMITTERS:
        raise ValueError(f"dense path supports at most {_MAX_DENSE_EMITTERS} emitters")
    if m_max_blocks is None:
        m_max = default_m_max(surface, scalars, ring.theta0, n)
    else:
        m_max = m_max_blocks * n
    bank = solve_mode_bank(surface, scalars, ring.theta0, m_max, ablation, setup)

    g = bank.at_source
    m = np.arange(1, m_max + 1)
    # Coupling of emitter 1 to emitter l (l = 1 is the renormalized self term).
    row = np.array(
        [
            (g[0] + 2.0 * np.sum(g[1:] * np.cos(m * dphi))) / (2.0 * math.pi)
            for dphi in ring.phi
        ]
    )

    k = np.arange(n)
    phases = np.exp(1j * np.outer(k, ring.phi))
    lam = phases @ row  # eigenvalues by projection on exp(i k phi_j)/sqrt(N)

    im_self = row[0].imag
    if im_self <= 0.0:
        raise SolverError(
            f"Im(self-coupling) = {im_self:.3e} <= 0: unphysical single-emitter "
            "rate; check the absorbing-layer configuration"
        )
    gamma = lam.imag / im_self
    delta = -0.5 * (lam - row[0]).real / im_self
    return CollectiveSpectrum(
        gamma_norm=gamma, delta_norm=delta, n_emitters=n, m_max=m_max
    )


def planar_spectrum(scalars: SppScalars, n_emitters: int, spacing: float) -> CollectiveSpectrum:
    """Analytic flat-interface circulant: the zero-curvature reference.

    Emitters sit on a planar circle with the same chord spacing; pairwise
    couplings are (i/4) H0^(1)(Re(k_spp) * distance) and the renormalized
    self-coupling is i/4.  m_max is reported as 0 (no mode sum involved).
    """
    n = n_emitters
    if n < 2:
        raise ValueError("need at least 2 emitters")
    radius = spacing / (2.0 * math.sin(math.pi / n))
    phi = 2.0 * math.pi * np.arange(n) / n
    row = np.empty(n, dtype=complex)
    row[0] = 0.25j
    for l in range(1, n):
        dist = 2.0 * radius * math.sin(math.pi * l / n)
        row[l] = flat_reference(scalars, dist)
    k = np.arange(n)
    lam = np.exp(1j * np.outer(k, phi)) @ row
    gamma = lam.imag / row[0].imag
    delta = -0.5 * (lam - row[0]).real / row[0].imag
    return CollectiveSpectrum(gamma_norm=gamma, delta_norm=delta, n_emitters=n, m_max=0)


def pair_spectrum_reference(self_coupling: complex, cross_coupling: complex) -> tuple[float, float, float, float]:
    """Direct symmetric/antisymmetric eigenvalues for N = 2.

    Returns (gamma_plus, gamma_minus, delta_plus, delta_minus) normalized to
    the single-emitter rate; the circulant machinery must reproduce these.
    """
    im_self = self_coupling.imag
    lam_plus = self_coupling + cross_coupling
    lam_minus = self_coupling - cross_coupling
    return (
        lam_plus.imag / im_self,
        lam_minus.imag / im_self,
        -0.5 * (lam_plus - self_coupling).real / im_self,
        -0.5 * (lam_minus - self_coupling).real / im_self,
    )
