"""Surface Green's function from the azimuthal mode sum, paired-truncation
self-sums, and the flat-interface Hankel reference.

The Green's function on the spheroid is assembled as
G(theta, dphi; theta0) = (1/2pi) * [g_0 + 2 * sum_m g_m cos(m*dphi)] using the
m -> -m degeneracy of the mode equation.  At coincidence the real part of the
mode sum diverges logarithmically (point-source artifact); observables only
ever use Im(S), Im(S_k) and the paired-truncation combination Re(N*S_k - S),
whose log-divergences cancel block by block.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import NO_ABLATION, AblationOptions, SpheroidSurface
from .materials import SppScalars
from .radial_solver import ModeProblem, ModeSolution, SolverSetup, default_setup, solve_mode

# Below the switch the power/log series is used, above it the large-argument
# asymptotic expansion.  At 12 both branches are accurate to ~1e-12 in double
# precision; the asymptotic side cannot reach 1e-10 for arguments much below
# ~10, which pins the switch here.
HANKEL_SERIES_ASYMPTOTIC_SWITCH = 12.0

_EULER_GAMMA = 0.5772156649015328606065


def _h0_series(x: float) -> complex:
    """J0 + i*Y0 by the ascending power/log series (x <= switch).

    Terms are generated by recurrence and summed with Neumaier compensation;
    the alternating-series cancellation at x ~ 12 then costs ~1e-12 absolute.
    """
    half2 = 0.25 * x * x
    term = 1.0
    j0, j0_c = 1.0, 0.0
    ysum, ysum_c = 0.0, 0.0
    harmonic = 0.0
    for k in range(1, 200):
        term *= -half2 / (k * k)
        harmonic += 1.0 / k
        t = j0 + term
        j0_c += (j0 - t) + term if abs(j0) >= abs(term) else (term - t) + j0
        j0 = t
        yterm = -term * harmonic  # (-1)^{k+1} H_k (x/2)^{2k} / (k!)^2
        t = ysum + yterm
        ysum_c += (ysum - t) + yterm if abs(ysum) >= abs(yterm) else (yterm - t) + ysum
        ysum = t
        if abs(term) < 1e-18 * (abs(j0) + 1.0):
            break
    j0 += j0_c
    ysum += ysum_c
    y0 = (2.0 / math.pi) * ((math.log(0.5 * x) + _EULER_GAMMA) * j0 + ysum)
    return complex(j0, y0)


def _h0_asymptotic(z: complex) -> complex:
    """Large-argument expansion of H0^(1), truncated at the smallest term.

    H0^(1)(z) ~ sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k i^k a_k / z^k with
    a_k = (-1)^k ((2k-1)!!)^2 / (k! 8^k).  Valid for |z| above the switch;
    accepts complex z with positive real part (outgoing-wave branch).
    """
    s = 1.0 + 0j
    term = 1.0 + 0j
    prev = abs(term)
    for k in range(1, 60):
        term *= -1j * (2 * k - 1) ** 2 / (8.0 * k * z)
        mag = abs(term)
        if mag >= prev:  # divergence onset of the asymptotic tail
            break
        s += term
        prev = mag
    return cmath.sqrt(2.0 / (math.pi * z)) * cmath.exp(1j * (z - 0.25 * math.pi)) * s


def hankel0_first_kind(x: float) -> complex:
    """H0^(1)(x) = J0(x) + i*Y0(x) for real x > 0, accurate to ~1e-12."""
    if x <= 0.0:
        raise ValueError(f"argument must be positive, got {x}")
    if x <= HANKEL_SERIES_ASYMPTOTIC_SWITCH:
        return _h0_series(x)
    return _h0_asymptotic(complex(x))


def flat_reference(scalars: SppScalars, distance: float, use_complex_k: bool = False) -> complex:
    """Flat-interface Green's function (i/4) H0^(1)(k_spp * distance).

    By default the real part of k_spp is used, which keeps the argument real
    for lossy metals.  With use_complex_k the full complex wavenumber enters
    through the asymptotic branch only, so |k_spp|*distance must exceed the
    series/asymptotic switch.
    """
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    if use_complex_k:
        z = scalars.k_spp * distance
        if abs(z) <= HANKEL_SERIES_ASYMPTOTIC_SWITCH:
            raise ValueError(
                "complex-argument evaluation is supported by the asymptotic "
                f"branch only (|k_spp|*distance > {HANKEL_SERIES_ASYMPTOTIC_SWITCH})"
            )
        return 0.25j * _h0_asymptotic(z)
    return 0.25j * hankel0_first_kind(scalars.k_spp.real * distance)


def default_m_max(
    surface: SpheroidSurface, scalars: SppScalars, theta0: float, n_emitters: int | None = None
) -> int:
    """Default azimuthal truncation: smallest multiple of N (or integer)
    exceeding 3 * Re(k_spp) * a * sin(theta0) + 40.

    Modes with m well beyond k_spp times the source-ring radius are deeply
    evanescent at the ring and contribute only to the renormalized real part.
    """
    target = 3.0 * scalars.k_spp.real * surface.a * math.sin(theta0) + 40.0
    if n_emitters is None:
        return int(math.floor(target)) + 1
    blocks = int(math.floor(target / n_emitters)) + 1
    return blocks * n_emitters


@dataclass(frozen=True)
class ModeBank:
    """Solved modes m = 0..m_max for one (surface, scalars, theta0, setup)."""

    surface: SpheroidSurface
    scalars: SppScalars
    theta0: float
    setup: SolverSetup
    ablation: AblationOptions
    solutions: tuple[ModeSolution, ...] = field(repr=False)

    @property
    def m_max(self) -> int:
        return len(self.solutions) - 1

    @property
    def at_source(self) -> np.ndarray:
        return np.array([sol.at_source for sol in self.solutions])


def solve_mode_bank(
    surface: SpheroidSurface,
    scalars: SppScalars,
    theta0: float,
    m_max: int,
    ablation: AblationOptions = NO_ABLATION,
    setup: SolverSetup | None = None,
) -> ModeBank:
    """Solve all azimuthal modes 0..m_max (negative m are mirror copies)."""
    if setup is None:
        setup = default_setup(surface, scalars, theta0)
    sols = []
    for m in range(m_max + 1):
        problem = ModeProblem(
            surface=surface,
            scalars=scalars,
            m=m,
            theta0=theta0,
            grid=setup.grid,
            pml=setup.pml,
            ablation=ablation,
        )
        sols.append(solve_mode(problem))
    return ModeBank(
        surface=surface,
        scalars=scalars,
        theta0=theta0,
        setup=setup,
        ablation=ablation,
        solutions=tuple(sols),
    )


@dataclass(frozen=True)
class GreensEvaluation:
    """One off-coincidence Green's function value with truncation metadata."""

    value: complex
    m_max: int
    tail_estimate: float


@dataclass(frozen=True)
class SelfSums:
    """Coincident-point mode sums under paired truncation.

    S sums g_m(theta0, theta0) over |m| <= m_max; S_k over the residue class
    m = k (mod N) within the same window.  The window is a multiple of N, so
    sum_k S_k == S exactly and the log-divergent real parts cancel in
    N*S_k - S.  Only Im(S), Im(S_k) and Re(N*S_k - S) are meaningful
    observables; Re(S) alone grows with the window.
    """

    S: complex
    S_k: np.ndarray
    n_emitters: int
    m_max: int


def _require_physical(setup: SolverSetup, theta: float, name: str) -> None:
    if not (0.0 <= theta <= setup.pml.theta_pml):
        raise ValueError(
            f"{name}={theta:.6f} rad must lie in the physical region "
            f"[0, theta_pml={setup.pml.theta_pml:.6f}]"
        )


def greens_series(
    surface: SpheroidSurface,
    scalars: SppScalars,
    theta0: float,
    theta: float,
    dphi: float,
    m_max: int | None = None,
    ablation: AblationOptions = NO_ABLATION,
    setup: SolverSetup | None = None,
    bank: ModeBank | None = None,
) -> GreensEvaluation:
    """Green's function G(theta, dphi; theta0) by the truncated mode sum.

    The value depends on the azimuths only through their difference (the
    operator is rotationally symmetric), which the signature enforces.
    Coincident evaluation is rejected: the real part has no finite limit
    there, use self_sums instead.
    """
    if abs(theta - theta0) < 1e-15 and abs(dphi) < 1e-15:
        raise ValueError("coincident evaluation diverges; use self_sums")
    if bank is None:
        if setup is None:
            setup = default_setup(surface, scalars, theta0)
        if m_max is None:
            m_max = default_m_max(surface, scalars, max(theta, theta0))
        bank = solve_mode_bank(surface, scalars, theta0, m_max, ablation, setup)
    setup = bank.setup
    _require_physical(setup, theta0, "theta0")
    _require_physical(setup, theta, "theta")

    g_here = np.array([sol.eval(theta) for sol in bank.solutions])
    m = np.arange(len(g_here))
    total = g_here[0] + 2.0 * np.sum(g_here[1:] * np.cos(m[1:] * dphi))
    return GreensEvaluation(
        value=complex(total / (2.0 * math.pi)),
        m_max=bank.m_max,
        tail_estimate=float(abs(g_here[-1]) / math.pi),
    )


def self_sums(
    surface: SpheroidSurface,
    scalars: SppScalars,
    theta0: float,
    n_emitters: int,
    m_max_blocks: int | None = None,
    ablation: AblationOptions = NO_ABLATION,
    setup: SolverSetup | None = None,
    bank: ModeBank | None = None,
) -> SelfSums:
    """Coincident-point sums S and S_k over a window of whole blocks of N."""
    if n_emitters < 1:
        raise ValueError("n_emitters must be >= 1")
    if bank is not None:
        m_max = bank.m_max
        if m_max % n_emitters != 0:
            raise ValueError(
                f"paired truncation requires m_max to be a multiple of N; "
                f"got m_max={m_max}, N={n_emitters}"
            )
    else:
        if m_max_blocks is None:
            m_max = default_m_max(surface, scalars, theta0, n_emitters)
        else:
            if m_max_blocks < 1:
                raise ValueError("m_max_blocks must be >= 1")
            m_max = m_max_blocks * n_emitters
        bank = solve_mode_bank(surface, scalars, theta0, m_max, ablation, setup)
    _require_physical(bank.setup, theta0, "theta0")

    g = bank.at_source
    m_max = bank.m_max
    total = complex(g[0] + 2.0 * np.sum(g[1:]))

    s_k = np.zeros(n_emitters, dtype=complex)
    for k in range(n_emitters):
        # All indices q with |k + q*N| <= m_max, accumulated in ascending |m|
        # for reproducible rounding.
        indices = sorted(
            abs(k + q * n_emitters)
            for q in range(-(m_max // n_emitters) - 1, m_max // n_emitters + 2)
            if abs(k + q * n_emitters) <= m_max
        )
        s_k[k] = sum(complex(g[i]) for i in indices)
    return SelfSums(S=total, S_k=s_k, n_emitters=n_emitters, m_max=m_max)
