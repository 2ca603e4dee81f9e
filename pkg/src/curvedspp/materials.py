"""Metal-dielectric material pairs and their closed-form surface-mode scalars.

Everything here is algebra on the two relative permittivities and the vacuum
wavelength: the bound transverse-magnetic surface-mode dispersion, the
transverse decay rates into both media, the two curvature-potential
coefficients (isotropic and anisotropic), the uniform Ohmic damping of the
lossy-metal split, and the dipole-coupling constant of the normal-normal
Green's-tensor factorization.

Units: lengths in nanometers, wavenumbers in nm^-1 throughout the package.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

# Phi^2 = Phi + 1, with Phi the golden ratio.  The anisotropic potential
# coefficient vanishes identically at eps_m = -Phi^2 * eps_d.
GOLDEN_RATIO_SQUARED = (3.0 + math.sqrt(5.0)) / 2.0

# |eps_m + eps_d| below this fraction of eps_d counts as near the surface-mode
# resonance, where the first-order-in-curvature expansion breaks down.
NEAR_RESONANCE_FRACTION = 0.5


class MaterialError(ValueError):
    """Permittivity pair cannot host a bound surface mode."""


def _sqrt_positive_real(z: complex) -> complex:
    """Principal square root reflected onto the Re >= 0 half plane."""
    w = cmath.sqrt(z)
    if w.real < 0.0 or (w.real == 0.0 and w.imag < 0.0):
        w = -w
    return w


@dataclass(frozen=True)
class MaterialPair:
    """A dielectric/metal permittivity pair at a fixed vacuum wavelength.

    eps_d is the (real, positive) dielectric permittivity, eps_m the complex
    metal permittivity with Re(eps_m) < -eps_d and Im(eps_m) >= 0, lambda0 the
    vacuum wavelength in nm.  Instances are immutable and thread-safe.
    """

    eps_d: float
    eps_m: complex
    lambda0: float

    @property
    def k0(self) -> float:
        """Vacuum wavenumber 2*pi/lambda0 in nm^-1."""
        return 2.0 * math.pi / self.lambda0


@dataclass(frozen=True)
class SppScalars:
    """Closed-form scalars of the bound surface mode for one material pair.

    All wavenumbers in nm^-1; C_sigma in nm (it multiplies a second-derivative
    operator of the traceless shape tensor, units nm^-3); K_loss in nm^-2.
    For a lossless pair every complex field has zero imaginary part.
    """

    pair: MaterialPair
    k_spp: complex          # in-plane surface-mode wavenumber
    n_e: complex            # effective index k_spp / k0
    kappa_d: complex        # transverse decay rate into the dielectric
    kappa_m: complex        # transverse decay rate into the metal
    lambda_bar_spp: float   # reduced wavelength 1 / Re(k_spp), nm
    C_H: complex            # isotropic curvature-potential coefficient, nm^-1
    C_sigma: complex        # anisotropic curvature-potential coefficient, nm
    K_loss: float           # uniform Ohmic damping of the lossy split, nm^-2
    C0: complex             # dipole-coupling constant, nm^-1
    k_spp_prime: float      # real part of the lossy-split wavenumber, nm^-1
    near_resonance: bool    # |eps_m + eps_d| small: perturbation unreliable


def make_material_pair(eps_d: float, eps_m: complex, lambda0: float) -> MaterialPair:
    """Validate and build a material pair.

    Rejects eps_d <= 0, lambda0 <= 0, gain media (Im(eps_m) < 0) and pairs
    violating the bound-mode existence condition Re(eps_m) < -eps_d.
    """
    eps_m = complex(eps_m)
    if lambda0 <= 0.0:
        raise MaterialError(f"lambda0 must be positive, got {lambda0}")
    if eps_d <= 0.0:
        raise MaterialError(f"eps_d must be positive, got {eps_d}")
    if eps_m.real >= -eps_d:
        raise MaterialError(
            "existence condition violated: need Re(eps_m) < -eps_d for a bound "
            f"surface mode, got Re(eps_m)={eps_m.real} with eps_d={eps_d}"
        )
    if eps_m.imag < 0.0:
        raise MaterialError(f"Im(eps_m) must be >= 0 (no gain), got {eps_m.imag}")
    return MaterialPair(eps_d=float(eps_d), eps_m=eps_m, lambda0=float(lambda0))


def lossless(pair: MaterialPair) -> MaterialPair:
    """The same pair with the metal loss discarded (eps_m -> Re(eps_m))."""
    return make_material_pair(pair.eps_d, complex(pair.eps_m.real, 0.0), pair.lambda0)


def spp_scalars(pair: MaterialPair) -> SppScalars:
    """Derive every closed-form surface-mode scalar for a validated pair.

    Square-root branches are chosen so that Re(k_spp) > 0 (forward
    propagation) and Re(sqrt(-(eps_d+eps_m))) > 0 (transverse decay).
    Near the surface-mode resonance (|Re(eps_m) + eps_d| < 0.5*eps_d) a
    diagnostic flag is set and a warning emitted; the values are still
    returned but the curvature coefficients diverge there.
    """
    ed, em, k0 = pair.eps_d, pair.eps_m, pair.k0

    near = abs(em.real + ed) < NEAR_RESONANCE_FRACTION * ed
    if near:
        warnings.warn(
            "permittivity pair is close to the surface-mode resonance "
            "(|Re(eps_m) + eps_d| < 0.5*eps_d); curvature coefficients diverge "
            "and the first-order treatment is unreliable",
            stacklevel=2,
        )

    n_e = _sqrt_positive_real(em * ed / (em + ed))
    k_spp = k0 * n_e
    root = _sqrt_positive_real(-(ed + em))

    # Closed forms kappa_d = k0*eps_d/root, kappa_m = -k0*eps_m/root keep the
    # identity kappa_d*kappa_m = k_spp^2 exact in floating point.
    kappa_d = k0 * ed / root
    kappa_m = -k0 * em / root

    c_h = k0 * (ed * ed + ed * em + em * em) / ((ed + em) * root)
    c_sigma = -(ed * ed + 3.0 * ed * em + em * em) / (k0 * ed * em * root)

    # First-order lossy split k_spp^2 ~ (k'_spp)^2 + i*K_loss.
    k_loss = k0 * k0 * ed * ed * em.imag / (ed + em.real) ** 2
    k_spp_prime = k0 * math.sqrt(ed * em.real / (ed + em.real))

    c0, _ = coupling_constant_C0(pair)

    return SppScalars(
        pair=pair,
        k_spp=k_spp,
        n_e=n_e,
        kappa_d=kappa_d,
        kappa_m=kappa_m,
        lambda_bar_spp=1.0 / k_spp.real,
        C_H=c_h,
        C_sigma=c_sigma,
        K_loss=k_loss,
        C0=c0,
        k_spp_prime=k_spp_prime,
        near_resonance=near,
    )


def golden_ratio_deviation(pair: MaterialPair) -> float:
    """Distance of Re(eps_m) from the golden-ratio point, in units of eps_d.

    Zero exactly when the anisotropic potential coefficient vanishes at
    lossless level (eps_m = -Phi^2 * eps_d).
    """
    return abs(pair.eps_m.real + GOLDEN_RATIO_SQUARED * pair.eps_d) / pair.eps_d


def coupling_constant_C0(pair: MaterialPair) -> tuple[complex, float]:
    """Dipole-coupling constant C0 and its first-order Im/Re ratio.

    C0 is evaluated at the full complex eps_m.  The returned ratio is the
    first-order-in-Im(eps_m) expansion
    eps_m'' * (3/eps_m' - 5/(2(eps_m'+eps_d)) - 1/(eps_m'-eps_d)),
    which is exactly zero for lossless input.
    """
    ed, em, k0 = pair.eps_d, pair.eps_m, pair.k0
    root = _sqrt_positive_real(-(ed + em))
    c0 = -2.0 * k0 * em**3 * ed * root / ((em - ed) * (em + ed) ** 3)
    ep, epp = em.real, em.imag
    ratio = epp * (3.0 / ep - 5.0 / (2.0 * (ep + ed)) - 1.0 / (ep - ed))
    return c0, ratio


def load_material_table(path) -> dict[tuple[str, float], complex]:
    """Parse a plain-text permittivity table.

    One record per line: ``name lambda0_nm re_eps im_eps``; ``#`` starts a
    comment; blank lines ignored.  Keys are (lowercased name, lambda0).
    """
    table: dict[tuple[str, float], complex] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise MaterialError(
                    f"{path}:{lineno}: expected 'name lambda0_nm re_eps im_eps', got {raw!r}"
                )
            name = parts[0].lower()
            try:
                lam0, re_eps, im_eps = (float(p) for p in parts[1:])
            except ValueError as exc:
                raise MaterialError(f"{path}:{lineno}: bad number in {raw!r}") from exc
            table[(name, lam0)] = complex(re_eps, im_eps)
    return table


def lookup_material(
    table: dict[tuple[str, float], complex], name: str, lambda0: float
) -> complex:
    """Find eps_m for (name, lambda0) in a loaded table (1e-9 nm tolerance)."""
    name = name.lower()
    for (key_name, key_lam), eps in table.items():
        if key_name == name and abs(key_lam - lambda0) < 1e-9:
            return eps
    raise MaterialError(f"no table entry for material {name!r} at lambda0={lambda0} nm")
