"""Command-line front end: material reports, dispersion formulas, Green's
function traces, and the two figure-level scans (sphere curvature, spheroid
aspect ratio), all emitted as CSV/JSON.

Determinism contract: identical configuration produces byte-identical CSV.
Numbers are printed with 12 significant digits, summation orders are fixed,
and every CSV carries the tool version plus the fully resolved numerical
configuration in '#' header lines (plus a sidecar JSON next to --out files).
Scan points are dispatched to a thread pool; rows are written in scan order
regardless of completion order.

Exit codes: 0 success, 2 validation error, 3 solver failure on all points.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    cylinder_ktheta,
    cylinder_kz,
    cylinder_momentum_ellipse,
    cylinder_paraxial_potential,
    make_cylinder_case,
    sphere_keff,
    sphere_keff_unexpanded,
)
from .geometry import AblationOptions, SpheroidSurface
from .greens import greens_series
from .materials import (
    MaterialError,
    golden_ratio_deviation,
    load_material_table,
    lookup_material,
    make_material_pair,
    spp_scalars,
)
from .radial_solver import SolverError, default_setup
from .radiance import collective_spectrum, make_ring, planar_spectrum

SCAN_KINDS = ("sphere-curvature", "spheroid-aspect")

# Studied parameter ranges; scans beyond them only warn.
MAX_STUDIED_CURVATURE = 0.08
STUDIED_ASPECT_RANGE = (0.05, 2.0)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _parse_complex(text: str) -> complex:
    """Parse a complex number accepting both 'i' and 'j' suffixes."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise MaterialError(f"cannot parse complex permittivity {text!r}") from exc


def _resolve_pair(args):
    """Material pair from --eps-m or from a --material-table lookup."""
    if args.material is not None:
        if args.material_table is None:
            raise MaterialError("--material requires --material-table")
        table = load_material_table(args.material_table)
        eps_m = lookup_material(table, args.material, args.lambda0)
    elif args.eps_m is not None:
        eps_m = _parse_complex(args.eps_m)
    else:
        raise MaterialError("one of --eps-m or --material is required")
    return make_material_pair(args.eps_d, eps_m, args.lambda0)


# ----------------------------------------------------------------------------
# materials / dispersion reports


def _scalars_payload(pair, sc) -> dict:
    dev = golden_ratio_deviation(pair)
    return {
        "eps_d": pair.eps_d,
        "eps_m": [pair.eps_m.real, pair.eps_m.imag],
        "lambda0_nm": pair.lambda0,
        "k0_inv_nm": pair.k0,
        "k_spp_inv_nm": [sc.k_spp.real, sc.k_spp.imag],
        "n_e": [sc.n_e.real, sc.n_e.imag],
        "kappa_d_inv_nm": [sc.kappa_d.real, sc.kappa_d.imag],
        "kappa_m_inv_nm": [sc.kappa_m.real, sc.kappa_m.imag],
        "lambda_bar_spp_nm": sc.lambda_bar_spp,
        "C_H_inv_nm": [sc.C_H.real, sc.C_H.imag],
        "C_sigma_nm": [sc.C_sigma.real, sc.C_sigma.imag],
        "K_loss_inv_nm2": sc.K_loss,
        "C0_inv_nm": [sc.C0.real, sc.C0.imag],
        "im_re_ratio_C0": sc.C0.imag / sc.C0.real,
        "golden_ratio_deviation": dev,
        "anisotropic_potential_vanishes": dev < 1e-9,
        "near_resonance": sc.near_resonance,
    }


def _cmd_materials(args) -> int:
    pair = _resolve_pair(args)
    sc = spp_scalars(pair)
    payload = _scalars_payload(pair, sc)
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
        return 0
    print(f"material pair: eps_d={_fmt(pair.eps_d)}, eps_m={_fmt_complex(pair.eps_m)}, "
          f"lambda0={_fmt(pair.lambda0)} nm")
    print(f"  k0            = {_fmt(pair.k0)} nm^-1")
    print(f"  k_spp         = {_fmt_complex(sc.k_spp)} nm^-1")
    print(f"  n_e           = {_fmt_complex(sc.n_e)}")
    print(f"  lambda_bar    = {_fmt(sc.lambda_bar_spp)} nm")
    print(f"  kappa_d       = {_fmt_complex(sc.kappa_d)} nm^-1")
    print(f"  kappa_m       = {_fmt_complex(sc.kappa_m)} nm^-1")
    print(f"  C_H           = {_fmt_complex(sc.C_H)} nm^-1")
    print(f"  C_sigma       = {_fmt_complex(sc.C_sigma)} nm")
    print(f"  K_loss        = {_fmt(sc.K_loss)} nm^-2")
    print(f"  C0            = {_fmt_complex(sc.C0)} nm^-1")
    print(f"  Im(C0)/Re(C0) = {_fmt(payload['im_re_ratio_C0'])}")
    print(f"  golden-ratio deviation = {_fmt(payload['golden_ratio_deviation'])}")
    if payload["anisotropic_potential_vanishes"]:
        print("  note: anisotropic potential vanishes (golden-ratio permittivity point)")
    if sc.near_resonance:
        print("  warning: near the surface-mode resonance; curvature coefficients unreliable")
    return 0


def _cmd_dispersion(args) -> int:
    pair = _resolve_pair(args)
    sc = spp_scalars(pair)
    radius_nm = args.radius * sc.lambda_bar_spp
    case = make_cylinder_case(sc, radius_nm, args.s_sign)
    keff = sphere_keff(sc, radius_nm)
    keff_full = sphere_keff_unexpanded(sc, radius_nm)
    coef_kz2, coef_kt2, rhs = cylinder_momentum_ellipse(sc, radius_nm, args.s_sign)
    kz = cylinder_kz(sc, radius_nm, args.m, args.s_sign)
    kth = cylinder_ktheta(sc, radius_nm, args.s_sign)
    payload = {
        "radius_nm": radius_nm,
        "radius_lambda_bar": args.radius,
        "s_sign": args.s_sign,
        "m": args.m,
        "V_param": case.V_param,
        "sphere_keff_inv_nm": [keff.real, keff.imag],
        "sphere_keff_unexpanded_inv_nm": [keff_full.real, keff_full.imag],
        "cylinder_paraxial_potential_inv_nm": cylinder_paraxial_potential(sc, radius_nm),
        "ellipse_coef_kz2": [coef_kz2.real, coef_kz2.imag],
        "ellipse_coef_ktheta2": [coef_kt2.real, coef_kt2.imag],
        "ellipse_rhs_inv_nm2": [rhs.real, rhs.imag],
        "cylinder_kz_inv_nm": [kz.real, kz.imag],
        "cylinder_kz_evanescent": kz.imag != 0.0,
        "cylinder_ktheta_inv_nm": [kth.real, kth.imag],
    }
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
        return 0
    print(f"radius = {_fmt(radius_nm)} nm ({_fmt(args.radius)} lambda_bar), "
          f"s = {args.s_sign:+d}, V = {_fmt(case.V_param)}")
    print(f"  sphere k_eff (first order) = {_fmt_complex(keff)} nm^-1")
    print(f"  sphere k_eff (unexpanded)  = {_fmt_complex(keff_full)} nm^-1")
    print(f"  cylinder paraxial potential = {_fmt(payload['cylinder_paraxial_potential_inv_nm'])} nm^-1")
    print(f"  momentum ellipse: ({_fmt_complex(coef_kz2)}) kz^2 + "
          f"({_fmt_complex(coef_kt2)}) ktheta^2 = {_fmt_complex(rhs)}")
    flag = " (evanescent)" if kz.imag != 0.0 else ""
    print(f"  cylinder k_z(m={args.m}) = {_fmt_complex(kz)} nm^-1{flag}")
    print(f"  cylinder k_theta = {_fmt_complex(kth)} nm^-1")
    return 0


# ----------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class ScanConfig:
    """Fully resolved configuration of one figure-level scan."""

    kind: str
    values: tuple[float, ...]
    eps_d: float
    eps_m: complex
    lambda0: float
    n_emitters: int = 9
    spacing_lbar: float = 3.0
    a_lbar: float = 62.5
    ablate_vh: bool = False
    ablate_vsigma: bool = False
    m_max_blocks: int | None = None
    grid_density: float = 20.0
    pml_sigma_max: float = 2.5
    pml_width_wavelengths: float = 2.0
    workers: int | None = None

    def __post_init__(self):
        if self.kind not in SCAN_KINDS:
            raise ValueError(f"scan kind must be one of {SCAN_KINDS}, got {self.kind!r}")
        if len(self.values) < 2:
            raise ValueError("a scan needs at least 2 points")

    def payload(self) -> dict:
        d = asdict(self)
        d["eps_m"] = [self.eps_m.real, self.eps_m.imag]
        d["values"] = list(self.values)
        d["version"] = __version__
        return d


@dataclass(frozen=True)
class ScanRow:
    scan_param: float
    k_index: int
    gamma_norm: float
    delta_norm: float
    sum_rule_residual: float
    m_max: int
    error: str = ""


def _warn_outside_studied_range(config: ScanConfig) -> None:
    if config.kind == "sphere-curvature":
        worst = max(abs(v) for v in config.values)
        if worst > MAX_STUDIED_CURVATURE + 1e-12:
            warnings.warn(
                f"|H|*lambda_bar up to {worst:.3g} exceeds the studied range "
                f"(<= {MAX_STUDIED_CURVATURE}); first-order curvature results "
                "degrade beyond it",
                stacklevel=2,
            )
    else:
        lo, hi = min(config.values), max(config.values)
        if lo < STUDIED_ASPECT_RANGE[0] - 1e-12 or hi > STUDIED_ASPECT_RANGE[1] + 1e-12:
            warnings.warn(
                f"aspect ratios [{lo:.3g}, {hi:.3g}] extend beyond the studied "
                f"range {STUDIED_ASPECT_RANGE}",
                stacklevel=2,
            )


def _scan_point(config: ScanConfig, scalars, value: float):
    """Collective spectrum at one scan point; may raise for bad geometry."""
    lam_bar = scalars.lambda_bar_spp
    spacing_nm = config.spacing_lbar * lam_bar
    ablation = AblationOptions(config.ablate_vh, config.ablate_vsigma)

    if config.kind == "sphere-curvature":
        if abs(value) < 1e-12:
            # The zero-curvature point is the planar analytic limit.
            return planar_spectrum(scalars, config.n_emitters, spacing_nm)
        radius_nm = lam_bar / abs(value)
        sign = +1 if value < 0.0 else -1
        surface = SpheroidSurface(a=radius_nm, c=radius_nm, s=sign)
    else:
        a_nm = config.a_lbar * lam_bar
        if value <= 0.0:
            raise ValueError(f"aspect ratio must be positive, got {value}")
        surface = SpheroidSurface(a=a_nm, c=value * a_nm, s=+1)

    ring = make_ring(surface, config.n_emitters, spacing_nm)
    setup = default_setup(
        surface,
        scalars,
        ring.theta0,
        grid_density=config.grid_density,
        pml_sigma_max=config.pml_sigma_max,
        pml_width_wavelengths=config.pml_width_wavelengths,
    )
    return collective_spectrum(
        surface, scalars, ring, m_max_blocks=config.m_max_blocks,
        ablation=ablation, setup=setup,
    )


def scan_rows(config: ScanConfig) -> list[ScanRow]:
    """Run the scan over a worker pool; rows come back in scan order.

    Failures at single points become NaN rows carrying the error message; the
    remaining points still run.
    """
    _warn_outside_studied_range(config)
    pair = make_material_pair(config.eps_d, config.eps_m, config.lambda0)
    scalars = spp_scalars(pair)

    def one(value: float):
        try:
            return _scan_point(config, scalars, value), ""
        except (ValueError, SolverError, MaterialError) as exc:
            return None, str(exc).replace("\n", " ").replace(",", ";")

    workers = config.workers or min(8, len(config.values))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(one, config.values))

    rows: list[ScanRow] = []
    for value, (spectrum, err) in zip(config.values, outcomes):
        if spectrum is None:
            for k in range(config.n_emitters):
                rows.append(ScanRow(value, k, math.nan, math.nan, math.nan, 0, err))
        else:
            residual = spectrum.sum_rule_residual
            for k in range(config.n_emitters):
                rows.append(
                    ScanRow(
                        value,
                        k,
                        float(spectrum.gamma_norm[k]),
                        float(spectrum.delta_norm[k]),
                        residual,
                        spectrum.m_max,
                    )
                )
    return rows


def write_scan_csv(rows, config: ScanConfig, stream) -> None:
    stream.write(f"# curvedspp {__version__}\n")
    stream.write(f"# config: {json.dumps(config.payload(), sort_keys=True)}\n")
    stream.write("scan_param,k_index,gamma_norm,delta_norm,sum_rule_residual,m_max,error\n")
    for r in rows:
        stream.write(
            f"{_fmt(r.scan_param)},{r.k_index},{_fmt(r.gamma_norm)},"
            f"{_fmt(r.delta_norm)},{_fmt(r.sum_rule_residual)},{r.m_max},{r.error}\n"
        )


def _cmd_scan(args) -> int:
    pair = _resolve_pair(args)  # validation happens before any solving
    values = tuple(np.linspace(args.scan_min, args.scan_max, args.steps))
    config = ScanConfig(
        kind=args.kind,
        values=values,
        eps_d=pair.eps_d,
        eps_m=pair.eps_m,
        lambda0=pair.lambda0,
        n_emitters=args.N,
        spacing_lbar=args.spacing,
        a_lbar=args.a,
        ablate_vh=args.ablate_vh,
        ablate_vsigma=args.ablate_vsigma,
        m_max_blocks=args.m_max_blocks,
        grid_density=args.grid_density,
        pml_sigma_max=args.pml_sigma_max,
        pml_width_wavelengths=args.pml_width,
        workers=args.workers,
    )
    rows = scan_rows(config)
    if args.out:
        out = Path(args.out)
        with out.open("w", encoding="utf-8", newline="\n") as fh:
            write_scan_csv(rows, config, fh)
        sidecar = out.with_suffix(out.suffix + ".json")
        sidecar.write_text(
            json.dumps(config.payload(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    else:
        write_scan_csv(rows, config, sys.stdout)
    if all(r.error for r in rows):
        print("error: all scan points failed", file=sys.stderr)
        return 3
    return 0


# ----------------------------------------------------------------------------
# Green's function trace


def _cmd_green(args) -> int:
    pair = _resolve_pair(args)
    sc = spp_scalars(pair)
    lam_bar = sc.lambda_bar_spp
    surface = SpheroidSurface(a=args.a * lam_bar, c=args.c * lam_bar, s=args.s_sign)
    ablation = AblationOptions(args.ablate_vh, args.ablate_vsigma)
    thetas = np.linspace(args.scan_min, args.scan_max, args.steps)
    theta_max = None
    if args.theta_max is not None:
        theta_max = args.theta_max
    setup = default_setup(
        surface,
        sc,
        args.theta0,
        grid_density=args.grid_density,
        pml_sigma_max=args.pml_sigma_max,
        pml_width_wavelengths=args.pml_width,
        theta_max=theta_max,
    )
    from .greens import default_m_max, solve_mode_bank

    m_max = args.m_max
    if m_max is None:
        m_max = default_m_max(surface, sc, float(max(thetas.max(), args.theta0)))
    bank = solve_mode_bank(surface, sc, args.theta0, m_max, ablation, setup)

    config = {
        "a_lbar": args.a, "c_lbar": args.c, "s_sign": args.s_sign,
        "theta0": args.theta0, "dphi": args.dphi,
        "theta_min": args.scan_min, "theta_max_path": args.scan_max,
        "steps": args.steps, "m_max": m_max,
        "grid_density": args.grid_density, "pml_sigma_max": args.pml_sigma_max,
        "pml_width_wavelengths": args.pml_width,
        "eps_d": pair.eps_d, "eps_m": [pair.eps_m.real, pair.eps_m.imag],
        "lambda0": pair.lambda0, "version": __version__,
        "ablate_vh": args.ablate_vh, "ablate_vsigma": args.ablate_vsigma,
    }
    lines = [f"# curvedspp {__version__}",
             f"# config: {json.dumps(config, sort_keys=True)}",
             "theta,dphi,re_G,im_G,tail_estimate"]
    for theta in thetas:
        ev = greens_series(surface, sc, args.theta0, float(theta), args.dphi, bank=bank)
        lines.append(
            f"{_fmt(float(theta))},{_fmt(args.dphi)},{_fmt(ev.value.real)},"
            f"{_fmt(ev.value.imag)},{_fmt(ev.tail_estimate)}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# ----------------------------------------------------------------------------
# argument parsing


def _add_material_args(parser) -> None:
    parser.add_argument("--eps-d", type=float, default=1.0, help="dielectric permittivity")
    parser.add_argument("--eps-m", type=str, default=None,
                        help="complex metal permittivity, e.g. '-16.12+0.44i'")
    parser.add_argument("--lambda0", type=float, default=600.0, help="vacuum wavelength (nm)")
    parser.add_argument("--material", type=str, default=None,
                        help="material name to look up in --material-table")
    parser.add_argument("--material-table", type=str, default=None,
                        help="plain-text permittivity table: 'name lambda0 re im'")


def _add_numerics_args(parser) -> None:
    parser.add_argument("--m-max-blocks", type=int, default=None,
                        help="azimuthal truncation in blocks of N (default: auto)")
    parser.add_argument("--grid-density", type=float, default=20.0,
                        help="grid points per mode wavelength")
    parser.add_argument("--pml-sigma-max", type=float, default=2.5,
                        help="absorber strength")
    parser.add_argument("--pml-width", type=float, default=2.0,
                        help="absorber width in mode wavelengths")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedspp",
        description="Surface modes on curved metal-dielectric interfaces: "
                    "dispersion scalars, Green's functions and collective radiance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("materials", help="derived material scalars")
    _add_material_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_materials)

    p = sub.add_parser("dispersion", help="closed-form sphere/cylinder dispersion")
    _add_material_args(p)
    p.add_argument("--radius", type=float, default=12.5,
                   help="body radius in units of lambda_bar")
    p.add_argument("--m", type=int, default=0, help="azimuthal index for k_z(m)")
    p.add_argument("--s-sign", type=int, default=+1, choices=(-1, +1),
                   help="+1 convex metal body, -1 concave")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("green", help="Green's function along a polar-angle path")
    _add_material_args(p)
    _add_numerics_args(p)
    p.add_argument("--a", type=float, default=62.5, help="equatorial semi-axis (lambda_bar)")
    p.add_argument("--c", type=float, default=62.5, help="polar semi-axis (lambda_bar)")
    p.add_argument("--s-sign", type=int, default=+1, choices=(-1, +1))
    p.add_argument("--theta0", type=float, required=True, help="source polar angle (rad)")
    p.add_argument("--dphi", type=float, default=0.0, help="azimuth separation (rad)")
    p.add_argument("--scan-min", type=float, required=True, help="first path angle (rad)")
    p.add_argument("--scan-max", type=float, required=True, help="last path angle (rad)")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--theta-max", type=float, default=None, dest="theta_max",
                   help="solver domain end (rad; default: auto)")
    p.add_argument("--ablate-vh", action="store_true")
    p.add_argument("--ablate-vsigma", action="store_true")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_green)

    p = sub.add_parser("scan", help="collective-spectrum scan to CSV")
    p.add_argument("kind", choices=SCAN_KINDS)
    _add_material_args(p)
    _add_numerics_args(p)
    p.add_argument("--N", type=int, default=9, help="number of emitters")
    p.add_argument("--spacing", type=float, default=3.0,
                   help="nearest-neighbor spacing (lambda_bar)")
    p.add_argument("--a", type=float, default=62.5,
                   help="equatorial semi-axis for spheroid-aspect (lambda_bar)")
    p.add_argument("--scan-min", type=float, required=True)
    p.add_argument("--scan-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--ablate-vh", action="store_true")
    p.add_argument("--ablate-vsigma", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MaterialError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
