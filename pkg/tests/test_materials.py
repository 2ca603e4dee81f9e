import math
import warnings

import numpy as np
import pytest

from curvedspp import (
    GOLDEN_RATIO_SQUARED,
    MaterialError,
    coupling_constant_C0,
    golden_ratio_deviation,
    load_material_table,
    lossless,
    make_material_pair,
    spp_scalars,
)
from curvedspp.materials import lookup_material


def test_valid_silver_pair_k0(silver_pair):
    assert silver_pair.k0 == pytest.approx(0.0104720, abs=5e-7)


def test_existence_condition_rejected():
    with pytest.raises(MaterialError, match="existence"):
        make_material_pair(1.0, -0.5 + 0.0j, 600.0)


def test_gold_pair_valid(gold_pair):
    assert gold_pair.eps_m == -24.15 + 1.51j


def test_bad_eps_d_and_gain_rejected():
    with pytest.raises(MaterialError):
        make_material_pair(-1.0, -16.12 + 0.44j, 600.0)
    with pytest.raises(MaterialError):
        make_material_pair(1.0, -16.12 - 0.1j, 600.0)
    with pytest.raises(MaterialError):
        make_material_pair(1.0, -16.12 + 0.44j, -600.0)


def test_reduced_wavelength_silver(silver_scalars):
    # quoted value 92.7 nm; direct evaluation of the complex dispersion
    # lands within the 1% band
    assert abs(silver_scalars.lambda_bar_spp - 92.7) / 92.7 < 0.01


def test_isotropic_coefficient_silver_lossless(silver_lossless_scalars):
    c_h = silver_lossless_scalars.C_H
    assert c_h.imag == 0.0
    assert abs(c_h.real - (-0.044)) / 0.044 < 0.02


def test_anisotropic_coefficient_vanishes_at_golden_point():
    pair = make_material_pair(1.0, complex(-GOLDEN_RATIO_SQUARED, 0.0), 600.0)
    sc = spp_scalars(pair)
    # machine-precision zero relative to the silver-scale coefficient
    assert abs(sc.C_sigma) < 1e-12 * 324.0


def test_golden_ratio_deviation_examples():
    assert golden_ratio_deviation(
        make_material_pair(1.0, -2.618034 + 0j, 500.0)
    ) == pytest.approx(0.0, abs=1e-6)
    assert golden_ratio_deviation(
        make_material_pair(1.0, -16.12 + 0j, 600.0)
    ) == pytest.approx(13.50, abs=1e-2)
    # scaling linearity: eps_d = 2 with eps_m = -2*Phi^2
    assert golden_ratio_deviation(
        make_material_pair(2.0, -5.236068 + 0j, 500.0)
    ) == pytest.approx(0.0, abs=1e-6)


def test_coupling_constant_ratios(silver_pair, gold_pair):
    _, ratio_ag = coupling_constant_C0(silver_pair)
    assert abs(ratio_ag - 0.016) / 0.016 < 0.10
    _, ratio_au = coupling_constant_C0(gold_pair)
    assert abs(ratio_au - 0.035) / 0.035 < 0.10


def test_coupling_constant_lossless_real(silver_lossless_pair):
    c0, ratio = coupling_constant_C0(silver_lossless_pair)
    assert c0.imag == 0.0
    assert ratio == 0.0


def _random_pairs(n, rng):
    pairs = []
    while len(pairs) < n:
        eps_d = rng.uniform(1.0, 5.0)
        re_m = -rng.uniform(1.6, 40.0) * eps_d
        im_m = rng.uniform(0.0, 0.08) * abs(re_m)
        lam0 = rng.uniform(400.0, 1600.0)
        pairs.append(make_material_pair(eps_d, complex(re_m, im_m), lam0))
    return pairs


def test_decay_rate_identities_random_pairs():
    rng = np.random.default_rng(20260810)
    for pair in _random_pairs(1000, rng):
        sc = spp_scalars(pair)
        k2 = sc.k_spp**2
        assert abs(sc.kappa_d * sc.kappa_m - k2) < 1e-12 * abs(k2)
        assert abs(sc.kappa_d**2 + pair.k0**2 * pair.eps_d - k2) < 1e-12 * abs(k2)
        assert abs(sc.kappa_m**2 + pair.k0**2 * pair.eps_m - k2) < 1e-12 * abs(k2)
        assert sc.k_spp.real > pair.k0 * math.sqrt(pair.eps_d)


def test_isotropic_coefficient_always_negative_lossless():
    rng = np.random.default_rng(7)
    for pair in _random_pairs(300, rng):
        sc = spp_scalars(lossless(pair))
        assert sc.C_H.real < 0.0
        assert sc.C_H.imag == 0.0


def test_anisotropic_sign_change_bisection():
    # C_sigma changes sign exactly at -Phi^2 * eps_d; bisect on its sign
    eps_d = 1.0

    def c_sigma(re_m):
        return spp_scalars(make_material_pair(eps_d, complex(re_m, 0.0), 600.0)).C_sigma.real

    lo, hi = -10.0 * eps_d, -eps_d - 0.01
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # hi endpoint is near resonance
        assert c_sigma(lo) * c_sigma(hi) < 0.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if c_sigma(mid) * c_sigma(hi) < 0.0:
                lo = mid
            else:
                hi = mid
    assert abs(0.5 * (lo + hi) - (-GOLDEN_RATIO_SQUARED * eps_d)) < 1e-9


def test_ohmic_damping_linear_and_consistent():
    eps_d, re_m, lam0 = 1.0, -16.12, 600.0
    sc1 = spp_scalars(make_material_pair(eps_d, complex(re_m, 1e-3), lam0))
    sc2 = spp_scalars(make_material_pair(eps_d, complex(re_m, 2e-3), lam0))
    assert sc2.K_loss == pytest.approx(2.0 * sc1.K_loss, rel=1e-12)
    assert spp_scalars(make_material_pair(eps_d, complex(re_m, 0.0), lam0)).K_loss == 0.0

    # central finite difference of Im(k_spp^2) w.r.t. Im(eps_m) against the
    # closed-form damping slope
    delta = 1e-5

    def im_k2(eps_pp):
        return spp_scalars(make_material_pair(eps_d, complex(re_m, eps_pp), lam0)).k_spp**2

    fd = (im_k2(1e-3 + delta).imag - im_k2(1e-3 - delta).imag) / (2.0 * delta)
    k0 = 2.0 * math.pi / lam0
    slope = k0**2 * eps_d**2 / (eps_d + re_m) ** 2
    assert abs(fd - slope) / slope < 1e-6


def test_near_resonance_warning():
    with pytest.warns(UserWarning, match="resonance"):
        sc = spp_scalars(make_material_pair(1.0, -1.3 + 0.0j, 600.0))
    assert sc.near_resonance
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not spp_scalars(make_material_pair(1.0, -16.12 + 0.0j, 600.0)).near_resonance


def test_lossless_scalars_all_real(silver_lossless_scalars):
    sc = silver_lossless_scalars
    for z in (sc.k_spp, sc.kappa_d, sc.kappa_m, sc.C_H, sc.C_sigma, sc.C0):
        assert z.imag == 0.0
    assert sc.K_loss == 0.0


def test_material_table_roundtrip(tmp_path):
    table_file = tmp_path / "eps.txt"
    table_file.write_text(
        "# permittivity table\n"
        "silver 600 -16.12 0.44   # visible\n"
        "\n"
        "gold 800 -24.15 1.51\n",
        encoding="utf-8",
    )
    table = load_material_table(table_file)
    assert table[("silver", 600.0)] == -16.12 + 0.44j
    assert lookup_material(table, "Gold", 800.0) == -24.15 + 1.51j
    with pytest.raises(MaterialError, match="no table entry"):
        lookup_material(table, "silver", 800.0)


def test_material_table_bad_line(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("silver 600 -16.12\n", encoding="utf-8")
    with pytest.raises(MaterialError, match="expected"):
        load_material_table(bad)
