"""Bump construction, the modulated families, and their certification."""

import math

import numpy as np
import pytest

from rchlab.errors import FrequencyOverflowError, InvalidParameterError
from rchlab.experiments import fit_line
from rchlab.initial_data import (build_family, build_psi, builtin_profile,
                                 certification_tables, check_low_product,
                                 make_v0n, make_w0n, max_feasible_n,
                                 modulation_frequency)
from rchlab.littlewood_paley import (build_filter_bank, dyadic_block, lp_norm,
                                     smooth_plateau)
from rchlab.spectral import Field, PeriodicGrid, ddx, mode_amplitudes

GRID64 = PeriodicGrid(64.0 * np.pi, 2**14)
BUMP = build_psi(GRID64)


def test_psi_transform_is_the_plateau():
    amp = mode_amplitudes(BUMP.field)
    signs = np.where(np.arange(len(amp)) % 2 == 0, 1.0, -1.0)
    prof = amp * GRID64.length * signs
    want = smooth_plateau(GRID64.k, 0.25, 0.5)
    assert np.max(np.abs(prof.imag)) <= 1e-12
    assert np.max(np.abs(prof.real - want)) <= 1e-12
    # plateau hits the endpoints exactly
    assert prof.real[GRID64.k <= 0.25].min() == pytest.approx(1.0, abs=1e-13)
    assert np.all(np.abs(prof.real[GRID64.k >= 0.5]) <= 1e-13)


def test_psi_even_with_central_peak():
    v = BUMP.field.values
    mirrored = np.roll(v[::-1], 1)  # x -> -x on a lattice starting at -L/2
    assert np.max(np.abs(v - mirrored)) <= 1e-13
    assert BUMP.peak == pytest.approx(np.max(v))
    assert BUMP.peak > 0.0


def test_low_family_halves_bitwise():
    for n in (3, 5, 8):
        a = make_v0n(BUMP, n + 1)
        b = make_v0n(BUMP, n)
        assert np.array_equal(a.values, 0.5 * b.values)


def test_high_family_spectrum_localized():
    for n in (5, 6):
        w = make_w0n(BUMP, n, 2.0)
        k_n, _ = modulation_frequency(GRID64, n)
        amp = np.abs(mode_amplitudes(w))
        scale = np.max(amp)
        outside = np.abs(GRID64.k - k_n) > 0.5 + 1e-9
        assert np.max(amp[outside]) <= 1e-12 * scale


def test_high_family_occupies_one_dyadic_block():
    bank = build_filter_bank(GRID64)
    for n in (5, 6):
        w = make_w0n(BUMP, n, 2.0)
        total = lp_norm(w, 2.0)
        for j in range(-1, bank.j_max + 1):
            piece = lp_norm(dyadic_block(bank, w, j), 2.0)
            if j == n:
                assert piece == pytest.approx(total, rel=1e-12)
            else:
                assert piece <= 1e-12 * total


def test_modulation_snap():
    dk = 2.0 * np.pi / GRID64.length
    for n in (4, 5, 6):
        k_n, offset = modulation_frequency(GRID64, n)
        assert abs(k_n / dk - round(k_n / dk)) <= 1e-9
        raw = (33.0 / 24.0) * 2.0**n
        assert abs(k_n - raw) <= 0.5 * dk + 1e-12
        assert offset == pytest.approx(abs(k_n - raw) / 2.0**n)


def test_overflow_reports_feasible_range():
    grid = PeriodicGrid(2.0 * np.pi, 256)
    assert max_feasible_n(grid) == 5
    modulation_frequency(grid, 5)  # fits
    with pytest.raises(FrequencyOverflowError) as info:
        modulation_frequency(grid, 6)
    assert info.value.max_feasible_n == 5
    with pytest.raises(InvalidParameterError):
        modulation_frequency(grid, -1)


def test_family_transport_seed():
    fam = build_family(BUMP, 5, 2.0)
    assert np.array_equal(fam.u0n.values, fam.w0n.values + fam.v0n.values)
    # bandwidth of u d_x u stays under the dealias cap here, so the spectral
    # product must agree with the pointwise one
    want = -fam.u0n.values * ddx(fam.u0n).values
    scale = np.max(np.abs(want))
    assert np.max(np.abs(fam.z0n.values - want)) <= 1e-12 * scale
    assert fam.carrier == pytest.approx((33.0 / 24.0) * 32.0, abs=0.5)


def test_certification_slopes():
    grid = PeriodicGrid(64.0 * np.pi, 2**16)
    bump = build_psi(grid)
    s = 2.0
    ns = range(5, 9)
    tables = {t.quantity: t for t in certification_tables(bump, ns, s, 2.0)}
    x = np.asarray(list(ns), dtype=float)

    expected = {
        "w0n_besov_minus": -1.0,
        "w0n_besov_center": 0.0,
        "w0n_besov_plus": 1.0,
        "dx_w0n_lp": 1.0 - s,
        "v0n_besov": -1.0,
    }
    for quantity, slope in expected.items():
        fit = fit_line(x, np.log2(tables[quantity].values))
        assert abs(fit.slope - slope) <= 0.05, (quantity, fit.slope)

    # the modulation-stability constant is n-independent at p = 2
    psi2 = tables["psi2_cos_norm"].values
    assert np.max(psi2) - np.min(psi2) <= 1e-12 * np.max(psi2)

    for quantity in ("psi2_cos_norm", "low_product_norm"):
        table = tables[quantity]
        assert table.empirical_min > 0.0
        top = table.values[len(table.values) // 2:]
        spread = (np.max(top) - np.min(top)) / np.max(top)
        assert spread <= 0.10, (quantity, spread)


def test_low_product_needs_resolvable_block():
    with pytest.raises(InvalidParameterError):
        check_low_product(BUMP, [7], 2.0, 2.0)


def test_bump_needs_fine_frequency_lattice():
    with pytest.raises(InvalidParameterError):
        build_psi(PeriodicGrid(32.0 * np.pi, 2**10))


def test_builtin_profiles():
    zero = builtin_profile("zero", GRID64)
    assert not np.any(zero.values)
    smoke = builtin_profile("smoke", GRID64)
    mid = GRID64.n_points // 2
    assert smoke.values[mid] == pytest.approx(0.25, abs=1e-12)
    assert np.max(np.abs(smoke.values)) == pytest.approx(0.25, rel=1e-6)
    psi = builtin_profile("psi", GRID64)
    assert np.array_equal(psi.values, BUMP.field.values)
    with pytest.raises(InvalidParameterError):
        builtin_profile("mystery", GRID64)
