"""Grid, multipliers, exact products, serialization."""

import math

import numpy as np
import pytest

from rchlab.errors import GridMismatchError, InvalidParameterError
from rchlab.spectral import (Field, PeriodicGrid, ddx, dealias,
                             field_from_binary, field_from_csv,
                             field_to_binary, field_to_csv, grad_p_conv,
                             helmholtz_inverse, mode_amplitudes, product,
                             synthesize)

GRID = PeriodicGrid(2.0 * np.pi, 256)


def trig(fn):
    return Field(GRID, fn(GRID.x))


def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        PeriodicGrid(2.0 * np.pi, 100)  # not a power of two
    with pytest.raises(InvalidParameterError):
        PeriodicGrid(2.0 * np.pi, 8)  # too small
    with pytest.raises(InvalidParameterError):
        PeriodicGrid(-1.0, 256)


def test_grid_layout():
    g = PeriodicGrid(2.0 * np.pi, 256)
    assert g.x[0] == -np.pi
    assert g.spacing == pytest.approx(2.0 * np.pi / 256)
    assert g.k_nyquist == 128.0
    assert g.dealias_cap == pytest.approx(2.0 / 3.0 * 128.0)
    assert g == PeriodicGrid(2.0 * np.pi, 256)
    assert hash(g) == hash(PeriodicGrid(2.0 * np.pi, 256))


def test_field_shape_checked():
    with pytest.raises(GridMismatchError):
        Field(GRID, np.zeros(100))


def test_ddx_exact_on_modes():
    f = trig(lambda x: np.sin(3.0 * x))
    expect = 3.0 * np.cos(3.0 * GRID.x)
    assert np.max(np.abs(ddx(f).values - expect)) <= 1e-12


def test_helmholtz_inverse_multiplier():
    # (1 - dxx)^{-1} cos(2x) = cos(2x) / 5
    f = trig(lambda x: np.cos(2.0 * x))
    expect = np.cos(2.0 * GRID.x) / 5.0
    assert np.max(np.abs(helmholtz_inverse(f).values - expect)) <= 1e-13


def test_grad_p_matches_composition():
    rng = np.random.default_rng(7)
    spec = np.zeros(129, dtype=complex)
    spec[1:40] = rng.normal(size=39) + 1j * rng.normal(size=39)
    f = Field(GRID, np.fft.irfft(spec, 256))
    a = grad_p_conv(f).values
    b = ddx(helmholtz_inverse(f)).values
    assert np.max(np.abs(a - b)) <= 1e-13


def test_kernel_self_adjoint():
    # lattice inner product <p*f, g> = <f, p*g>
    rng = np.random.default_rng(3)
    f = Field(GRID, rng.normal(size=256))
    g = Field(GRID, rng.normal(size=256))
    h = GRID.spacing
    lhs = h * np.dot(helmholtz_inverse(f).values, g.values)
    rhs = h * np.dot(f.values, helmholtz_inverse(g).values)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_parseval():
    rng = np.random.default_rng(11)
    f = Field(GRID, rng.normal(size=256))
    c = mode_amplitudes(f)
    weights = np.full(len(c), 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    spectral = GRID.length * np.sum(weights * np.abs(c) ** 2)
    physical = GRID.spacing * np.sum(f.values**2)
    assert spectral == pytest.approx(physical, rel=1e-12)


def test_product_exact_trig():
    f = trig(np.sin)
    g = trig(np.cos)
    expect = 0.5 * np.sin(2.0 * GRID.x)
    assert np.max(np.abs(product(f, g).values - expect)) <= 1e-14


def test_product_matches_pointwise_when_resolved():
    # band-limited inputs whose product still fits: no aliasing either way
    f = trig(lambda x: np.cos(5.0 * x))
    g = trig(lambda x: np.sin(7.0 * x))
    exact = f.values * g.values
    assert np.max(np.abs(product(f, g).values - exact)) <= 1e-13


def test_product_dealias_zeroes_tail():
    # 60 is under the cap (85.3) but 120 is over: cos^2 = 1/2 + cos(120x)/2
    # keeps only its mean after the output mask
    f = trig(lambda x: np.cos(60.0 * x))
    out = product(f, f, dealias=True)
    spec = mode_amplitudes(out)
    assert np.max(np.abs(spec[GRID.k > GRID.dealias_cap])) <= 1e-16
    assert out.values.mean() == pytest.approx(0.5, abs=1e-12)
    assert np.max(np.abs(out.values - 0.5)) <= 1e-12


def test_product_unresolved_differs_from_naive():
    # 170 + 170 = 340 > 256 wraps on the plain grid; padded product truncates
    f = trig(lambda x: np.cos(100.0 * x))
    naive = np.fft.rfft(f.values * f.values)
    padded = np.fft.rfft(product(f, f).values)
    assert np.max(np.abs(naive - padded)) > 1.0


def test_dealias_idempotent():
    # idempotent up to transform roundoff
    rng = np.random.default_rng(5)
    f = Field(GRID, rng.normal(size=256))
    once = dealias(f)
    twice = dealias(once)
    assert np.max(np.abs(once.values - twice.values)) <= 1e-14


def test_synthesize_places_modes():
    L = 2.0 * np.pi
    g = PeriodicGrid(L, 256)

    def transform(k):
        return np.where(np.isclose(k, 3.0), 0.5 * L, 0.0)

    f = synthesize(g, transform)
    expect = np.cos(3.0 * g.x)
    assert np.max(np.abs(f.values - expect)) <= 1e-12


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(9)
    f = Field(GRID, rng.normal(size=256))
    path = tmp_path / "f.csv"
    field_to_csv(f, path)
    g = field_from_csv(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)
    header = path.read_text().splitlines()[0]
    assert header == "x,value"


def test_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(13)
    f = Field(GRID, rng.normal(size=256))
    path = tmp_path / "f.bin"
    field_to_binary(f, path)
    g = field_from_binary(path)
    assert g.grid == f.grid
    assert np.array_equal(g.values, f.values)


def test_csv_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,value\n0.0,1.0\n")  # 1 point: not a valid grid
    with pytest.raises(InvalidParameterError):
        field_from_csv(path)
