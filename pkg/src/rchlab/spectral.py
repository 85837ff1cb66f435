"""Periodic pseudospectral toolbox on a uniform torus lattice.

All fields live on ``x_j = -L/2 + j*h`` with ``h = L/N`` and are transformed
with real FFTs; lattice wavenumbers are ``k_m = 2*pi*m/L``.  Products are
computed as exact spectral convolutions on a zero-padded grid, so no aliased
energy ever enters retained modes; the 2/3-rule mask is applied on request to
keep spectral budgets closed under repeated products.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np
from scipy.fft import irfft, rfft

from .errors import GridMismatchError, InvalidParameterError

TWO_THIRDS = 2.0 / 3.0


class PeriodicGrid:
    """Uniform lattice on a torus of circumference ``length``.

    ``n_points`` must be a power of two, at least 16, so dyadic filter banks
    and padded transforms stay exact.
    """

    def __init__(self, length: float, n_points: int):
        if not (length > 0.0 and np.isfinite(length)):
            raise InvalidParameterError(f"length must be positive, got {length!r}")
        if n_points < 16 or (n_points & (n_points - 1)) != 0:
            raise InvalidParameterError(
                f"n_points must be a power of two >= 16, got {n_points!r}")
        self.length = float(length)
        self.n_points = int(n_points)
        self.spacing = self.length / self.n_points
        self.x = -0.5 * self.length + self.spacing * np.arange(self.n_points)
        # one-sided (rfft) wavenumbers, 0..pi/h
        self.k = (2.0 * np.pi / self.length) * np.arange(self.n_points // 2 + 1)
        self.k_nyquist = np.pi / self.spacing
        self.dealias_cap = TWO_THIRDS * self.k_nyquist

    def __eq__(self, other) -> bool:
        return (isinstance(other, PeriodicGrid)
                and self.length == other.length
                and self.n_points == other.n_points)

    def __hash__(self):
        return hash((self.length, self.n_points))

    def __repr__(self):
        return f"PeriodicGrid(length={self.length!r}, n_points={self.n_points})"


@dataclass
class Field:
    """Real scalar field sampled on a :class:`PeriodicGrid`."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"values shape {vals.shape} does not match grid size "
                f"{self.grid.n_points}")
        self.values = vals

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def require_same_grid(f: Field, g: Field) -> PeriodicGrid:
    if f.grid != g.grid:
        raise GridMismatchError(f"grids differ: {f.grid} vs {g.grid}")
    return f.grid


def mode_amplitudes(f: Field) -> np.ndarray:
    """One-sided complex mode amplitudes ``rfft(values)/N`` (phase included)."""
    return rfft(f.values) / f.grid.n_points


def synthesize(grid: PeriodicGrid, transform) -> Field:
    """Field whose line Fourier transform is ``transform(k)`` on the lattice.

    The lattice coefficients are ``transform(k_m)/L``, which periodizes the
    line profile; the result is centered at x = 0 and real when ``transform``
    is real and even.
    """
    prof = np.asarray(transform(grid.k), dtype=np.float64)
    signs = np.where(np.arange(grid.n_points // 2 + 1) % 2 == 0, 1.0, -1.0)
    spec = (grid.n_points / grid.length) * prof * signs
    return Field(grid, irfft(spec.astype(np.complex128), grid.n_points))


def _deriv_vals(vals: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    spec = rfft(vals)
    spec *= 1j * grid.k
    spec[-1] = 0.0  # odd multiplier is ambiguous at the unpaired Nyquist mode
    return irfft(spec, grid.n_points)


def _helmholtz_vals(vals: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    spec = rfft(vals)
    spec /= 1.0 + grid.k**2
    return irfft(spec, grid.n_points)


def _gradp_vals(vals: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    spec = rfft(vals)
    spec *= 1j * grid.k / (1.0 + grid.k**2)
    spec[-1] = 0.0
    return irfft(spec, grid.n_points)


def ddx(f: Field) -> Field:
    """Spectral derivative; exact for lattice-resolved bands."""
    return Field(f.grid, _deriv_vals(f.values, f.grid))


def helmholtz_inverse(f: Field) -> Field:
    """Apply (1 - d_xx)^{-1}, i.e. convolution with the kernel exp(-|x|)/2."""
    return Field(f.grid, _helmholtz_vals(f.values, f.grid))


def grad_p_conv(f: Field) -> Field:
    """Apply d_x (1 - d_xx)^{-1}, the derivative of the kernel convolution."""
    return Field(f.grid, _gradp_vals(f.values, f.grid))


def _dealias_vals(vals: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    spec = rfft(vals)
    spec[grid.k > grid.dealias_cap] = 0.0
    return irfft(spec, grid.n_points)


def dealias(f: Field) -> Field:
    """Project onto modes below the 2/3-rule cap."""
    return Field(f.grid, _dealias_vals(f.values, f.grid))


def _pad_half_spec(spec: np.ndarray, n: int) -> np.ndarray:
    half = n // 2
    padded = np.zeros(n + 1, dtype=np.complex128)
    padded[:half] = spec[:half]
    padded[half] = 0.5 * spec[half]  # unpaired Nyquist splits into a paired mode
    return padded


def conv_spec(sa: np.ndarray, sb: np.ndarray, grid: PeriodicGrid,
              do_dealias: bool = False) -> np.ndarray:
    """Spectrum of the pointwise product, via an exact doubled-grid convolution.

    Inputs and output are one-sided (rfft) spectra on ``grid``; with
    ``do_dealias`` both inputs and the output are truncated by the 2/3 rule.
    """
    n = grid.n_points
    half = n // 2
    if do_dealias:
        mask = grid.k > grid.dealias_cap
        sa = np.where(mask, 0.0, sa)
        sb = np.where(mask, 0.0, sb)
    m = 2 * n
    big = rfft(irfft(_pad_half_spec(sa, n), m) * irfft(_pad_half_spec(sb, n), m)
               * (m / n) ** 2)
    spec = big[:half + 1] * (n / m)
    spec[half] = 2.0 * spec[half].real  # fold the paired big-grid mode N/2
    if do_dealias:
        spec[grid.k > grid.dealias_cap] = 0.0
    return spec


def _product_vals(a: np.ndarray, b: np.ndarray, grid: PeriodicGrid,
                  do_dealias: bool) -> np.ndarray:
    spec = conv_spec(rfft(a), rfft(b), grid, do_dealias)
    return irfft(spec, grid.n_points)


def product(f: Field, g: Field, dealias: bool = False) -> Field:
    """Pointwise product computed as an exact spectral convolution.

    With ``dealias=True`` both inputs and the output are truncated by the
    2/3 rule; chained calls (cubic and quartic terms) then never admit
    aliased energy into retained modes.
    """
    grid = require_same_grid(f, g)
    return Field(grid, _product_vals(f.values, g.values, grid, dealias))


def field_to_csv(f: Field, path) -> None:
    """Write (x, value) rows; full float64 round-trip precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value"])
        for x, v in zip(f.grid.x, f.values):
            writer.writerow([repr(float(x)), repr(float(v))])


def field_from_csv(path) -> Field:
    """Rebuild a field from (x, value) rows written by :func:`field_to_csv`."""
    xs: list[float] = []
    vs: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [c.strip().lower() for c in header[:2]] != ["x", "value"]:
            raise InvalidParameterError(f"unexpected CSV header {header!r}")
        for row in reader:
            xs.append(float(row[0]))
            vs.append(float(row[1]))
    x = np.asarray(xs)
    n = len(x)
    if n < 2:
        raise InvalidParameterError(f"field CSV {path!r} has fewer than 2 rows")
    # the lattice starts at -L/2, so the first abscissa recovers the length
    # exactly (a spacing*n reconstruction can drift by an ulp)
    grid = PeriodicGrid(length=-2.0 * x[0], n_points=n)
    if not np.allclose(grid.x, x, rtol=0.0, atol=1e-9 * max(1.0, abs(x[0]))):
        raise InvalidParameterError("CSV x column is not a centered uniform lattice")
    return Field(grid, np.asarray(vs))


_BIN_HEADER = struct.Struct("<dd")  # little-endian: length, n_points


def field_to_binary(f: Field, path) -> None:
    """Raw little-endian float64 dump with an (L, N) header."""
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(f.grid.length, float(f.grid.n_points)))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def field_from_binary(path) -> Field:
    with open(path, "rb") as fh:
        length, n_real = _BIN_HEADER.unpack(fh.read(_BIN_HEADER.size))
        n = int(round(n_real))
        vals = np.frombuffer(fh.read(8 * n), dtype="<f8")
    if vals.size != n:
        raise InvalidParameterError(f"truncated field file {path!r}")
    return Field(PeriodicGrid(length, n), vals.astype(np.float64))
