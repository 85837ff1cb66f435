"""Pseudospectral method-of-lines solver for the nonlocal evolution.

The equation integrated is ``u_t + u u_x = G(u)`` with

    G(u) = -d_x (1 - d_xx)^{-1} [ (1/2) u_x^2 + c1 u^2 + c2 u^3 + c3 u^4 ],

the coefficients coming from :mod:`rchlab.coefficients`.  Time stepping is
classical RK4 with a fixed step, an advective CFL guard, and a blow-up
threshold; a Picard iterator for the frozen-coefficient linearization is
provided for contraction experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import irfft, rfft

from .coefficients import ModelParams
from .errors import BlowUpError, CFLError, InvalidParameterError
from .spectral import Field, PeriodicGrid, conv_spec

CFL_FRACTION = 0.5
BLOWUP_THRESHOLD = 1e8
KAPPA_DEFAULT = 0.1


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step RK4 configuration."""

    dt: float
    t_end: float
    snapshot_every: int = 1
    dealias: bool = True

    def __post_init__(self):
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise InvalidParameterError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end >= self.dt):
            raise InvalidParameterError(
                f"t_end must be at least dt, got t_end={self.t_end!r} dt={self.dt!r}")
        if self.snapshot_every < 1:
            raise InvalidParameterError("snapshot_every must be >= 1")


@dataclass
class Trajectory:
    """Snapshots of one solver run on a common grid."""

    grid: PeriodicGrid
    params: ModelParams
    times: np.ndarray
    states: np.ndarray  # shape (n_snapshots, n_points)

    def field_at(self, i: int) -> Field:
        return Field(self.grid, self.states[i])

    def final(self) -> Field:
        return Field(self.grid, self.states[-1])

    def index_of_time(self, t: float, tol: float = 1e-9) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > tol:
            raise InvalidParameterError(f"time {t} not among stored snapshots")
        return i


def _rhs_g_spec(spec_u: np.ndarray, grid: PeriodicGrid, params: ModelParams,
                dealias: bool) -> np.ndarray:
    k = grid.k
    if dealias:
        spec_u = np.where(k > grid.dealias_cap, 0.0, spec_u)
    spec_ux = 1j * k * spec_u
    spec_ux[-1] = 0.0
    q = 0.5 * conv_spec(spec_ux, spec_ux, grid, dealias)
    spec_u2 = conv_spec(spec_u, spec_u, grid, dealias)
    q += params.c1 * spec_u2
    if params.c2 != 0.0:
        q += params.c2 * conv_spec(spec_u2, spec_u, grid, dealias)
    if params.c3 != 0.0:
        q += params.c3 * conv_spec(spec_u2, spec_u2, grid, dealias)
    out = -1j * k / (1.0 + k**2) * q
    out[-1] = 0.0
    return out


def _full_rhs_spec(spec_u: np.ndarray, grid: PeriodicGrid, params: ModelParams,
                   dealias: bool) -> np.ndarray:
    k = grid.k
    if dealias:
        spec_u = np.where(k > grid.dealias_cap, 0.0, spec_u)
    spec_ux = 1j * k * spec_u
    spec_ux[-1] = 0.0
    advect = conv_spec(spec_u, spec_ux, grid, dealias)
    return _rhs_g_spec(spec_u, grid, params, dealias) - advect


def rhs_g(u: Field, params: ModelParams, dealias: bool = True) -> Field:
    """Nonlocal flux G(u); the advective term is not included."""
    spec = rfft(u.values)
    return Field(u.grid, irfft(_rhs_g_spec(spec, u.grid, params, dealias),
                               u.grid.n_points))


def full_rhs(u: Field, params: ModelParams, dealias: bool = True) -> Field:
    """Complete right-hand side -u u_x + G(u) of the evolution."""
    spec = rfft(u.values)
    return Field(u.grid, irfft(_full_rhs_spec(spec, u.grid, params, dealias),
                               u.grid.n_points))


def kappa_horizon(u0_norm: float, kappa: float = KAPPA_DEFAULT) -> float:
    """Guaranteed-existence horizon T = kappa / (B + B^2 + B^3) for B = ||u0||.

    Zero data never blows up, so B = 0 yields an infinite horizon.
    """
    b = float(u0_norm)
    if b < 0.0 or not math.isfinite(b):
        raise InvalidParameterError(f"data norm must be finite and >= 0, got {b!r}")
    if b == 0.0:
        return np.inf
    return kappa / (b + b**2 + b**3)


def h1_integral(f: Field) -> float:
    """The conserved quadratic integral: sum of lattice L2 masses of u and u_x."""
    spec = rfft(f.values)
    n = f.grid.n_points
    c2 = np.abs(spec) ** 2 / n**2
    weights = np.full(c2.shape, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    sym = 1.0 + f.grid.k**2
    sym[-1] = 1.0  # derivative loses the unpaired Nyquist mode
    return float(f.grid.length * np.sum(weights * sym * c2))


def transport_diagnostic(f: Field) -> float:
    """Size function ||u_x||_inf + ||u||_inf + ||u||_inf^2 + ||u||_inf^3."""
    from .spectral import ddx

    a = float(np.max(np.abs(f.values)))
    b = float(np.max(np.abs(ddx(f).values)))
    return b + a + a**2 + a**3


def _check_state(vals: np.ndarray, t_last_good: float) -> None:
    m = np.max(np.abs(vals))
    if not np.isfinite(m) or m > BLOWUP_THRESHOLD:
        raise BlowUpError(
            f"state norm {m!r} beyond blow-up threshold {BLOWUP_THRESHOLD:g}",
            time=t_last_good)


def _step_times(dt: float, t_end: float) -> np.ndarray:
    n_full = int(np.floor(t_end / dt + 1e-9))
    times = dt * np.arange(n_full + 1)
    if t_end - times[-1] > 1e-9 * max(1.0, t_end):
        times = np.append(times, t_end)
    times[-1] = t_end
    return times


def solve(u0: Field, params: ModelParams, cfg: SolverConfig) -> Trajectory:
    """Integrate the full equation from ``u0`` with fixed-step RK4.

    Raises :class:`CFLError` if ``dt * max|u|`` exceeds half the grid spacing
    at any step, and :class:`BlowUpError` (with the last good time) if the
    state exceeds the blow-up threshold or loses finiteness.
    """
    grid = u0.grid
    times = _step_times(cfg.dt, cfg.t_end)
    u = u0.values.copy()
    snaps = [u.copy()]
    snap_times = [0.0]
    for i in range(len(times) - 1):
        t, t_next = times[i], times[i + 1]
        dt = t_next - t
        step_max = np.max(np.abs(u))
        if dt * step_max > CFL_FRACTION * grid.spacing:
            raise CFLError(
                f"CFL guard failed at t={t:.6g}: dt*max|u|={dt * step_max:.3e} "
                f"> {CFL_FRACTION} * spacing={CFL_FRACTION * grid.spacing:.3e}",
                time=t)
        s = rfft(u)
        k1 = _full_rhs_spec(s, grid, params, cfg.dealias)
        k2 = _full_rhs_spec(s + 0.5 * dt * k1, grid, params, cfg.dealias)
        k3 = _full_rhs_spec(s + 0.5 * dt * k2, grid, params, cfg.dealias)
        k4 = _full_rhs_spec(s + dt * k3, grid, params, cfg.dealias)
        u = irfft(s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
                  grid.n_points)
        _check_state(u, t_last_good=t)
        step_idx = i + 1
        if step_idx % cfg.snapshot_every == 0 or step_idx == len(times) - 1:
            snaps.append(u.copy())
            snap_times.append(t_next)
    return Trajectory(grid=grid, params=params,
                      times=np.asarray(snap_times), states=np.asarray(snaps))


class _TimeInterpolant:
    """Cubic Lagrange interpolation over a trajectory's stored snapshots."""

    def __init__(self, traj: Trajectory):
        self.times = traj.times
        self.states = traj.states

    def __call__(self, t: float) -> np.ndarray:
        times = self.times
        n = len(times)
        if n == 1:
            return self.states[0]
        i = int(np.searchsorted(times, t) - 1)
        i = min(max(i, 0), n - 2)
        lo = min(max(i - 1, 0), max(n - 4, 0))
        stencil = range(lo, min(lo + 4, n))
        out = np.zeros_like(self.states[0])
        for a in stencil:
            w = 1.0
            for b in stencil:
                if b != a:
                    w *= (t - times[b]) / (times[a] - times[b])
            out += w * self.states[a]
        return out


def picard_iterate(u0: Field, params: ModelParams, cfg: SolverConfig,
                   m_iters: int) -> list[Trajectory]:
    """Iterates of the frozen-coefficient linearization.

    Iterate zero is identically zero; iterate m+1 solves the linear transport
    problem ``v_t + u^m v_x = G(u^m)`` from the same initial state, with
    ``u^m`` interpolated in time from its stored snapshots.  Returns the
    trajectories of iterates 1..m_iters, each stored at every step.
    """
    if m_iters < 1:
        raise InvalidParameterError("m_iters must be >= 1")
    grid = u0.grid
    times = _step_times(cfg.dt, cfg.t_end)
    iterates: list[Trajectory] = []
    prev: _TimeInterpolant | None = None  # None encodes the zero iterate
    for _ in range(m_iters):
        u = u0.values.copy()
        snaps = [u.copy()]
        for i in range(len(times) - 1):
            t, t_next = times[i], times[i + 1]
            dt = t_next - t

            def rhs(tau, vals):
                if prev is None:
                    return np.zeros_like(vals)
                frozen = prev(tau)
                sf = rfft(frozen)
                sv = rfft(vals)
                k = grid.k
                if cfg.dealias:
                    sf = np.where(k > grid.dealias_cap, 0.0, sf)
                    sv = np.where(k > grid.dealias_cap, 0.0, sv)
                svx = 1j * k * sv
                svx[-1] = 0.0
                advect = conv_spec(sf, svx, grid, cfg.dealias)
                out = _rhs_g_spec(sf, grid, params, cfg.dealias) - advect
                return irfft(out, grid.n_points)

            k1 = rhs(t, u)
            k2 = rhs(t + 0.5 * dt, u + 0.5 * dt * k1)
            k3 = rhs(t + 0.5 * dt, u + 0.5 * dt * k2)
            k4 = rhs(t_next, u + dt * k3)
            u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            _check_state(u, t_last_good=t)
            snaps.append(u.copy())
        traj = Trajectory(grid=grid, params=params, times=times.copy(),
                          states=np.asarray(snaps))
        iterates.append(traj)
        prev = _TimeInterpolant(traj)
    return iterates
