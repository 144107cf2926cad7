"""Independent numerical references used to validate the analytic modules.

Nothing here shares mutable state with the code it checks. The evolver is an
implicit-midpoint (Crank-Nicolson) scheme on a tridiagonal Hermitian
discretization of the Hamiltonian, chosen over split-step because the mixed
a(t) (xp + px) coupling does not factor into kinetic/potential pieces. The
mixed term is discretized antisymmetrically so the matrix stays exactly
Hermitian and the Cayley step preserves the discrete norm to solver roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .classical import ClassicalBasis, solve_homogeneous_basis, solve_particular
from .coefficients import Scenario, hamiltonian_coefficients
from .errors import (CausticEncountered, GridTooNarrow, LinearSolveFailure,
                     ValidationError)
from .packets import (GridSpec, WavePacket, derivative, inner_product,
                      second_derivative)
from .propagator import KernelQuery, kernel, kernel_coefficients

__all__ = [
    "EvolverConfig",
    "evolve_tdse",
    "hamiltonian_apply",
    "schrodinger_residual",
    "schrodinger_residual_map",
    "path_integral_oracle",
    "compose_kernels",
    "inner_product",
]


@dataclass(frozen=True)
class EvolverConfig:
    dt: float
    grid: GridSpec = None
    scheme: str = "crank-nicolson"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        if self.scheme != "crank-nicolson":
            raise ValidationError("only the crank-nicolson scheme is implemented")


def _tridiagonal_hamiltonian(s: Scenario, t: float, grid: GridSpec):
    """Hermitian tridiagonal H(t): rows (upper, diag, lower) for solve_banded."""
    x = grid.points
    dx = grid.dx
    hbar = s.hbar
    m, _ = s.mass.eval(t)
    a_c, _ = s.a.eval(t)
    b_c, _ = s.b.eval(t)
    f_c, _ = s.f.eval(t)
    hc = hamiltonian_coefficients(s, t)
    diag = (hbar ** 2 / (m * dx * dx)
            + 0.5 * m * hc.c * x * x + hc.d * x + b_c * b_c / (2.0 * m) - f_c)
    # -a (xp + px) -> -i hbar a (D_c X + X D_c); -(b/M) p -> i hbar (b/M) D_c
    upper = (-hbar ** 2 / (2.0 * m * dx * dx)
             + 1j * hbar * (a_c * (x[:-1] + x[1:]) + b_c / m) / (2.0 * dx))
    return diag.astype(np.complex128), upper.astype(np.complex128)


def evolve_tdse(s: Scenario, packet: WavePacket, t_end: float,
                cfg: EvolverConfig) -> WavePacket:
    """Crank-Nicolson evolution of a packet to t_end.

    Coefficients are sampled at step midpoints, which keeps second-order
    accuracy for time-dependent scenarios; the step count is rounded so the
    interval divides evenly and runs are deterministic.
    """
    if s.dimension != 1:
        raise ValidationError("the grid evolver is one-dimensional")
    grid = packet.grid
    if cfg.grid is not None and cfg.grid != grid:
        raise ValidationError("config grid differs from the packet grid")
    packet.require_dark_edges(1e-8, "evolve_tdse")
    span = t_end - packet.t
    if span == 0.0:
        return packet.with_samples(packet.samples)
    n_steps = max(1, round(abs(span) / cfg.dt))
    dt = span / n_steps
    half = 0.5 * dt / s.hbar
    psi = np.asarray(packet.samples, dtype=np.complex128).copy()
    ab = np.zeros((3, grid.n_points), dtype=np.complex128)
    norm0 = math.sqrt(float(np.sum(np.abs(psi) ** 2)))
    t = packet.t
    for k in range(n_steps):
        diag, upper = _tridiagonal_hamiltonian(s, t + 0.5 * dt, grid)
        lower = np.conj(upper)
        rhs = psi - 1j * half * (diag * psi)
        rhs[:-1] -= 1j * half * upper * psi[1:]
        rhs[1:] -= 1j * half * lower * psi[:-1]
        ab[1, :] = 1.0 + 1j * half * diag
        ab[0, 1:] = 1j * half * upper
        ab[2, :-1] = 1j * half * lower
        psi = solve_banded((1, 1), ab, rhs)
        if not np.all(np.isfinite(psi.view(np.float64))):
            raise LinearSolveFailure(f"non-finite state after step {k + 1}")
        t += dt
    drift = abs(math.sqrt(float(np.sum(np.abs(psi) ** 2))) / norm0 - 1.0)
    if drift > 1e-10 * n_steps:
        raise LinearSolveFailure(f"norm drifted by {drift:.2e} over {n_steps} steps")
    return WavePacket(grid, psi, t=t_end)


def hamiltonian_apply(s: Scenario, t: float, grid: GridSpec, samples) -> np.ndarray:
    """H(t) acting on grid samples with 4th-order stencils (for residuals)."""
    x = grid.points
    dx = grid.dx
    hbar = s.hbar
    m, _ = s.mass.eval(t)
    a_c, _ = s.a.eval(t)
    b_c, _ = s.b.eval(t)
    f_c, _ = s.f.eval(t)
    hc = hamiltonian_coefficients(s, t)
    psi = np.asarray(samples, dtype=np.complex128)
    d1 = derivative(psi, dx)
    d2 = second_derivative(psi, dx)
    return (-hbar ** 2 / (2.0 * m) * d2
            + 1j * hbar * a_c * (2.0 * x * d1 + psi)
            + 1j * hbar * (b_c / m) * d1
            + (0.5 * m * hc.c * x * x + hc.d * x + b_c * b_c / (2.0 * m) - f_c) * psi)


def schrodinger_residual_map(field, s: Scenario, t: float, grid: GridSpec,
                             dt: float = 1e-5):
    """Pointwise |(-i hbar d/dt + H) field| over interior nodes, normalized.

    Returns (x_interior, residual) arrays, suitable for CSV export; the
    scalar check below takes the max of this map.
    """
    x = grid.points
    psi = np.asarray(field(t, x), dtype=np.complex128)
    dpsi_dt = (np.asarray(field(t + dt, x)) - np.asarray(field(t - dt, x))) / (2.0 * dt)
    h_psi = hamiltonian_apply(s, t, grid, psi)
    res = -1j * s.hbar * dpsi_dt + h_psi
    interior = slice(4, -4)
    scale = float(np.max(np.abs(h_psi[interior])))
    if scale == 0.0:
        raise ValidationError("H.field vanishes on the interior; cannot normalize")
    return x[interior], np.abs(res[interior]) / scale


def schrodinger_residual(field, s: Scenario, t: float, grid: GridSpec,
                         dt: float = 1e-5) -> float:
    """Normalized residual of (-i hbar d/dt + H) applied to a field.

    `field(t, x_array)` must be evaluable in a neighborhood of t. The time
    derivative uses centered differences with step dt, space uses 4th-order
    stencils, and the max-norm over interior nodes is divided by max |H field|.
    """
    _, res = schrodinger_residual_map(field, s, t, grid, dt)
    return float(np.max(res))


def _smooth_window(points, center, r_flat, r_zero):
    """C-infinity taper: 1 inside |u| <= r_flat, 0 outside |u| >= r_zero."""
    u = np.abs(np.asarray(points, dtype=float) - center)
    w = np.zeros_like(u)
    w[u <= r_flat] = 1.0
    ramp = (u > r_flat) & (u < r_zero)
    if np.any(ramp):
        sigma = (r_zero - u[ramp]) / (r_zero - r_flat)

        def bump(v):
            out = np.zeros_like(v)
            pos = v > 0
            out[pos] = np.exp(-1.0 / v[pos])
            return out

        up = bump(sigma)
        down = bump(1.0 - sigma)
        w[ramp] = up / (up + down)
    return w


def compose_kernels(s: Scenario, basis: ClassicalBasis, part, t_a: float,
                    t_b: float, t_c: float, x_a: float, x_c: float,
                    flat_halfwidth=None, oversample: float = 6.0) -> complex:
    """Quadrature check of the semigroup property: integral over the
    intermediate position of K(c, b) K(b, a).

    The integrand is a pure chirp, so the real-line trapezoid is stabilized by
    a smooth window that is flat across the stationary-phase region; the
    windowed tails are non-stationary and contribute below the test
    tolerances. Kernel values come from the propagator module itself; only the
    integration is independent.
    """
    if s.dimension != 1:
        raise ValidationError("composition quadrature is one-dimensional")
    co1 = kernel_coefficients(s, basis, part, t_a, t_b)
    co2 = kernel_coefficients(s, basis, part, t_b, t_c)
    a_tot = co1.q_bb + co2.q_aa
    b_tot = co1.q_ab * x_a + co1.l_b + co2.q_ab * x_c + co2.l_a
    if a_tot == 0.0:
        raise CausticEncountered("composite interval sits on a focal point")
    y_star = -0.5 * b_tot / a_tot
    zone = math.sqrt(math.pi / abs(a_tot))
    r_flat = flat_halfwidth if flat_halfwidth is not None else max(12.0 * zone, 8.0)
    r_zero = 2.0 * r_flat
    rate = 2.0 * abs(a_tot) * r_zero + abs(b_tot + 2.0 * a_tot * y_star)
    dy = math.pi / (oversample * max(rate, 1.0))
    n = int(math.ceil(2.0 * r_zero / dy)) + 1
    ys = np.linspace(y_star - r_zero, y_star + r_zero, n)
    vals = co1.value_1d(x_a, ys) * co2.value_1d(ys, x_c)
    vals = vals * _smooth_window(ys, y_star, r_flat, r_zero)
    return complex(np.trapezoid(vals, dx=ys[1] - ys[0]))


def _classical_path(basis, part, t_a, x_a, t_b, x_b, t):
    """Classical trajectory through the two endpoints, evaluated at t."""
    u_a, _, v_a, _ = basis.uv(t_a)
    u_b, _, v_b, _ = basis.uv(t_b)
    xp_a = 0.0 if part is None else float(part.x(t_a))
    xp_b = 0.0 if part is None else float(part.x(t_b))
    xp_t = 0.0 if part is None else float(part.x(t))
    y_a = x_a - xp_a
    y_b = x_b - xp_b
    det = u_a * v_b - v_a * u_b
    alpha = (y_a * v_b - y_b * v_a) / det
    beta = (y_b * u_a - y_a * u_b) / det
    u_t, _, v_t, _ = basis.uv(t)
    return alpha * u_t + beta * v_t + xp_t


def _slice_step(co, x, g, dx):
    """One windowed slice integration: out_j = sum_m K(x_j, y_m) g_m dx.

    Chunked direct evaluation of the trapezoid sum (the field is already zero
    at the edges, so uniform weights are the trapezoid rule exactly).
    """
    g2 = np.exp(1j * (co.q_aa * x * x + co.l_a * x)) * g
    out = np.empty(len(x), dtype=np.complex128)
    chunk = max(1, int(4e6 // max(len(x), 1)))
    for lo in range(0, len(x), chunk):
        xs = x[lo:lo + chunk, None]
        out[lo:lo + chunk] = np.exp(1j * co.q_ab * xs * x[None, :]) @ g2
    return co.prefactor * np.exp(1j * (co.q_bb * x * x + co.l_b * x)) * out * dx


def path_integral_oracle(s: Scenario, q: KernelQuery, n_slices: int,
                         grid: GridSpec, basis: ClassicalBasis = None,
                         part=None) -> complex:
    """Discretized time-slicing evaluation of the kernel.

    Composes n_slices exact short-time kernels by iterated quadrature on the
    given grid (the grid fixes the quadrature resolution, so refinement
    studies are meaningful). Intermediate fields are smoothly windowed to tame
    the non-decaying chirp tails; the window must stay flat around the
    classical path, otherwise GridTooNarrow is raised.
    """
    if n_slices < 1:
        raise ValidationError("n_slices must be >= 1")
    if s.dimension != 1:
        raise ValidationError("the slicing oracle is one-dimensional")
    if basis is None:
        basis = solve_homogeneous_basis(s)
    if part is None:
        part = solve_particular(s)
    if n_slices == 1:
        return kernel(s, basis, part, q)
    x_a = float(np.atleast_1d(q.r_a)[0])
    x_b = float(np.atleast_1d(q.r_b)[0])
    times = np.linspace(q.t_a, q.t_b, n_slices + 1)
    x = grid.points
    dx = grid.dx
    half_span = 0.5 * (grid.x_max - grid.x_min)
    center = 0.5 * (grid.x_max + grid.x_min)
    r_flat = 0.55 * half_span
    r_zero = 0.90 * half_span
    sigma = math.sqrt(s.hbar * abs(q.t_b - q.t_a))
    for t_mid in times[1:-1]:
        x_cl = _classical_path(basis, part, q.t_a, x_a, q.t_b, x_b, t_mid)
        if abs(x_cl - center) + 3.0 * sigma > r_flat:
            raise GridTooNarrow(
                f"classical path at {x_cl:.3g} leaves the window's flat region")
    window = _smooth_window(x, center, r_flat, r_zero)

    co = kernel_coefficients(s, basis, part, times[0], times[1])
    field = co.value_1d(x_a, x)
    for k in range(1, n_slices - 1):
        co = kernel_coefficients(s, basis, part, times[k], times[k + 1])
        field = _slice_step(co, x, field * window, dx)
    co = kernel_coefficients(s, basis, part, times[-2], times[-1])
    vals = co.value_1d(x, x_b) * field * window
    return complex(np.sum(vals) * dx)
