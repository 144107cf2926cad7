"""Uniform spatial grids, sampled wave packets and grid numerics.

Quadrature is trapezoidal throughout; it is spectrally accurate for the
edge-decayed packets every operation requires. Derivatives use 4th-order
centered stencils with one-sided closures at the edges (which are required to
be numerically dark anyway).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, GridTooNarrow, ValidationError

__all__ = [
    "GridSpec",
    "WavePacket",
    "inner_product",
    "packet_norm",
    "l2_distance",
    "mean_x",
    "var_x",
    "derivative",
    "second_derivative",
    "evaluate_trig_interpolant",
    "upsample_periodic",
]


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValidationError("grid needs x_min < x_max")
        if self.n_points < 16:
            raise ValidationError("grid needs at least 16 points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class WavePacket:
    """Complex samples of a one-dimensional wavefunction on a uniform grid.

    Immutable: the sample array is made read-only on construction and every
    transformation returns a new packet.
    """

    grid: GridSpec
    samples: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n_points,):
            raise ValidationError(
                f"samples shape {samples.shape} != grid size ({self.grid.n_points},)")
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise ValidationError("packet samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples, t=None) -> "WavePacket":
        return WavePacket(self.grid, samples, self.t if t is None else t)

    def edge_ratio(self) -> float:
        peak = float(np.max(np.abs(self.samples)))
        if peak == 0.0:
            return 0.0
        return float(max(abs(self.samples[0]), abs(self.samples[-1]))) / peak

    def require_dark_edges(self, threshold=1e-8, what="operation"):
        ratio = self.edge_ratio()
        if ratio >= threshold:
            raise GridTooNarrow(
                f"{what}: edge amplitude {ratio:.2e} of peak (limit {threshold:.0e})")

    def normalized(self) -> "WavePacket":
        return self.with_samples(self.samples / packet_norm(self))


def _check_same_grid(p1: WavePacket, p2: WavePacket):
    if p1.grid != p2.grid:
        raise GridMismatch(f"grids differ: {p1.grid} vs {p2.grid}")


def inner_product(p1: WavePacket, p2: WavePacket) -> complex:
    """Trapezoidal <p1|p2> = integral of conj(p1) p2 dx (grids must match)."""
    _check_same_grid(p1, p2)
    return complex(np.trapezoid(np.conj(p1.samples) * p2.samples, dx=p1.grid.dx))


def packet_norm(p: WavePacket) -> float:
    return float(np.sqrt(np.trapezoid(np.abs(p.samples) ** 2, dx=p.grid.dx)))


def l2_distance(p1: WavePacket, p2: WavePacket) -> float:
    _check_same_grid(p1, p2)
    return float(np.sqrt(np.trapezoid(np.abs(p1.samples - p2.samples) ** 2, dx=p1.grid.dx)))


def _moment(p: WavePacket, weight) -> float:
    density = np.abs(p.samples) ** 2
    total = np.trapezoid(density, dx=p.grid.dx)
    return float(np.trapezoid(weight * density, dx=p.grid.dx) / total)


def mean_x(p: WavePacket) -> float:
    return _moment(p, p.grid.points)


def var_x(p: WavePacket) -> float:
    mu = mean_x(p)
    return _moment(p, (p.grid.points - mu) ** 2)


# 4th-order first-derivative closures (rows: first two / last two points).
_EDGE1 = np.array([[-25.0, 48.0, -36.0, 16.0, -3.0],
                   [-3.0, -10.0, 18.0, -6.0, 1.0]]) / 12.0


def derivative(samples: np.ndarray, dx: float) -> np.ndarray:
    """d/dx via 4th-order centered stencil, one-sided at the edges."""
    f = np.asarray(samples)
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dx)
    head = f[:5]
    tail = f[-5:][::-1]
    out[0] = _EDGE1[0] @ head / dx
    out[1] = _EDGE1[1] @ head / dx
    out[-1] = -(_EDGE1[0] @ tail) / dx
    out[-2] = -(_EDGE1[1] @ tail) / dx
    return out


def second_derivative(samples: np.ndarray, dx: float) -> np.ndarray:
    """d2/dx2, 4th order in the interior, 2nd-order one-sided at the edges."""
    f = np.asarray(samples)
    out = np.empty_like(f)
    out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2]
                 + 16.0 * f[3:-1] - f[4:]) / (12.0 * dx * dx)
    edge = np.array([2.0, -5.0, 4.0, -1.0])
    out[0] = edge @ f[:4] / (dx * dx)
    out[1] = edge @ f[1:5] / (dx * dx)
    out[-1] = edge @ f[-4:][::-1] / (dx * dx)
    out[-2] = edge @ f[-5:-1][::-1] / (dx * dx)
    return out


def _fourier_modes(p: WavePacket):
    n = p.grid.n_points
    # implied period: one spacing beyond x_max
    period = n * p.grid.dx
    coeffs = np.fft.fft(p.samples) / n
    freqs = np.fft.fftfreq(n, d=p.grid.dx)
    return coeffs, freqs, period


def evaluate_trig_interpolant(p: WavePacket, points) -> np.ndarray:
    """Evaluate the packet's trigonometric interpolant at arbitrary points.

    Exact at grid nodes, spectrally accurate between them for edge-decayed
    packets. Points outside [x_min, x_max] return 0 (the interpolant itself is
    periodic, which is meaningless for a dark-edged packet).
    """
    coeffs, freqs, _ = _fourier_modes(p)
    points = np.asarray(points, dtype=float)
    flat = np.atleast_1d(points)
    inside = (flat >= p.grid.x_min) & (flat <= p.grid.x_max)
    out = np.zeros(flat.shape, dtype=np.complex128)
    if np.any(inside):
        rel = flat[inside] - p.grid.x_min
        # chunk the (points x modes) phase matrix to bound memory
        vals = np.empty(rel.shape, dtype=np.complex128)
        step = max(1, int(4e6 // max(len(coeffs), 1)))
        for lo in range(0, len(rel), step):
            block = rel[lo:lo + step, None]
            vals[lo:lo + step] = np.exp(2j * np.pi * block * freqs[None, :]) @ coeffs
        out[inside] = vals
    return out.reshape(points.shape) if points.shape else out[0]


def upsample_periodic(p: WavePacket, m: int):
    """Resample onto m >= n uniform points across the implied period.

    Returns (points, values); exact trigonometric upsampling by spectrum
    zero-padding. Used to refine quadrature grids for oscillatory kernels.
    """
    n = p.grid.n_points
    if m == n:
        return p.grid.points.copy(), np.asarray(p.samples, dtype=np.complex128).copy()
    if m < n:
        raise ValidationError("upsample target must be >= current grid size")
    spectrum = np.fft.fft(p.samples)
    padded = np.zeros(m, dtype=np.complex128)
    half = n // 2
    if n % 2 == 0:
        padded[:half] = spectrum[:half]
        # split the Nyquist bin symmetrically
        padded[half] = 0.5 * spectrum[half]
        padded[m - half] = 0.5 * spectrum[half]
        padded[m - half + 1:] = spectrum[half + 1:]
    else:
        padded[:half + 1] = spectrum[:half + 1]
        padded[m - half:] = spectrum[half + 1:]
    values = np.fft.ifft(padded) * (m / n)
    period = n * p.grid.dx
    points = p.grid.x_min + np.arange(m) * (period / m)
    return points, values
