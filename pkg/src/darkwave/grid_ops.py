"""Uniform grid and discrete operators: derivatives and truncated convolution.

The domain [-L/2, L/2] carries N interior nodes x_k = k*dx - L/2 with
dx = L/(N+1) and homogeneous Dirichlet boundary conditions; N is kept odd so
the center node sits exactly at x = 0.  On top of the centered first
derivative and the second difference, this module realizes the nonlocal term
v -> W * v (zero-extended convolution restricted back to the interior nodes)
in three backends:

* ``DeltaComboOperator``   -- exact shifts for potentials made of Dirac
  masses at grid-commensurate positions;
* ``SampledKernelOperator``-- dx-weighted discrete convolution with the
  kernel sampled on the full grid (computed via FFT, identical to the direct
  truncated sum up to roundoff);
* ``SpectralMultiplierOperator`` -- zero-pad, multiply by What on the padded
  frequency grid, invert, truncate; used for Fourier-only potentials.

The dx weight on sampled-kernel taps makes the discrete sum a quadrature of
the continuous convolution, so the operator tends to the identity as the
kernel narrows to a Dirac mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft

from .potentials import (
    DeltaComponent,
    Family,
    PotentialSpec,
    delta_components,
    evaluate_fourier,
    evaluate_kernel,
)

__all__ = [
    "Grid",
    "InvalidGrid",
    "ShiftOffGrid",
    "build_grid",
    "apply_first_derivative",
    "apply_second_derivative",
    "ConvolutionOperator",
    "DeltaComboOperator",
    "SampledKernelOperator",
    "SpectralMultiplierOperator",
    "SumOperator",
    "build_convolution",
    "apply_convolution",
]


class InvalidGrid(ValueError):
    """Grid parameters violate L > 0 or odd N >= 3."""


class ShiftOffGrid(ValueError):
    """A Dirac shift is not an integer multiple of dx (or exceeds L/2)."""


# Sampled kernels whose dx-weighted mass misses What(0) = 1 by more than this
# are under-resolved on the grid; build_convolution promotes them to the
# spectral backend (see build_convolution).
_MASS_DEFECT_TOL = 1e-2


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform mesh on [-L/2, L/2] with N interior nodes and spacing dx.

    ``nodes`` holds x_1..x_N; ``mid_index`` is the 0-based position of the
    center node, so ``nodes[mid_index] == 0.0`` exactly.
    """

    L: float
    N: int
    dx: float
    nodes: np.ndarray
    mid_index: int


def build_grid(L: float, N: int) -> Grid:
    """Build the uniform Dirichlet grid; N must be odd so x = 0 is a node."""
    if not (isinstance(N, (int, np.integer)) and N >= 3 and N % 2 == 1):
        raise InvalidGrid(f"N must be an odd integer >= 3, got {N!r}")
    if not L > 0:
        raise InvalidGrid(f"L must be positive, got {L!r}")
    L = float(L)
    dx = L / (N + 1)
    half = dx * np.arange(1, (N + 1) // 2)
    # Mirror the right half so the node set is exactly symmetric about 0.
    nodes = np.concatenate([-half[::-1], [0.0], half])
    nodes.setflags(write=False)
    return Grid(L=L, N=int(N), dx=dx, nodes=nodes, mid_index=(N - 1) // 2)


def _first_difference(v: np.ndarray, dx: float, out: np.ndarray | None = None) -> np.ndarray:
    """(Dv)_k = (v_{k+1} - v_{k-1})/(2 dx) with zero Dirichlet padding."""
    if out is None:
        out = np.empty_like(v)
    inv = 1.0 / (2.0 * dx)
    out[0] = v[1] * inv
    np.subtract(v[2:], v[:-2], out=out[1:-1])
    out[1:-1] *= inv
    out[-1] = -v[-2] * inv
    return out


def _second_difference(v: np.ndarray, dx: float, out: np.ndarray | None = None) -> np.ndarray:
    """(Av)_k = (v_{k+1} - 2 v_k + v_{k-1})/dx^2 with zero Dirichlet padding."""
    if out is None:
        out = np.empty_like(v)
    inv = 1.0 / (dx * dx)
    out[0] = (v[1] - 2.0 * v[0]) * inv
    np.add(v[2:], v[:-2], out=out[1:-1])
    out[1:-1] -= 2.0 * v[1:-1]
    out[1:-1] *= inv
    out[-1] = (v[-2] - 2.0 * v[-1]) * inv
    return out


def _check_length(grid: Grid, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.N,):
        raise ValueError(f"expected vector of length {grid.N}, got shape {v.shape}")
    return v


def apply_first_derivative(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Centered first derivative with homogeneous Dirichlet boundaries.

    The matrix is skew-symmetric: <Dv, w> = -<v, Dw>.
    """
    return _first_difference(_check_length(grid, v), grid.dx)


def apply_second_derivative(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Second-order second difference with homogeneous Dirichlet boundaries.

    The matrix is symmetric: <Av, w> = <v, Aw>.
    """
    return _second_difference(_check_length(grid, v), grid.dx)


class ConvolutionOperator:
    """Realization of v -> W * v on the grid (zero-extended, truncated)."""

    backend = "abstract"

    def __init__(self, grid: Grid):
        self.grid = grid

    def apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class DeltaComboOperator(ConvolutionOperator):
    """Convolution with a finite combination of Dirac masses.

    Each mass (shift s, weight w) contributes w * v(x - s); shifts must be
    integer multiples of dx (within 1e-9 in x units) unless
    ``allow_offgrid=True``, in which case off-grid shifts are split linearly
    between the two bracketing grid offsets.
    """

    backend = "delta-combo"

    def __init__(self, grid: Grid, components: Sequence[DeltaComponent],
                 allow_offgrid: bool = False):
        super().__init__(grid)
        taps: dict[int, float] = {}
        for shift, weight in components:
            if abs(shift) >= grid.L / 2:
                raise ShiftOffGrid(f"delta shift {shift:g} outside (-L/2, L/2)")
            m = shift / grid.dx
            r = round(m)
            if abs(shift - r * grid.dx) <= 1e-9:
                taps[r] = taps.get(r, 0.0) + weight
            elif allow_offgrid:
                m0 = int(np.floor(m))
                frac = m - m0
                taps[m0] = taps.get(m0, 0.0) + weight * (1.0 - frac)
                taps[m0 + 1] = taps.get(m0 + 1, 0.0) + weight * frac
            else:
                raise ShiftOffGrid(
                    f"delta shift {shift:g} is not a multiple of dx = {grid.dx:g}"
                )
        self.taps = sorted(taps.items())

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = _check_length(self.grid, v)
        out = np.zeros_like(v)
        n = self.grid.N
        for m, w in self.taps:
            if m == 0:
                out += w * v
            elif m > 0:
                out[m:] += w * v[: n - m]
            else:
                out[:m] += w * v[-m:]
        return out


class SampledKernelOperator(ConvolutionOperator):
    """dx-weighted discrete convolution with kernel samples on the full grid.

    Taps are ``tap_weight * W(x_k)`` (tap_weight defaults to dx, the
    quadrature weight that makes the sum approximate the continuous
    convolution); the result is the centered restriction of the full linear
    convolution with v extended by zeros.  Computed with a cached real FFT,
    which reproduces the direct O(N^2) truncated sum to roundoff.
    """

    backend = "sampled-kernel"

    def __init__(self, grid: Grid, kernel_values: np.ndarray,
                 tap_weight: float | None = None):
        super().__init__(grid)
        kernel_values = _check_length(grid, kernel_values)
        if tap_weight is None:
            tap_weight = grid.dx
        self.taps = tap_weight * kernel_values
        self._nfft = sfft.next_fast_len(2 * grid.N - 1, real=True)
        self._taps_rfft = sfft.rfft(self.taps, self._nfft)
        self._lo = (grid.N - 1) // 2

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = _check_length(self.grid, v)
        full = sfft.irfft(sfft.rfft(v, self._nfft) * self._taps_rfft, self._nfft)
        return full[self._lo : self._lo + self.grid.N]


class SpectralMultiplierOperator(ConvolutionOperator):
    """Fourier-multiplier convolution on a zero-padded periodic extension.

    v is zero-padded to at least 2(N+1) samples (suppressing the circular
    wrap-around of the periodic transform), transformed, multiplied by
    What(xi_j) on the padded frequency grid xi_j = 2 pi j / L_pad, inverted,
    and truncated back to the N interior nodes.
    """

    backend = "spectral-multiplier"

    def __init__(self, grid: Grid, fourier: Callable[[np.ndarray], np.ndarray]):
        super().__init__(grid)
        self._npad = sfft.next_fast_len(2 * (grid.N + 1), real=True)
        xi = 2.0 * np.pi * sfft.rfftfreq(self._npad, d=grid.dx)
        self.multiplier = np.asarray(fourier(xi), dtype=float)

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = _check_length(self.grid, v)
        out = sfft.irfft(sfft.rfft(v, self._npad) * self.multiplier, self._npad)
        return out[: self.grid.N]


class SumOperator(ConvolutionOperator):
    """Pointwise sum of convolution operators on the same grid."""

    def __init__(self, parts: Sequence[ConvolutionOperator]):
        if not parts:
            raise ValueError("SumOperator needs at least one part")
        super().__init__(parts[0].grid)
        self.parts = list(parts)
        self.backend = "+".join(p.backend for p in parts)

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.parts[0].apply(v)
        for p in self.parts[1:]:
            out += p.apply(v)
        return out


def build_convolution(spec: PotentialSpec, grid: Grid,
                      allow_offgrid_shifts: bool = False) -> ConvolutionOperator:
    """Choose and build the convolution backend for a potential.

    E1 composes the central Dirac mass with the sampled smooth part; E2 and
    E3 sample their kernels on the grid; E4 is a pure delta combination;
    E5 and E6 are Fourier multipliers.  A sampled kernel whose dx-weighted
    mass misses 1 by more than 1% cannot resolve the potential on this grid
    (kernel narrower than dx, or support wider than the window); such
    potentials are promoted to the spectral backend, which represents them
    through What directly.
    """
    f = spec.family
    if f is Family.E1:
        return SumOperator([
            DeltaComboOperator(grid, delta_components(spec), allow_offgrid_shifts),
            SampledKernelOperator(grid, evaluate_kernel(spec, grid.nodes)),
        ])
    if f in (Family.E2, Family.E3):
        samples = evaluate_kernel(spec, grid.nodes)
        if abs(grid.dx * float(np.sum(samples)) - 1.0) > _MASS_DEFECT_TOL:
            return SpectralMultiplierOperator(grid, lambda xi: evaluate_fourier(spec, xi))
        return SampledKernelOperator(grid, samples)
    if f is Family.E4:
        return DeltaComboOperator(grid, delta_components(spec), allow_offgrid_shifts)
    return SpectralMultiplierOperator(grid, lambda xi: evaluate_fourier(spec, xi))


def apply_convolution(op: ConvolutionOperator, v: np.ndarray) -> np.ndarray:
    """Apply a convolution operator to a length-N vector."""
    return op.apply(v)
