"""Post-processing: phase, wavefunction, momentum, energy, shape, stability.

A converged profile eta determines the wavefunction up to a global phase via
u = sqrt(1 - eta) exp(i theta), where theta accumulates (c/2) eta/(1-eta)
by trapezoidal sums outward from the center node (where theta = 0).  The
discrete momentum and energy are

    P = (c/4)  dx sum eta^2/(1-eta),
    E = (c^2/8) dx sum eta^2/(1-eta) + (1/8) dx sum (D eta)^2/(1-eta)
        + (1/4) dx sum (W*eta) eta.

Along a branch of solitons parametrized by speed, dE/dP = c, and a strictly
decreasing P(c) (equivalently concave E(P)) is the operative stability
indicator; :func:`branch_diagnostics` reports both as divided-difference
checks without fitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid_ops import ConvolutionOperator, Grid, _first_difference
from .residual import EtaReachesOne, ETA_LIMIT

__all__ = [
    "SolitonObservables",
    "BranchRecord",
    "BranchEntry",
    "BranchDiagnostics",
    "InsufficientBranch",
    "phase",
    "wavefunction",
    "momentum",
    "energy",
    "shape_metrics",
    "compute_observables",
    "branch_diagnostics",
]


class InsufficientBranch(ValueError):
    """Fewer than 3 usable (converged, nontrivial) branch points."""


@dataclass(frozen=True, eq=False)
class SolitonObservables:
    """All per-profile quantities derived from one eta."""

    theta: np.ndarray
    u_re: np.ndarray
    u_im: np.ndarray
    momentum: float
    energy: float
    min_modulus: float
    width: float
    l2_norm: float
    h1_norm: float
    phase_shift: float


def _check(grid: Grid, eta: np.ndarray) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (grid.N,):
        raise ValueError(f"expected vector of length {grid.N}")
    if np.max(eta) >= ETA_LIMIT:
        raise EtaReachesOne("eta reaches 1; observables are undefined")
    return eta


def phase(grid: Grid, eta: np.ndarray, c: float) -> np.ndarray:
    """Phase at the nodes, pinned to 0 at the center node.

    Trapezoidal accumulation of (c/2) eta/(1-eta): forward sums right of the
    center, negated backward sums left of it.  For even eta the result is
    antisymmetric about the center.
    """
    eta = _check(grid, eta)
    f = eta / (1.0 - eta)
    # segment p holds the trapezoid between nodes p and p+1
    seg = (c * grid.dx / 4.0) * (f[:-1] + f[1:])
    m = grid.mid_index
    theta = np.empty_like(eta)
    theta[m] = 0.0
    theta[m + 1 :] = np.cumsum(seg[m:])
    theta[:m] = -np.cumsum(seg[:m][::-1])[::-1]
    return theta


def wavefunction(eta: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """u = sqrt(1-eta) exp(i theta), returned as (real, imaginary) parts."""
    eta = np.asarray(eta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if eta.shape != theta.shape:
        raise ValueError("eta and theta must have the same length")
    if np.max(eta) >= ETA_LIMIT:
        raise EtaReachesOne("eta reaches 1")
    r = np.sqrt(1.0 - eta)
    return r * np.cos(theta), r * np.sin(theta)


def momentum(grid: Grid, eta: np.ndarray, c: float) -> float:
    """P = (c/4) dx sum eta^2/(1-eta); nonnegative for admissible eta."""
    eta = _check(grid, eta)
    return float(c / 4.0 * grid.dx * np.sum(eta * eta / (1.0 - eta)))


def energy(grid: Grid, conv: ConvolutionOperator, eta: np.ndarray, c: float) -> float:
    """Three-term discrete energy (kinetic-in-speed, gradient, interaction)."""
    eta = _check(grid, eta)
    one_minus = 1.0 - eta
    d_eta = _first_difference(eta, grid.dx)
    k_eta = conv.apply(eta)
    return float(
        grid.dx
        * (
            c * c / 8.0 * np.sum(eta * eta / one_minus)
            + 1.0 / 8.0 * np.sum(d_eta * d_eta / one_minus)
            + 1.0 / 4.0 * np.sum(k_eta * eta)
        )
    )


def _fwhm(grid: Grid, eta: np.ndarray) -> float:
    """Full width of eta at half its maximum, by linear interpolation.

    Returns 0 when max(eta) <= 0 (no bump to measure).
    """
    peak = float(np.max(eta))
    if peak <= 0.0:
        return 0.0
    half = peak / 2.0
    i_peak = int(np.argmax(eta))
    x = grid.nodes

    def cross(i_in: int, i_out: int) -> float:
        # linear interpolation between a node above half and one below
        y0, y1 = eta[i_in], eta[i_out]
        if y0 == y1:
            return x[i_in]
        t = (half - y0) / (y1 - y0)
        return float(x[i_in] + t * (x[i_out] - x[i_in]))

    left = x[0]
    for i in range(i_peak, -1, -1):
        if eta[i] < half:
            left = cross(i + 1, i)
            break
    right = x[-1]
    for i in range(i_peak, grid.N):
        if eta[i] < half:
            right = cross(i - 1, i)
            break
    return right - left


def shape_metrics(grid: Grid, eta: np.ndarray, u_re: np.ndarray,
                  u_im: np.ndarray) -> tuple[float, float, float, float]:
    """(min |u|, FWHM of eta, discrete L2 norm of eta, discrete H1 norm)."""
    eta = np.asarray(eta, dtype=float)
    if not (eta.shape == u_re.shape == u_im.shape):
        raise ValueError("length mismatch")
    min_modulus = float(np.min(np.sqrt(u_re * u_re + u_im * u_im)))
    width = _fwhm(grid, eta)
    l2_sq = grid.dx * float(np.sum(eta * eta))
    d_eta = _first_difference(eta, grid.dx)
    h1 = math.sqrt(l2_sq + grid.dx * float(np.sum(d_eta * d_eta)))
    return min_modulus, width, math.sqrt(l2_sq), h1


def compute_observables(grid: Grid, conv: ConvolutionOperator, eta: np.ndarray,
                        c: float) -> SolitonObservables:
    """Assemble the full per-profile observable set."""
    eta = _check(grid, eta)
    theta = phase(grid, eta, c)
    u_re, u_im = wavefunction(eta, theta)
    min_mod, width, l2, h1 = shape_metrics(grid, eta, u_re, u_im)
    return SolitonObservables(
        theta=theta,
        u_re=u_re,
        u_im=u_im,
        momentum=momentum(grid, eta, c),
        energy=energy(grid, conv, eta, c),
        min_modulus=min_mod,
        width=width,
        l2_norm=l2,
        h1_norm=h1,
        phase_shift=float(theta[-1] - theta[0]),
    )


@dataclass(frozen=True, eq=False)
class BranchEntry:
    """One branch point: sweep parameter (c or lambda) plus its observables."""

    parameter: float
    observables: SolitonObservables | None
    converged: bool
    is_trivial: bool
    iterations: int = 0
    final_objective: float = float("nan")


@dataclass(frozen=True, eq=False)
class BranchRecord:
    """Branch points sorted by parameter, forming an E-P diagram."""

    entries: list[BranchEntry]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", sorted(self.entries, key=lambda e: e.parameter)
        )

    def usable(self) -> list[BranchEntry]:
        return [
            e for e in self.entries
            if e.converged and not e.is_trivial and e.observables is not None
        ]


@dataclass(frozen=True, eq=False)
class BranchDiagnostics:
    """Divided-difference stability proxies along a speed branch.

    ``slopes`` holds per-interval (midpoint speed, dE/dP, relative error vs
    the midpoint speed); the slope entry is None for a degenerate interval
    with equal momenta.
    """

    p_strictly_decreasing: bool
    slopes: list[tuple[float, float | None, float | None]]
    e_concave_in_p: bool


def branch_diagnostics(branch: BranchRecord) -> BranchDiagnostics:
    """Check P monotonicity, dE/dP = c per interval, and concavity of E(P)."""
    pts = branch.usable()
    if len(pts) < 3:
        raise InsufficientBranch(f"need >= 3 usable branch points, got {len(pts)}")
    c = np.array([e.parameter for e in pts])
    p = np.array([e.observables.momentum for e in pts])
    en = np.array([e.observables.energy for e in pts])

    p_decreasing = bool(np.all(np.diff(p) < 0))

    slopes: list[tuple[float, float | None, float | None]] = []
    for i in range(len(pts) - 1):
        mid = 0.5 * (c[i] + c[i + 1])
        dp = p[i + 1] - p[i]
        if dp == 0.0:
            slopes.append((mid, None, None))
            continue
        slope = (en[i + 1] - en[i]) / dp
        rel = abs(slope - mid) / mid if mid != 0 else None
        slopes.append((mid, float(slope), rel))

    order = np.argsort(p)
    ps, es = p[order], en[order]
    concave = True
    for i in range(1, len(ps) - 1):
        dp1 = ps[i] - ps[i - 1]
        dp2 = ps[i + 1] - ps[i]
        if dp1 == 0.0 or dp2 == 0.0:
            continue  # zero-width interval: no concavity information
        if (es[i + 1] - es[i]) / dp2 - (es[i] - es[i - 1]) / dp1 > 0.0:
            concave = False
            break
    return BranchDiagnostics(
        p_strictly_decreasing=p_decreasing,
        slopes=slopes,
        e_concave_in_p=concave,
    )
