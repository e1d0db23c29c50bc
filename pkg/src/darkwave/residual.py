"""Discrete traveling-wave residual, its Jacobian action, adjoint and gradient.

For a speed c and convolution operator K = W * (.), the residual of the
discretized profile equation in the unknown eta = 1 - |u|^2 is

    J(eta) = A eta - 2 K eta + c^2 eta
             + c^2 eta.eta ./ (2(1-eta))
             + (D eta . D eta) ./ (2(1-eta))
             + 2 (K eta).eta,

with A the Dirichlet second difference, D the centered first derivative and
``.``/``./`` componentwise products and quotients.  The scalar objective is
F(eta) = dx * ||J(eta)||^2 and its gradient is 2 dx [dJ]^T J, assembled
matrix-free: the Jacobian is only ever applied to vectors,

    dJ(eta) w = A w - 2 K w + c^2 w
                + [(2 c^2 eta.(1-eta/2) + D eta.D eta) ./ (2(1-eta).(1-eta))].w
                + (D eta ./ (1-eta)).(D w)
                + 2 (K eta).w + 2 eta.(K w),

and its transpose follows from A, K being symmetric, the multipliers being
diagonal, and D being skew-symmetric: the D-term transposes to
-D[(D eta ./ (1-eta)).v], and the two convolution terms of the transpose,
-2 K v + 2 K(eta.v), are evaluated as the single product -2 K((1-eta).v)
by linearity.

All operations require max(eta) < 1; iterates touching 1 make the quotients
blow up and raise :class:`EtaReachesOne` instead of being clamped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import adjoint_core, residual_core
from .grid_ops import (
    ConvolutionOperator,
    Grid,
    _first_difference,
    _second_difference,
    build_convolution,
)
from .potentials import PotentialSpec

__all__ = [
    "SolitonProblem",
    "EtaReachesOne",
    "make_problem",
    "residual",
    "jacobian_apply",
    "jacobian_adjoint_apply",
    "objective",
    "gradient",
]

# Admissibility guard: eta_k >= 1 - 1e-12 is rejected, never clamped.
ETA_LIMIT = 1.0 - 1e-12


class EtaReachesOne(ValueError):
    """An eta iterate reached 1; the quotients 1/(1-eta) are blowing up."""


@dataclass(frozen=True, eq=False)
class SolitonProblem:
    """A potential, a grid, its convolution operator, and a speed c >= 0.

    Subsonic c is not enforced: probing speeds at and above the Landau or
    sonic speed is a legitimate experiment for the caller.
    """

    spec: PotentialSpec
    grid: Grid
    conv: ConvolutionOperator
    c: float
    c2: float = field(init=False)

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError("speed c must be >= 0")
        if self.conv.grid is not self.grid:
            raise ValueError("convolution operator was built for a different grid")
        object.__setattr__(self, "c2", float(self.c) * float(self.c))


def make_problem(spec: PotentialSpec, grid: Grid, c: float,
                 conv: ConvolutionOperator | None = None) -> SolitonProblem:
    """Assemble a SolitonProblem, building the convolution operator if needed."""
    if conv is None:
        conv = build_convolution(spec, grid)
    return SolitonProblem(spec=spec, grid=grid, conv=conv, c=float(c))


def _check_admissible(eta: np.ndarray) -> None:
    if np.max(eta) >= ETA_LIMIT:
        raise EtaReachesOne(f"max(eta) = {np.max(eta):.17g} >= 1 - 1e-12")


class _EvalState:
    """Cached quantities of one residual evaluation (solver hot path)."""

    __slots__ = ("eta", "k_eta", "d_eta", "res", "obj")

    def __init__(self, eta, k_eta, d_eta, res, obj):
        self.eta = eta
        self.k_eta = k_eta
        self.d_eta = d_eta
        self.res = res
        self.obj = obj


def _evaluate(p: SolitonProblem, eta: np.ndarray,
              k_eta: np.ndarray | None = None) -> _EvalState:
    """Residual and objective with reusable intermediates.

    ``k_eta`` may be supplied by callers who track K eta through linear
    updates (the descent loop does); it is computed otherwise.
    """
    _check_admissible(eta)
    if k_eta is None:
        k_eta = p.conv.apply(eta)
    res = np.empty_like(eta)
    d_eta = np.empty_like(eta)
    obj = residual_core(eta, k_eta, p.grid.dx, p.c2, res, d_eta)
    return _EvalState(eta, k_eta, d_eta, res, obj)


def _adjoint_from_state(p: SolitonProblem, s: _EvalState, v: np.ndarray,
                        scale: float = 1.0) -> np.ndarray:
    """scale * [dJ(eta)]^T v using the cached K eta and D eta of a state."""
    kw1 = p.conv.apply((1.0 - s.eta) * v)
    out = np.empty_like(v)
    return adjoint_core(v, kw1, s.eta, s.d_eta, s.k_eta, p.grid.dx, p.c2, scale, out)


def _gradient_from_state(p: SolitonProblem, s: _EvalState) -> np.ndarray:
    return _adjoint_from_state(p, s, s.res, scale=2.0 * p.grid.dx)


def residual(p: SolitonProblem, eta: np.ndarray) -> np.ndarray:
    """The six-term residual vector J(eta); requires max(eta) < 1."""
    eta = np.asarray(eta, dtype=float)
    return _evaluate(p, eta).res


def jacobian_apply(p: SolitonProblem, eta: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Directional derivative dJ(eta) w, term by term as displayed above."""
    eta = np.asarray(eta, dtype=float)
    w = np.asarray(w, dtype=float)
    _check_admissible(eta)
    k_eta = p.conv.apply(eta)
    d_eta = _first_difference(eta, p.grid.dx)
    one_minus = 1.0 - eta
    coef = (2.0 * p.c2 * eta * (1.0 - 0.5 * eta) + d_eta * d_eta) / (
        2.0 * one_minus * one_minus
    )
    kw = p.conv.apply(w)
    out = _second_difference(w, p.grid.dx)
    out += (p.c2 + coef + 2.0 * k_eta) * w
    out -= 2.0 * kw
    out += (d_eta / one_minus) * _first_difference(w, p.grid.dx)
    out += 2.0 * eta * kw
    return out


def jacobian_adjoint_apply(p: SolitonProblem, eta: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Transpose action [dJ(eta)]^T v (A, K symmetric; D skew-symmetric)."""
    eta = np.asarray(eta, dtype=float)
    v = np.asarray(v, dtype=float)
    return _adjoint_from_state(p, _evaluate(p, eta), v)


def objective(p: SolitonProblem, eta: np.ndarray) -> float:
    """F(eta) = dx * ||J(eta)||^2."""
    eta = np.asarray(eta, dtype=float)
    return _evaluate(p, eta).obj


def gradient(p: SolitonProblem, eta: np.ndarray) -> np.ndarray:
    """grad F(eta) = 2 dx [dJ(eta)]^T J(eta)."""
    eta = np.asarray(eta, dtype=float)
    return _gradient_from_state(p, _evaluate(p, eta))
