"""Adaptive-step gradient descent on the residual objective.

The iteration is eta_{n+1} = eta_n - h * grad F(eta_n).  After each proposal
the objective is compared with the current value: if it increased (or the
proposal left the admissible set max(eta) < 1), h is halved and the same
step retried; otherwise the proposal is accepted.  Termination:

(i)   F < eps2            -> converged (ToleranceMet);
(ii)  h < h_min           -> not converged (StepUnderflow);
(iii) n reached n_max     -> not converged (IterationCap).

On acceptance h is multiplied by ``grow_factor``; the default 1 keeps h
non-increasing.  Descent starts from the projection of the explicit
closed-form soliton of the local (Dirac) problem,

    eta_c(x) = (2-c^2)/2 * sech^2(sqrt(2-c^2) x / 2),  0 < c < sqrt(2),

which is far enough from the trivial state eta = 0 to reach nontrivial
profiles for the nonlocal potentials.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._kernels import propose_core
from .grid_ops import Grid
from .potentials import Family, PotentialSpec
from .residual import (
    ETA_LIMIT,
    SolitonProblem,
    _evaluate,
    _gradient_from_state,
    make_problem,
)

__all__ = [
    "SolverOptions",
    "SolveResult",
    "SweepEntry",
    "Termination",
    "SpeedOutOfRange",
    "BadInitialGuess",
    "initial_guess",
    "solve",
    "sweep_speeds",
    "sweep_lambda",
]

SQRT2 = np.sqrt(2.0)

# Floor for trivial-state detection (exact collapses, eta identically ~0).
TRIVIAL_TOL = 1e-6
# Tolerance-relative part: a terminal state whose amplitude sits below the
# resolution of the requested residual tolerance is indistinguishable from
# the constant background at that accuracy.  The descent stops at F < eps2,
# so a collapse toward zero halts with ||eta|| of order sqrt(eps2), never at
# machine-zero amplitude.
TRIVIAL_REL = 0.5


def _trivial_threshold(eps2: float) -> float:
    return max(TRIVIAL_TOL, TRIVIAL_REL * float(np.sqrt(eps2)))


# Accepted steps between recomputations of the tracked K*eta (the descent
# updates it by linearity; a periodic fresh apply bounds roundoff drift).
_REFRESH_EVERY = 8192


class SpeedOutOfRange(ValueError):
    """No initializer exists outside 0 < c < sqrt(2)."""


class BadInitialGuess(ValueError):
    """The starting vector is inadmissible (max(eta0) >= 1)."""


class Termination(enum.Enum):
    TOLERANCE_MET = "ToleranceMet"
    STEP_UNDERFLOW = "StepUnderflow"
    ITERATION_CAP = "IterationCap"


@dataclass(frozen=True)
class SolverOptions:
    """Descent parameters; eps2 is the convergence target on F = dx*||J||^2."""

    eps2: float
    h0: float = 0.1
    h_min: float = 1e-13
    n_max: int = 2_000_000_000
    grow_factor: float = 1.0
    record_trace: bool = False

    def __post_init__(self) -> None:
        if not self.eps2 > 0:
            raise ValueError("eps2 must be positive")
        if not (0 < self.h_min < self.h0):
            raise ValueError("need 0 < h_min < h0")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.grow_factor < 1.0:
            raise ValueError("grow_factor must be >= 1")


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Outcome of one descent run.

    ``converged`` is exactly ``termination is TOLERANCE_MET``, which is
    exactly ``final_objective < eps2``.  ``iterations`` counts accepted
    steps.  ``is_trivial`` flags terminal states indistinguishable from the
    constant background at the requested accuracy (amplitude below
    max(1e-6, sqrt(eps2)/2)).  ``trace`` (when recorded) holds (n, F, h) per
    accepted step, including the starting state, and is non-increasing in F.
    """

    eta: np.ndarray
    converged: bool
    termination: Termination
    iterations: int
    final_objective: float
    is_trivial: bool
    trace: list[tuple[int, float, float]] | None = None


def initial_guess(grid: Grid, c: float) -> np.ndarray:
    """Projection of the explicit Dirac-potential soliton onto the grid."""
    if not 0.0 < c < SQRT2:
        raise SpeedOutOfRange(f"initializer requires 0 < c < sqrt(2), got c = {c:g}")
    amp = (2.0 - c * c) / 2.0
    width = np.sqrt(2.0 - c * c) / 2.0
    return amp / np.cosh(width * grid.nodes) ** 2


def _finish(state, termination: Termination, n: int, eps2: float,
            trace: list | None) -> SolveResult:
    eta = state.eta.copy()
    return SolveResult(
        eta=eta,
        converged=termination is Termination.TOLERANCE_MET,
        termination=termination,
        iterations=n,
        final_objective=state.obj,
        is_trivial=float(np.max(np.abs(eta))) < _trivial_threshold(eps2),
        trace=trace,
    )


def solve(p: SolitonProblem, opts: SolverOptions, eta0: np.ndarray) -> SolveResult:
    """Run the adaptive-step descent from eta0 until one criterion fires."""
    eta0 = np.array(eta0, dtype=float)
    if eta0.shape != (p.grid.N,):
        raise ValueError(f"eta0 must have length {p.grid.N}")
    if np.max(eta0) >= ETA_LIMIT:
        raise BadInitialGuess("initial guess has max(eta) >= 1")

    conv = p.conv
    state = _evaluate(p, eta0)
    h = opts.h0
    n = 0
    trace = [(0, state.obj, h)] if opts.record_trace else None
    eta_buf = np.empty_like(eta0)
    k_buf = np.empty_like(eta0)

    while True:
        if state.obj < opts.eps2:
            return _finish(state, Termination.TOLERANCE_MET, n, opts.eps2, trace)
        if n >= opts.n_max:
            return _finish(state, Termination.ITERATION_CAP, n, opts.eps2, trace)

        g = _gradient_from_state(p, state)
        kg = conv.apply(g)

        while True:
            # proposal buffers hold eta - h g and the linear update of K eta
            max_eta = propose_core(state.eta, g, state.k_eta, kg, h, eta_buf, k_buf)
            if max_eta < ETA_LIMIT:
                new_state = _evaluate(p, eta_buf, k_buf)
                if new_state.obj <= state.obj:
                    break
            h *= 0.5
            if h < opts.h_min:
                return _finish(state, Termination.STEP_UNDERFLOW, n, opts.eps2, trace)

        state = new_state
        eta_buf = np.empty_like(eta0)  # the old buffers now live in the state
        k_buf = np.empty_like(eta0)
        n += 1
        h *= opts.grow_factor
        if trace is not None:
            trace.append((n, state.obj, h))
        if n % _REFRESH_EVERY == 0:
            state.k_eta = conv.apply(state.eta)


@dataclass(frozen=True, eq=False)
class SweepEntry:
    """One sweep point: either a solve result or a per-entry error message."""

    param: float
    result: SolveResult | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


def _solve_speed(spec: PotentialSpec, grid: Grid, opts: SolverOptions,
                 c: float, allow_offgrid: bool) -> SweepEntry:
    from .grid_ops import build_convolution

    try:
        eta0 = initial_guess(grid, c)
        p = make_problem(spec, grid, c,
                         conv=build_convolution(spec, grid, allow_offgrid))
        return SweepEntry(param=c, result=solve(p, opts, eta0))
    except (SpeedOutOfRange, ValueError) as exc:
        return SweepEntry(param=c, result=None, error=str(exc))


def sweep_speeds(spec: PotentialSpec, grid: Grid, opts: SolverOptions,
                 speeds: Sequence[float], jobs: int = 1,
                 allow_offgrid_shifts: bool = False) -> list[SweepEntry]:
    """Independent solves per speed, each cold-started from initial_guess.

    Entries come back in input order.  ``jobs > 1`` dispatches solves to a
    process pool; each solve owns its state, so results are identical to the
    sequential run.
    """
    speeds = list(speeds)
    if not speeds:
        return []
    if jobs > 1 and len(speeds) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(speeds))) as pool:
            futures = [
                pool.submit(_solve_speed, spec, grid, opts, c, allow_offgrid_shifts)
                for c in speeds
            ]
            return [f.result() for f in futures]
    from .grid_ops import build_convolution

    try:
        conv = build_convolution(spec, grid, allow_offgrid_shifts)
    except ValueError as exc:
        return [SweepEntry(param=c, result=None, error=str(exc)) for c in speeds]
    out = []
    for c in speeds:
        try:
            p = SolitonProblem(spec=spec, grid=grid, conv=conv, c=float(c))
            out.append(SweepEntry(param=c, result=solve(p, opts, initial_guess(grid, c))))
        except (SpeedOutOfRange, ValueError) as exc:
            out.append(SweepEntry(param=c, result=None, error=str(exc)))
    return out


def sweep_lambda(family: Family, fixed: Mapping[str, float], c: float, grid: Grid,
                 opts: SolverOptions, lambdas: Sequence[float],
                 continuation: bool = False, jobs: int = 1,
                 allow_offgrid_shifts: bool = False) -> list[SweepEntry]:
    """Solve at fixed speed for each lambda in the given order.

    With ``continuation=False`` every solve cold-starts from initial_guess;
    with ``continuation=True`` each solve warm-starts from the previous
    converged nontrivial profile (inherently sequential).  Inadmissible
    parameters produce per-entry errors without aborting the sweep.
    """
    lambdas = list(lambdas)
    if not lambdas:
        return []

    def build_spec(lam: float) -> PotentialSpec:
        return PotentialSpec(family, lam=lam, **dict(fixed))

    if not continuation and jobs > 1 and len(lambdas) > 1:
        tasks = []
        with ProcessPoolExecutor(max_workers=min(jobs, len(lambdas))) as pool:
            for lam in lambdas:
                tasks.append(pool.submit(_sweep_lambda_entry, family, dict(fixed),
                                         c, grid, opts, lam, allow_offgrid_shifts, None))
            return [t.result() for t in tasks]

    out: list[SweepEntry] = []
    warm: np.ndarray | None = None
    for lam in lambdas:
        entry = _sweep_lambda_entry(family, dict(fixed), c, grid, opts, lam,
                                    allow_offgrid_shifts, warm if continuation else None)
        out.append(entry)
        if continuation and entry.ok and entry.result.converged and not entry.result.is_trivial:
            warm = entry.result.eta
    return out


def _sweep_lambda_entry(family: Family, fixed: dict, c: float, grid: Grid,
                        opts: SolverOptions, lam: float, allow_offgrid: bool,
                        warm: np.ndarray | None) -> SweepEntry:
    from .grid_ops import build_convolution

    try:
        spec = PotentialSpec(family, lam=lam, **fixed)
        p = make_problem(spec, grid, c,
                         conv=build_convolution(spec, grid, allow_offgrid))
        eta0 = initial_guess(grid, c) if warm is None else warm
        return SweepEntry(param=lam, result=solve(p, opts, eta0))
    except (SpeedOutOfRange, ValueError) as exc:
        return SweepEntry(param=lam, result=None, error=str(exc))
