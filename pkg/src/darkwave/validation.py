"""Built-in oracle suite behind the ``validate`` CLI command.

Each check is self-contained and returns pass/fail plus a measured number.
The suite covers the identities the solver silently relies on (operator
symmetry, Jacobian adjoint, analytic gradient), the near-delta limit of the
sampled-kernel convolution, and the closed-form Landau speeds.  Two mutation
checks guard the most fragile implementation choices by verifying the
oracles actually catch them: a sampled kernel stripped of its dx quadrature
weight must fail the near-delta check, and an adjoint with the sign of its
first-derivative term flipped must fail the adjoint identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import closed_form_landau, landau_speed
from .grid_ops import (
    SampledKernelOperator,
    _first_difference,
    build_convolution,
    build_grid,
)
from .potentials import PotentialSpec, evaluate_kernel
from .residual import (
    gradient,
    jacobian_adjoint_apply,
    jacobian_apply,
    make_problem,
    objective,
)

__all__ = ["CheckResult", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name:34s} measured {self.measured:.3e} "
            f"(threshold {self.threshold:.1e}) {self.note}"
        )


def _test_specs() -> list[PotentialSpec]:
    return [
        PotentialSpec.e1(1.0, 0.4),
        PotentialSpec.e2(1.0),
        PotentialSpec.e3(2.0),
        PotentialSpec.e4(2.0),
        PotentialSpec.e5(4.0),
        PotentialSpec.e6(),
    ]


def _symmetry_check() -> CheckResult:
    rng = np.random.default_rng(2024)
    grid = build_grid(20.0, 99)  # dx = 0.2 keeps the E4 shifts on-grid
    worst = 0.0
    for spec in _test_specs():
        op = build_convolution(spec, grid)
        for _ in range(20):
            v = rng.standard_normal(grid.N)
            w = rng.standard_normal(grid.N)
            a = float(op.apply(v) @ w)
            b = float(v @ op.apply(w))
            worst = max(worst, abs(a - b) / max(abs(a), 1e-30))
    return CheckResult("operator symmetry <Kv,w>=<v,Kw>", worst <= 1e-10, worst, 1e-10)


def _adjoint_check(flip_d_sign: bool = False) -> float:
    rng = np.random.default_rng(7)
    grid = build_grid(20.0, 99)
    worst = 0.0
    for spec in _test_specs():
        p = make_problem(spec, grid, 0.7)
        for _ in range(20):
            eta = 0.5 * (2.0 * rng.random(grid.N) - 1.0)
            w = rng.standard_normal(grid.N)
            v = rng.standard_normal(grid.N)
            jt_v = jacobian_adjoint_apply(p, eta, v)
            if flip_d_sign:
                # the correct transpose carries -D(q v); flipping it adds 2 D(q v)
                q = _first_difference(eta, grid.dx) / (1.0 - eta)
                jt_v = jt_v + 2.0 * _first_difference(q * v, grid.dx)
            a = float(jacobian_apply(p, eta, w) @ v)
            b = float(w @ jt_v)
            worst = max(worst, abs(a - b) / max(abs(a), 1e-30))
    return worst


def _gradient_fd_check() -> CheckResult:
    rng = np.random.default_rng(11)
    grid = build_grid(20.0, 99)
    tau = 1e-5
    worst = 0.0
    for spec in _test_specs():
        p = make_problem(spec, grid, 0.7)
        for _ in range(5):
            eta = 0.5 * (2.0 * rng.random(grid.N) - 1.0)
            w = rng.standard_normal(grid.N)
            fd = (objective(p, eta + tau * w) - objective(p, eta - tau * w)) / (2 * tau)
            an = float(gradient(p, eta) @ w)
            worst = max(worst, abs(fd - an) / max(abs(an), 1e-30))
    return CheckResult("gradient vs central differences", worst <= 1e-6, worst, 1e-6)


def _delta_limit_deviation(op, grid) -> float:
    v = np.exp(-((grid.nodes / 8.0) ** 2))
    return float(np.max(np.abs(op.apply(v) - v)) / np.max(np.abs(v)))


def _delta_limit_check() -> CheckResult:
    grid = build_grid(50.0, 999)
    worst = 0.0
    # near-delta at the grid scale exercises the sampled-kernel backend;
    # far below the grid scale the potential is promoted to the spectral one
    for lam in (grid.dx, 1e-3):
        op = build_convolution(PotentialSpec.e2(lam), grid)
        worst = max(worst, _delta_limit_deviation(op, grid))
    return CheckResult("near-delta kernel ~ identity", worst <= 1e-3, worst, 1e-3)


def _landau_check() -> CheckResult:
    cases = [
        PotentialSpec.e1(1.0, 0.4),
        PotentialSpec.e1(0.5, -1.0),
        PotentialSpec.e2(0.5),
        PotentialSpec.e2(1.0),
        PotentialSpec.e2(3.0),
        PotentialSpec.e5(1.0),
        PotentialSpec.e5(4.0),
    ]
    worst = 0.0
    for spec in cases:
        ref = closed_form_landau(spec)
        got = landau_speed(spec).landau_speed
        worst = max(worst, abs(got - ref))
    return CheckResult("Landau speed vs closed forms", worst <= 1e-3, worst, 1e-3)


def _mutation_dx_weight() -> CheckResult:
    grid = build_grid(50.0, 999)
    lam = grid.dx
    samples = evaluate_kernel(PotentialSpec.e2(lam), grid.nodes)
    mutant = SampledKernelOperator(grid, samples, tap_weight=1.0)  # weight stripped
    dev = _delta_limit_deviation(mutant, grid)
    return CheckResult(
        "mutation: dx weight removal detected", dev > 1e-1, dev, 1e-1,
        note="(mutant must fail the near-delta check)",
    )


def _mutation_adjoint_sign() -> CheckResult:
    worst = _adjoint_check(flip_d_sign=True)
    return CheckResult(
        "mutation: adjoint D-sign flip detected", worst > 1e-6, worst, 1e-6,
        note="(mutant must fail the adjoint identity)",
    )


def run_all_checks() -> list[CheckResult]:
    """Run the full oracle suite; all checks pass on a correct build."""
    adjoint = _adjoint_check()
    return [
        _symmetry_check(),
        CheckResult("Jacobian adjoint identity", adjoint <= 1e-10, adjoint, 1e-10),
        _gradient_fd_check(),
        _delta_limit_check(),
        _landau_check(),
        _mutation_dx_weight(),
        _mutation_adjoint_sign(),
    ]
