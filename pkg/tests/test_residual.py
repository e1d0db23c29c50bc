import numpy as np
import pytest

from darkwave import (
    PotentialSpec,
    build_convolution,
    build_grid,
    gradient,
    jacobian_adjoint_apply,
    jacobian_apply,
    make_problem,
    objective,
    residual,
)
from darkwave.residual import EtaReachesOne

from conftest import soliton_profile

FAMILIES = [
    PotentialSpec.e1(1.0, 0.4),
    PotentialSpec.e2(1.0),
    PotentialSpec.e3(2.0),
    PotentialSpec.e4(2.0),
    PotentialSpec.e5(4.0),
    PotentialSpec.e6(),
]


def small_problem(spec, c=0.7):
    grid = build_grid(20.0, 99)  # dx = 0.2, E4 shifts land on the grid
    return make_problem(spec, grid, c)


def literal_residual(p, eta):
    """Unoptimized term-by-term re-implementation with dense matrices."""
    n = p.grid.N
    dx = p.grid.dx
    D = np.zeros((n, n))
    A = np.zeros((n, n))
    for k in range(n):
        A[k, k] = -2.0 / dx**2
        if k > 0:
            D[k, k - 1] = -1.0 / (2.0 * dx)
            A[k, k - 1] = 1.0 / dx**2
        if k < n - 1:
            D[k, k + 1] = 1.0 / (2.0 * dx)
            A[k, k + 1] = 1.0 / dx**2
    conv = p.conv.apply(eta)
    d_eta = D @ eta
    term1 = A @ eta
    term2 = -2.0 * conv
    term3 = p.c * p.c * eta
    term4 = p.c * p.c * eta * eta / (2.0 * (1.0 - eta))
    term5 = d_eta * d_eta / (2.0 * (1.0 - eta))
    term6 = 2.0 * conv * eta
    return term1 + term2 + term3 + term4 + term5 + term6


def test_residual_zero_state():
    p = small_problem(PotentialSpec.e2(1.0))
    np.testing.assert_array_equal(residual(p, np.zeros(p.grid.N)), np.zeros(p.grid.N))
    assert objective(p, np.zeros(p.grid.N)) == 0.0
    np.testing.assert_array_equal(gradient(p, np.zeros(p.grid.N)), np.zeros(p.grid.N))


def test_eta_reaching_one_rejected():
    p = small_problem(PotentialSpec.e2(1.0))
    eta = np.zeros(p.grid.N)
    eta[3] = 1.0
    for op in (residual, objective, gradient):
        with pytest.raises(EtaReachesOne):
            op(p, eta)
    with pytest.raises(EtaReachesOne):
        jacobian_apply(p, eta, eta)
    with pytest.raises(EtaReachesOne):
        jacobian_adjoint_apply(p, eta, eta)


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_residual_matches_literal_reimplementation(spec, rng):
    p = small_problem(spec)
    for _ in range(5):
        eta = 0.6 * (2.0 * rng.random(p.grid.N) - 1.0)
        got = residual(p, eta)
        ref = literal_residual(p, eta)
        np.testing.assert_allclose(got, ref, atol=1e-14 * max(1.0, np.max(np.abs(ref))))


def test_exact_soliton_residual_small():
    # near-delta Gaussian stands in for the Dirac potential
    grid = build_grid(50.0, 999)
    p = make_problem(PotentialSpec.e2(1e-3), grid, 0.5)
    eta = soliton_profile(grid, 0.5)
    assert objective(p, eta) <= grid.dx / 4.0


def test_objective_is_dx_times_norm(rng):
    p = small_problem(PotentialSpec.e3(2.0))
    eta = 0.4 * (2.0 * rng.random(p.grid.N) - 1.0)
    J = residual(p, eta)
    assert objective(p, eta) == pytest.approx(p.grid.dx * float(J @ J), rel=1e-12)


def test_jacobian_at_zero_is_linear_part(rng):
    p = small_problem(PotentialSpec.e2(1.0))
    w = rng.standard_normal(p.grid.N)
    got = jacobian_apply(p, np.zeros(p.grid.N), w)
    from darkwave import apply_second_derivative

    ref = apply_second_derivative(p.grid, w) - 2.0 * p.conv.apply(w) + p.c2 * w
    np.testing.assert_allclose(got, ref, atol=1e-13)
    got_t = jacobian_adjoint_apply(p, np.zeros(p.grid.N), w)
    np.testing.assert_allclose(got_t, ref, atol=1e-13)


def test_jacobian_linearity(rng):
    p = small_problem(PotentialSpec.e5(4.0))
    eta = 0.5 * (2.0 * rng.random(p.grid.N) - 1.0)
    w1 = rng.standard_normal(p.grid.N)
    w2 = rng.standard_normal(p.grid.N)
    a, b = 1.7, -0.3
    lhs = jacobian_apply(p, eta, a * w1 + b * w2)
    rhs = a * jacobian_apply(p, eta, w1) + b * jacobian_apply(p, eta, w2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1.0, np.max(np.abs(rhs))))


def test_jacobian_is_residual_derivative(rng):
    # central differences of the residual converge at second order
    p = small_problem(PotentialSpec.e1(1.0, 0.4))
    eta = 0.4 * (2.0 * rng.random(p.grid.N) - 1.0)
    w = rng.standard_normal(p.grid.N)
    jw = jacobian_apply(p, eta, w)
    errs = []
    for tau in (1e-3, 1e-4):
        fd = (residual(p, eta + tau * w) - residual(p, eta - tau * w)) / (2.0 * tau)
        errs.append(float(np.max(np.abs(fd - jw))))
    ratio = errs[0] / errs[1]
    assert 50.0 <= ratio <= 200.0  # O(tau^2)


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_adjoint_identity(spec, rng):
    p = small_problem(spec)
    for _ in range(100 // len(FAMILIES) + 1):
        eta = 0.5 * (2.0 * rng.random(p.grid.N) - 1.0)
        w = rng.standard_normal(p.grid.N)
        v = rng.standard_normal(p.grid.N)
        a = float(jacobian_apply(p, eta, w) @ v)
        b = float(w @ jacobian_adjoint_apply(p, eta, v))
        assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.label())
def test_gradient_matches_directional_fd(spec, rng):
    p = small_problem(spec)
    tau = 1e-5
    for _ in range(20):
        eta = 0.5 * (2.0 * rng.random(p.grid.N) - 1.0)
        w = rng.standard_normal(p.grid.N)
        fd = (objective(p, eta + tau * w) - objective(p, eta - tau * w)) / (2.0 * tau)
        an = float(gradient(p, eta) @ w)
        assert abs(fd - an) <= 1e-6 * max(abs(an), 1e-12)


def test_evenness_preserved():
    grid = build_grid(20.0, 99)
    p = make_problem(PotentialSpec.e2(1.0), grid, 0.5)
    eta = soliton_profile(grid, 0.5) * 0.9
    for out in (residual(p, eta), gradient(p, eta)):
        np.testing.assert_allclose(out, out[::-1], atol=1e-12 * max(1.0, np.max(np.abs(out))))


def test_objective_reflection_invariant(rng):
    p = small_problem(PotentialSpec.e3(2.0))
    eta = 0.5 * (2.0 * rng.random(p.grid.N) - 1.0)
    assert objective(p, eta) == pytest.approx(objective(p, eta[::-1]), rel=1e-12)


def test_problem_requires_matching_grid():
    grid_a = build_grid(20.0, 99)
    grid_b = build_grid(20.0, 101)
    conv = build_convolution(PotentialSpec.e2(1.0), grid_a)
    from darkwave import SolitonProblem

    with pytest.raises(ValueError):
        SolitonProblem(spec=PotentialSpec.e2(1.0), grid=grid_b, conv=conv, c=0.5)
    with pytest.raises(ValueError):
        SolitonProblem(spec=PotentialSpec.e2(1.0), grid=grid_a, conv=conv, c=-0.5)
