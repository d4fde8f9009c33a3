import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_bvp

from hammerstein.operators import estimate_monotonicity_constant
from hammerstein.pendulum import (
    PendulumProblem,
    assemble_hammerstein,
    build_green_function,
    compute_g,
    default_solve_config,
    green_kernel_matrix,
    second_difference,
    solve_green_conditions,
    solve_pendulum,
    trapezoid_weights,
    uniform_grid,
    verify_green,
)
from hammerstein.solver import SolveConfig, solve_hammerstein
from hammerstein.spaces import ConjugatePair, GridVector, UnsupportedConfigurationError

G = build_green_function()


def collocation_oracle(a, c, t):
    """Independent solve of v'' + a^2 sin v = c sin(2 pi x), v(0) = v(1) = 0."""

    def rhs(x, y):
        return np.vstack([y[1], c * np.sin(2 * np.pi * x) - a**2 * np.sin(y[0])])

    def bc(ya, yb):
        return np.array([ya[0], yb[0]])

    mesh = np.linspace(0, 1, 41)
    sol = solve_bvp(rhs, bc, mesh, np.zeros((2, mesh.size)), tol=1e-10, max_nodes=100_000)
    assert sol.success
    return sol.sol(t)[0]


def test_green_examples():
    assert G(0.3, 0.6) == pytest.approx(-0.12)
    assert G(0.6, 0.3) == pytest.approx(-0.12)
    assert G(0.0, 0.5) == 0.0 and G(1.0, 0.5) == 0.0


def test_green_coefficients_match_linear_conditions():
    x = np.random.default_rng(0).uniform(0, 1, 1000)
    solved = solve_green_conditions(x)
    closed = G.coefficients(x)
    for s, c in zip(solved, closed):
        assert np.max(np.abs(s - c)) <= 1e-12


def test_green_invariants_at_random_probes():
    rng = np.random.default_rng(1)
    t, x = rng.uniform(0, 1, 1000), rng.uniform(0, 1, 1000)
    a, b, c, d = G.coefficients(x)
    assert np.max(np.abs((a + b * x) - x * (x - 1))) <= 1e-12
    assert np.max(np.abs((c + d * x) - x * (x - 1))) <= 1e-12
    assert np.max(np.abs(G(0.0, x))) <= 1e-12 and np.max(np.abs(G(1.0, x))) <= 1e-12
    assert np.max(np.abs(G.dt(x, "right") - G.dt(x, "left") - 1.0)) <= 1e-12
    assert np.max(np.abs(G(t, x) - G(x, t))) <= 1e-12


def test_kernel_matrix_examples():
    m = green_kernel_matrix(G, uniform_grid(3))
    assert not m[0].any() and not m[2].any()
    assert m[1, 1] == pytest.approx(-0.25)
    big = green_kernel_matrix(G, uniform_grid(57))
    assert np.max(np.abs(big - big.T)) <= 1e-15


def test_grid_and_weights():
    with pytest.raises(ValueError):
        uniform_grid(2)
    for n in (3, 10, 101):
        assert trapezoid_weights(uniform_grid(n)).sum() == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        trapezoid_weights([0.0, 0.5, 0.5, 1.0])


def test_compute_g_zero_and_constant():
    t = uniform_grid(201)
    assert not compute_g(lambda x: 0 * x, t).coords.any()
    err = np.max(np.abs(compute_g(lambda x: np.ones_like(x), t).coords - (t**2 - t) / 2))
    assert err <= 1e-3


def test_compute_g_sine_matches_analytic():
    t = uniform_grid(201)
    g = compute_g(lambda x: np.sin(2 * np.pi * x), t).coords
    exact = -np.sin(2 * np.pi * t) / (4 * np.pi**2)
    assert np.max(np.abs(g - exact)) <= 2e-4


def test_quadrature_refinement_is_second_order():
    # for z = 1 the trapezoid rule integrates each linear branch exactly,
    # so refinement is checked on forcings with curvature
    def err(z, exact, n):
        t = uniform_grid(n)
        return np.max(np.abs(compute_g(z, t).coords - exact(t)))

    cases = [
        (lambda x: np.sin(2 * np.pi * x), lambda t: -np.sin(2 * np.pi * t) / (4 * np.pi**2)),
        (lambda x: x**2, lambda t: (t**4 - t) / 12),
    ]
    for z, exact in cases:
        for n in (21, 41, 81):
            assert err(z, exact, n) / err(z, exact, 2 * n - 1) >= 3.5


def test_compute_g_constant_is_exact_on_coarse_grid():
    t = uniform_grid(11)
    g = compute_g(lambda x: np.ones_like(x), t).coords
    assert np.max(np.abs(g - (t**2 - t) / 2)) <= 1e-14


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_compute_g_is_linear(alpha, beta):
    t = uniform_grid(31)
    z1, z2 = np.cos(3 * t), t**3
    lhs = compute_g(alpha * z1 + beta * z2, t).coords
    rhs = alpha * compute_g(z1, t).coords + beta * compute_g(z2, t).coords
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_verify_green_examples():
    t = uniform_grid(201)
    assert verify_green(G, lambda x: np.ones_like(x), t) <= 1e-2
    assert verify_green(G, lambda x: x, t) <= 1e-2
    assert verify_green(G, lambda x: 0 * x, t) == 0.0
    v = compute_g(lambda x: x, t).coords
    assert np.max(np.abs(v - (t**3 - t) / 6)) <= 1e-2
    with pytest.raises(UnsupportedConfigurationError):
        second_difference(np.zeros(4), [0.0, 0.1, 0.5, 1.0])
    with pytest.raises(ValueError):
        verify_green(G, lambda x: x, uniform_grid(4))


def test_problem_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        PendulumProblem(amplitude_a=0.0)
    with pytest.raises(ValueError):
        PendulumProblem(grid_size=2)
    prob = PendulumProblem(0.7, None, 31, {"kind": "constant", "c": 0.2})
    path = tmp_path / "p.json"
    path.write_text(json.dumps(prob.to_dict()))
    back = PendulumProblem.from_json(path)
    assert back.to_dict() == prob.to_dict()
    assert np.allclose(back.forcing_z(back.grid), 0.2)
    with pytest.raises(ValueError):
        PendulumProblem.from_dict({"forcing": {"kind": "square"}})


def test_assembly_dimensions_and_monotone_f():
    prob = PendulumProblem()
    disc = assemble_hammerstein(prob)
    assert disc.k_op.dim == disc.f_op.dim == prob.grid_size
    assert np.allclose(disc.k_op.kernel_matrix, green_kernel_matrix(G, disc.grid))
    assert np.allclose(disc.f_op.offset_g, -disc.g_vec.coords)
    eta = estimate_monotonicity_constant(
        disc.f_op, ConjugatePair(2.0), samples=2000, box=(-0.5, 0.5), weights=disc.weights
    )
    assert eta > 0


def test_minimal_grid_kernel():
    disc = assemble_hammerstein(PendulumProblem(grid_size=3))
    k = disc.k_op.kernel_matrix
    assert not k[0].any() and not k[2].any() and k[1, 1] != 0


def test_unforced_pendulum_stays_at_rest():
    prob = PendulumProblem(0.8, None, 21, {"kind": "zero"})
    disc = assemble_hammerstein(prob)
    assert not disc.g_vec.coords.any()
    cfg = default_solve_config(21, weights=disc.weights)
    tr = solve_hammerstein(disc.f_op, disc.k_op, cfg)
    assert tr.converged and not tr.final_u.coords.any()
    sol = solve_pendulum(prob)
    assert not sol.amplitude.coords.any() and sol.ode_residual == 0.0


def test_pendulum_against_collocation():
    prob = PendulumProblem(0.5, None, 101, {"kind": "sine", "c": 0.1})
    sol = solve_pendulum(prob)
    assert sol.trace.converged
    assert sol.ode_residual <= 5e-2
    oracle = collocation_oracle(0.5, 0.1, prob.grid)
    err = np.max(np.abs(sol.amplitude.coords - oracle))
    assert err <= 5e-3
    # the amplitude is itself only ~2.5e-3, so also demand 1% relative agreement
    assert err <= 1e-2 * np.max(np.abs(oracle))


def test_pendulum_grid_refinement():
    coarse = solve_pendulum(PendulumProblem(grid_size=51))
    fine = solve_pendulum(PendulumProblem(grid_size=101))
    assert np.max(np.abs(coarse.amplitude.coords - fine.amplitude.coords[::2])) <= 5e-3


def test_pendulum_requires_hilbert_space():
    cfg = default_solve_config(11)
    cfg = SolveConfig(ConjugatePair(3.0), cfg.tolerance, 10, cfg.schedule, GridVector(np.zeros(11)))
    with pytest.raises(UnsupportedConfigurationError):
        solve_pendulum(PendulumProblem(grid_size=11), cfg)


def test_unit_weight_config_is_reweighted():
    prob = PendulumProblem(grid_size=21)
    cfg = default_solve_config(21, weights=np.ones(21))
    a = solve_pendulum(prob, cfg)
    b = solve_pendulum(prob)
    assert np.array_equal(a.amplitude.coords, b.amplitude.coords)
