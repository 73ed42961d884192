import numpy as np
import pytest
from hypothesis import given, strategies as st

from cgolab.exceptions import DivergenceError, InvalidInputError
from cgolab.grid import GridSpec, SpaceTimeField, SpatialField
from cgolab.potentials import Potential, gaussian_bump, random_smooth_potential, smooth_time_profile
from cgolab.propagator import (evolve, free_propagate, initial_to_final, solve_duhamel,
                               solve_final_value)

from conftest import rel


def periodized_gaussian(grid, t, s=1.2, k=(1.0, 0.5)):
    """Closed-form free Gaussian packet summed over periodic images."""
    L = grid.half_width
    a = s**2 + 2j * t
    out = 1.0
    for x, kk in zip(grid.coords(), k):
        out = out * sum(np.sqrt(s**2 / a) * np.exp(-(x + 2 * L * m - 2 * kk * t) ** 2 / (2 * a)
                                                     + 1j * kk * (x + 2 * L * m) - 1j * kk**2 * t)
                        for m in range(-6, 7))
    return out


def packet(grid, c=(0.5, -0.3), k=(1.0, -0.5), s=1.0):
    x = grid.coords()
    r2 = sum((xi - ci) ** 2 for xi, ci in zip(x, c))
    return np.exp(-r2 / (2 * s**2) + 1j * sum(ki * xi for ki, xi in zip(k, x)))


def test_free_propagate_identity_and_mode(grid):
    f = SpatialField(grid, packet(grid))
    assert np.array_equal(free_propagate(f, 0.0).values, f.values)
    kappa = np.array([grid.freq_axis[2], grid.freq_axis[-1]])
    mode = np.exp(1j * (kappa[0] * grid.coords()[0] + kappa[1] * grid.coords()[1]))
    out = free_propagate(SpatialField(grid, mode), 0.7).values
    assert rel(out, np.exp(-1j * kappa @ kappa * 0.7) * mode) < 1e-12


def test_free_propagate_matches_analytic_gaussian(grid):
    out = free_propagate(SpatialField(grid, periodized_gaussian(grid, 0.0)), 1.0).values
    assert rel(out, periodized_gaussian(grid, 1.0)) < 1e-10


def test_free_propagate_preserves_norm(grid, rng):
    v = rng.normal(size=grid.space_shape) + 1j * rng.normal(size=grid.space_shape)
    f = SpatialField(grid, v)
    assert free_propagate(f, 0.37).norm() == pytest.approx(f.norm(), rel=1e-12)


def test_evolve_with_zero_potential_matches_free_flow(grid):
    f = SpatialField(grid, packet(grid))
    traj = evolve(f, Potential.zero(grid))
    assert len(traj) == grid.n_time
    for k in (1, 40, grid.n_time - 1):
        assert rel(traj.values[k], free_propagate(f, grid.times[k]).values) < 1e-12


def test_real_potential_preserves_norm(grid):
    V = gaussian_bump(grid, 1.0, 1.0, None, smooth_time_profile(grid.horizon))
    n = evolve(SpatialField(grid, packet(grid)), V).norms()
    assert np.ptp(n) / n[0] < 1e-12


def test_second_order_self_convergence(grid):
    f = packet(grid)

    def final(nt):
        g = grid.with_time_steps(nt)
        V = gaussian_bump(g, 1.0, 1.0, None, smooth_time_profile(g.horizon))
        return initial_to_final(SpatialField(g, f), V).values

    a, b, c = final(65), final(129), final(257)
    ratio = np.linalg.norm(a - b) / np.linalg.norm(b - c)
    assert 3.2 <= ratio <= 4.8


def test_time_independent_potential_converges_at_second_order(grid):
    f = packet(grid)
    finals = [initial_to_final(SpatialField(grid.with_time_steps(nt), f),
                               gaussian_bump(grid.with_time_steps(nt), 2.0, 1.0)).values
              for nt in (65, 129, 257)]
    ratio = np.linalg.norm(finals[0] - finals[1]) / np.linalg.norm(finals[1] - finals[2])
    assert 3.2 <= ratio <= 4.8


def test_initial_to_final_on_mode_and_batches(grid):
    k = np.array([grid.freq_axis[1], grid.freq_axis[3]])
    mode = np.exp(1j * (k[0] * grid.coords()[0] + k[1] * grid.coords()[1]))
    out = initial_to_final(SpatialField(grid, mode), Potential.zero(grid)).values
    assert rel(out, np.exp(-1j * (k @ k) * grid.horizon) * mode) < 1e-12
    V = gaussian_bump(grid, 0.5)
    batch = np.stack([packet(grid), mode])
    outs = initial_to_final(batch, V)
    assert rel(outs[1], initial_to_final(SpatialField(grid, mode), V).values) < 1e-13


def test_initial_to_final_is_linear_and_unitary(grid, rng):
    V = random_smooth_potential(grid, rng, 1.0)
    f, g = packet(grid), packet(grid, (-1, 1), (0, 2))
    a, b = 0.3 - 1j, 2.0 + 0.5j
    lhs = initial_to_final(SpatialField(grid, a * f + b * g), V).values
    rhs = a * initial_to_final(SpatialField(grid, f), V).values + b * initial_to_final(
        SpatialField(grid, g), V).values
    assert rel(lhs, rhs) < 1e-10
    F = SpatialField(grid, f)
    assert initial_to_final(F, V).norm() == pytest.approx(F.norm(), rel=1e-12)


def test_final_value_solution(grid, rng):
    g = SpatialField(grid, packet(grid, (1, 0), (0, 1)))
    v = solve_final_value(g, Potential.zero(grid))
    assert np.array_equal(v.final.values, g.values)
    assert rel(v.values[0], free_propagate(g, -grid.horizon).values) < 1e-12
    V = random_smooth_potential(grid, rng, 1.0)
    f = SpatialField(grid, packet(grid))
    back = solve_final_value(initial_to_final(f, V), V).values[0]
    assert rel(back, f.values) < 1e-10


def test_adjoint_pairing_is_conserved(grid, rng):
    V = random_smooth_potential(grid, rng, 1.0)
    u = evolve(SpatialField(grid, packet(grid)), V)
    v = solve_final_value(SpatialField(grid, packet(grid, (1, 0), (0, 1))), V)
    pairs = np.array([np.vdot(v.values[k], u.values[k]) for k in range(grid.n_time)])
    assert np.max(np.abs(pairs - pairs[0])) / abs(pairs[0]) < 1e-8
    assert abs(pairs[-1] - pairs[0]) / abs(pairs[0]) < 1e-10


def test_duhamel_zero_source(grid):
    F = SpaceTimeField(grid, np.zeros((grid.n_time,) + grid.space_shape))
    assert not np.any(solve_duhamel(F, gaussian_bump(grid)).values)


def test_duhamel_manufactured_solution(grid):
    x, y = grid.coords()
    r2 = x**2 + y**2
    phi = np.exp(-r2 / 2)
    lap = (r2 - 2) * phi
    t = grid.times.reshape(-1, 1, 1)
    u = np.sin(np.pi * t) * phi
    F = 1j * np.pi * np.cos(np.pi * t) * phi + np.sin(np.pi * t) * lap
    out = solve_duhamel(SpaceTimeField(grid, F), Potential.zero(grid)).values
    assert rel(out, u) < 1e-3


def test_duhamel_linear_in_source(grid, rng):
    V = gaussian_bump(grid, 0.5)
    shape = (grid.n_time,) + grid.space_shape
    base = packet(grid)[None] * np.exp(-grid.times)[:, None, None]
    F1, F2 = base, base * (1 + 1j * grid.coords()[0])[None]
    u1 = solve_duhamel(SpaceTimeField(grid, F1), V).values
    u2 = solve_duhamel(SpaceTimeField(grid, F2), V).values
    u12 = solve_duhamel(SpaceTimeField(grid, 2 * F1 - 1j * F2), V).values
    assert rel(u12, 2 * u1 - 1j * u2) < 1e-10
    assert shape == u1.shape


def test_divergence_reports_step(grid):
    V = Potential(grid, 1e6j * np.ones(grid.space_shape))
    with pytest.raises(DivergenceError) as info:
        evolve(SpatialField(grid, packet(grid)), V)
    assert info.value.step >= 1


def test_grid_mismatch_rejected(grid, small_grid):
    with pytest.raises(InvalidInputError):
        evolve(SpatialField(small_grid, np.ones(small_grid.space_shape)), Potential.zero(grid))


@given(st.integers(0, 2**32 - 1))
def test_each_step_is_unitary_for_real_potentials(seed):
    g = GridSpec(n_space=16, n_time=9)
    r = np.random.default_rng(seed)
    V = random_smooth_potential(g, r, float(r.uniform(0.1, 5.0)))
    f = r.normal(size=g.space_shape) + 1j * r.normal(size=g.space_shape)
    n = evolve(SpatialField(g, f), V).norms()
    assert np.max(np.abs(n - n[0])) <= 1e-12 * n[0]
