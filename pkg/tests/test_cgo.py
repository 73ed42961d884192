import numpy as np
import pytest
from hypothesis import given, strategies as st

from cgolab.cgo import (amplitude, apply_conjugated, assemble, build_cgo, frame_potential,
                        householder, make_phase, product_gram_rank, solve_remainder)
from cgolab.dyadic import WeightedNormParams, build_dyadic, potential_strip_sum, x_norm, y_norm
from cgolab.exceptions import DivergenceError, InvalidInputError, InvalidStateError
from cgolab.grid import EXTENDED, GridSpec, SpaceTimeField
from cgolab.potentials import Potential, gaussian_bump

from conftest import rel

G = GridSpec(n_space=32, n_time=33)


def gauss_psi(grid):
    return np.exp(-0.5 * grid.axis**2)


def test_householder_properties():
    assert np.array_equal(householder([0.0, 1.0]), np.eye(2))
    Q = householder(np.array([3.0, 4.0]) / 5)
    np.testing.assert_allclose(Q @ [0, 1], [0.6, 0.8], atol=1e-15)
    np.testing.assert_allclose(Q.T @ Q, np.eye(2), atol=1e-14)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3),
       st.sampled_from([1, -1]))
def test_phase_rotation_and_eikonal(nu, sign):
    ph = make_phase(nu, sign)
    Q = ph.rotation
    n = len(nu)
    assert np.allclose(Q.T @ Q, np.eye(n), atol=1e-12)
    # the frame axis e_n is carried onto sign * nu / |nu|
    assert np.allclose(sign * Q[:, -1], np.asarray(nu) / np.linalg.norm(nu), atol=1e-12)
    assert ph.eikonal_defect() <= 1e-12 * max(1.0, np.dot(nu, nu))
    assert ph.reflection_flag == (sign == -1)


def test_phase_validation():
    with pytest.raises(InvalidInputError):
        make_phase([0.0, 0.0])
    with pytest.raises(InvalidInputError):
        make_phase([1.0, 0.0], sign=2)


def test_free_exponential_solution_has_zero_conjugated_residual():
    one = np.ones((G.n_time_ext,) + G.space_shape, dtype=complex)
    assert np.abs(apply_conjugated(G, 5.0, one)).max() < 1e-12


def test_amplitude_of_transverse_mode():
    k = G.freq_axis[3]
    ph = make_phase((0.0, 4.0))
    us = amplitude(np.exp(1j * k * G.axis), ph, G).values
    t = G.times_ext.reshape(-1, 1, 1)
    y1 = G.coords()[0]
    expected = np.exp(-1j * k**2 * t) * np.exp(1j * k * y1) * np.ones(G.space_shape)
    assert rel(us, expected) < 1e-12


def test_amplitude_is_constant_along_nu_and_solves_the_equation():
    ph = make_phase((0.0, 4.0))
    us = amplitude(gauss_psi(G), ph, G).values
    dn = np.fft.ifft(1j * G.freq_axis[None, None, :] * np.fft.fft(us, axis=2), axis=2)
    assert np.abs(dn).max() < 1e-10 * np.abs(us).max()


def test_amplitude_strip_bound():
    ph = make_phase((0.0, 4.0))
    psi = gauss_psi(G)
    us = amplitude(psi, ph, G).values
    dec = build_dyadic(G, ph.frame_nu)
    l2 = dec.strip_l2(us)
    psi_norm = np.sqrt(np.sum(np.abs(psi) ** 2) * G.dx)
    for a1, a2 in dec.alphas():
        assert l2[a1, a2] <= 2.05 * 2 ** ((a1 + a2) / 2) * psi_norm


def test_amplitude_rejects_wrong_transverse_grid():
    with pytest.raises(InvalidInputError):
        amplitude(np.ones(7), make_phase((1.0, 0.0)), G)


def test_frame_potential_paths_agree():
    V = gaussian_bump(G, 0.5, 1.0, (0.7, -0.4))
    # axis-aligned: exact index mapping; oblique: function evaluation
    a = frame_potential(V, make_phase((4.0, 0.0)))
    ys = make_phase((4.0, 0.0)).frame_coords(G)
    b = np.broadcast_to(V.func(0.0, *ys), G.space_shape)
    assert rel(a[0], b) < 1e-12
    # frame corners leave the lab box; there resampling sees the periodic image
    ph = make_phase((3.0, 4.0))
    inside = np.all([np.abs(x) < G.half_width for x in ph.frame_coords(G)], axis=0)
    c = frame_potential(Potential(G, V.values), ph)[:, inside]
    assert rel(c, frame_potential(V, ph)[:, inside]) < 1e-6


def test_zero_potential_gives_zero_remainder():
    sol = build_cgo(Potential.zero(G), (4.0, 0.0), gauss_psi(G))
    assert sol.iterations == 1 and sol.converged
    assert not np.any(sol.u_flat.values)
    A = assemble(sol)
    assert A.residual <= 1e-10


def test_free_assembled_solution_is_exponential_times_amplitude():
    k = G.freq_axis[2]
    psi = np.exp(1j * k * G.axis)
    sol = build_cgo(Potential.zero(G), (0.0, 1.0), psi)
    A = assemble(sol)
    t = G.times.reshape(-1, 1, 1)
    y1, y2 = G.coords()
    expected = np.exp(1j * t + y2) * np.exp(-1j * k**2 * t + 1j * k * y1)
    assert rel(A.values(), expected) < 1e-12


def test_converged_solution_properties():
    V = gaussian_bump(G, 0.5, 1.0)
    sol = build_cgo(V, (8.0, 0.0), gauss_psi(G))
    assert sol.converged and sol.iterations <= 64
    h = np.asarray(sol.increment_history)
    assert np.all(np.diff(h[1:]) < 0)
    # triangle inequality through the Neumann series
    assert sol.y_norm_flat <= h.sum() * (1 + 1e-12)
    r = sol.contraction
    assert h.sum() <= (h[0] + h[1] / (1 - r)) * (1 + 1e-12)
    assert sol.residual <= 10 * sol.tol * sol.source_norm
    assert assemble(sol).residual <= 10 * sol.tol


def test_contraction_decays_at_least_like_inverse_sqrt_nu():
    V = gaussian_bump(G, 0.5, 1.0)
    c = [build_cgo(V, (nu, 0.0), gauss_psi(G)).contraction for nu in (4.0, 8.0, 16.0, 32.0)]
    for lo, hi in zip(c, c[1:]):
        assert hi <= lo * 2 ** -0.5


@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.45), st.floats(1.0, 32.0))
def test_potential_multiplication_bound(seed, theta, nu):
    g = GridSpec(half_width=4.0, n_space=16, n_time=9)
    r = np.random.default_rng(seed)
    shape = (g.n_time_ext,) + g.space_shape
    V = SpaceTimeField(g, r.normal(size=shape), support_tag=EXTENDED)
    u = SpaceTimeField(g, r.normal(size=shape) + 1j * r.normal(size=shape), support_tag=EXTENDED)
    frame = (0.0, nu)
    lhs = x_norm(SpaceTimeField(g, V.values * u.values, support_tag=EXTENDED), WeightedNormParams(theta, frame))
    rhs = nu ** -0.5 * potential_strip_sum(V, frame) * y_norm(u, WeightedNormParams(0.5 - theta, frame))
    assert lhs <= rhs * (1 + 1e-12)


def test_residual_decreases_with_tolerance():
    V = gaussian_bump(G, 0.5, 1.0)
    res = [assemble(build_cgo(V, (4.0, 0.0), gauss_psi(G), tol=t)).residual for t in (1e-4, 1e-6, 1e-8)]
    assert res[0] >= res[1] >= res[2]
    assert res[2] <= 1e-7


def test_oblique_and_reflected_directions():
    V = gaussian_bump(G, 0.5, 1.0)
    for nu, sign in [((3.0, 4.0), 1), ((0.0, -8.0), -1)]:
        sol = build_cgo(V, nu, gauss_psi(G), sign=sign)
        assert sol.converged and assemble(sol).residual <= 1e-7


def test_strong_potential_diverges_at_small_nu():
    V = gaussian_bump(GridSpec(), 20.0, 1.5)
    with pytest.raises(DivergenceError, match="diverges"):
        build_cgo(V, (2.0, 0.0), gauss_psi(GridSpec()))


def test_unconverged_solution_cannot_be_assembled():
    V = gaussian_bump(G, 0.5, 1.0)
    sol = build_cgo(V, (4.0, 0.0), gauss_psi(G), tol=1e-14, max_iter=2)
    assert not sol.converged
    with pytest.raises(InvalidStateError):
        assemble(sol)


def test_callback_and_histories():
    V = gaussian_bump(G, 0.5, 1.0)
    rows = []
    sol = build_cgo(V, (8.0, 0.0), gauss_psi(G), callback=lambda *a: rows.append(a))
    assert [r[0] for r in rows] == list(range(1, sol.iterations + 1))
    assert tuple(r[1] for r in rows) == sol.increment_history
    assert tuple(r[2] for r in rows) == sol.residual_history


def test_solve_remainder_validation():
    V = gaussian_bump(G)
    us = amplitude(gauss_psi(G), make_phase((4.0, 0.0)), G)
    with pytest.raises(InvalidInputError):
        solve_remainder(V, us, make_phase((4.0, 0.0)), max_iter=0)
    with pytest.raises(InvalidInputError):
        solve_remainder(V, us.restrict(), make_phase((4.0, 0.0)))


def test_product_family_spans_transverse_frequencies():
    rank, distinct = product_gram_rank(GridSpec(), (0.0, 4.0))
    assert rank == distinct
