import numpy as np
import pytest
from hypothesis import given, strategies as st

from cgolab.dyadic import WeightedNormParams, x_norm, y_norm
from cgolab.exceptions import InvalidInputError, PreconditionError, SingularSymbolError
from cgolab.grid import EXTENDED, GridSpec, SpaceTimeField
from cgolab.multiplier import (LineMultiplier, PlaneField, SymbolParams, apply_forward_operator,
                               apply_S, apply_S_normalized, apply_T_2d, bench_multiplier_norm,
                               conjugate_by_phase, conjugated_operator, conjugation_identity_error,
                               inverse_symbol, inversion_residual, normalized_symbol,
                               plancherel_split, poincare_sweep, regularized_mask,
                               smooth_slab_field, strip_localized_input, symbol_eval, symbol_grid,
                               t_norm_sweep, t_symbol)

from conftest import rel

G = GridSpec(n_space=32, n_time=33)


def ext(values, grid=G):
    return SpaceTimeField(grid, values, support_tag=EXTENDED)


def localized(grid=G):
    t = grid.times_ext.reshape(-1, 1, 1)
    x, y = grid.coords()
    return ext(np.exp(-8 * (t - 0.5) ** 2 - (x - 0.3) ** 2 - 2 * (y + 0.2) ** 2) * (1 + 0.3j * x), grid)


def spacetime_mode(grid, i, j, k):
    t = grid.times_ext.reshape(-1, 1, 1)
    x, y = grid.coords()
    tau, xi1, xi2 = grid.time_freq_ext[i], grid.freq_axis[j], grid.freq_axis[k]
    return np.exp(1j * (tau * t + xi1 * x + xi2 * y)), (tau, (xi1, xi2))


def test_symbol_vanishes_on_characteristic_set():
    nu = np.array([3.0, 4.0])
    xi = np.array([-4.0, 3.0]) * 0.7  # orthogonal to nu
    p = SymbolParams(nu @ nu, tuple(nu))
    assert abs(symbol_eval(p, nu @ nu - xi @ xi - nu @ nu, tuple(xi))) < 1e-12
    p0 = SymbolParams(0.0, tuple(nu))
    assert abs(symbol_eval(p0, nu @ nu - xi @ xi, tuple(xi))) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_translation_identity(seed):
    r = np.random.default_rng(seed)
    lam = r.normal()
    zeta = r.normal(size=2) + 1j * r.normal(size=2)
    tau, xi = r.normal(), r.normal(size=2)
    lhs = symbol_eval(SymbolParams(lam, tuple(zeta)), tau, tuple(xi))
    rhs = symbol_eval(SymbolParams(0.0, tuple(zeta.real)), tau + lam, tuple(xi + zeta.imag))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_normalized_symbol_value():
    assert normalized_symbol(1.0, (0.0, 0.0)) == 1.0


def test_symbol_params_validation():
    with pytest.raises(InvalidInputError):
        SymbolParams(0.0, (1j, 0.0))
    with pytest.raises(InvalidInputError):
        SymbolParams(0.0, (1.0, 0.0), delta=0.1)


def test_apply_S_acts_diagonally_on_a_mode():
    p = SymbolParams.for_nu((4.0, 0.0))
    mode, (tau, xi) = spacetime_mode(G, 5, 3, 2)
    out = apply_S(p, ext(mode)).values
    assert rel(out, mode / symbol_eval(p, tau, xi)) < 1e-12


def test_apply_S_needs_extended_physical_field():
    p = SymbolParams.for_nu((4.0, 0.0))
    with pytest.raises(PreconditionError):
        apply_S(p, SpaceTimeField(G, np.zeros((G.n_time,) + G.space_shape)))


@pytest.mark.parametrize("nu", [(4.0, 0.0), (3.0, 4.0), (0.0, 8.0)])
def test_inversion_round_trip(nu):
    p = SymbolParams.for_nu(nu)
    assert inversion_residual(p, localized()) < 1e-10
    assert inversion_residual(p, localized(), time_offset=True) < 1e-10
    u = apply_S(p, localized())
    keep = ~regularized_mask(symbol_grid(p, G), p.delta)
    back = np.fft.fftn(apply_forward_operator(p, u).values)
    assert rel(back[keep], np.fft.fftn(localized().values)[keep]) < 1e-10


@pytest.mark.parametrize("nu", [(4.0, 0.0), (3.0, 4.0), (0.0, 8.0), (1.0, -2.0)])
def test_homogeneity_against_normalized_symbol(nu):
    f = localized()
    a = apply_S(SymbolParams(0.0, nu), f).values
    b = apply_S_normalized(nu, f).values
    assert rel(b, a) < 1e-8


def test_exact_zero_without_regularization_raises():
    g = GridSpec(n_space=16, n_time=9)
    tau1 = g.time_freq_ext[1]
    p = SymbolParams(0.0, (np.sqrt(tau1), 0.0), delta=0.0)
    with pytest.raises(SingularSymbolError):
        apply_S(p, ext(np.ones((g.n_time_ext,) + g.space_shape), g))
    # half-step time offset moves the grid off the zero set
    out = apply_S(p, ext(np.ones((g.n_time_ext,) + g.space_shape), g), time_offset=True)
    assert np.all(np.isfinite(out.values))


def test_inverse_symbol_branches():
    sym = np.array([1.0, 1e-3, 1e-12, 0.0])
    m = inverse_symbol(sym, 1e-6)
    assert m[0] == 1.0 and m[1] == pytest.approx(1e3)
    eps = 1e-6
    assert m[2] == pytest.approx(1e-12 / (1e-24 + eps**2))
    assert m[3] == 0.0
    with pytest.raises(SingularSymbolError):
        inverse_symbol(sym, 0.0)


@given(st.integers(0, 2**32 - 1), st.integers(-5, 5), st.integers(-4, 4), st.integers(-4, 4))
def test_apply_S_commutes_with_modulation(seed, i, j, k):
    g = GridSpec(n_space=8, n_time=5)
    r = np.random.default_rng(seed)
    shape = (g.n_time_ext,) + g.space_shape
    f = r.normal(size=shape) + 1j * r.normal(size=shape)
    mode, _ = spacetime_mode(g, i, j, k)
    p = SymbolParams.for_nu(tuple(r.normal(size=2) * 3))
    shifted = apply_S(p, ext(mode * f, g)).values
    m = inverse_symbol(symbol_grid(p, g), p.delta)
    # modulating the input by a grid mode samples the multiplier at shifted indices
    expected = mode * np.fft.ifftn(np.roll(m, (-i, -j, -k), axis=(0, 1, 2)) * np.fft.fftn(f))
    assert rel(shifted, expected) < 1e-12


# -- line realization -------------------------------------------------------

@pytest.mark.parametrize("nu", [0.5, 4.0, 16.0])
def test_line_multiplier_solves_the_line_equation(nu):
    op = LineMultiplier(G, nu)
    u, Pu = op.apply_with_image(localized().values)
    assert rel(Pu, localized().values) < 1e-10


def test_line_multiplier_matches_large_periodic_box():
    # the source must be resolved on the grid, else the two extensions differ
    g = GridSpec(n_space=64, n_time=33)
    nu = 4.0
    f = localized(g).values
    u = LineMultiplier(g, nu).apply(f)
    ft = np.fft.fftn(f, axes=(0, 1))
    ul_all = np.fft.fftn(u, axes=(0, 1))
    M = 64
    nbig = g.n_space * M
    off = (nbig - g.n_space) // 2
    xi = 2 * np.pi * np.fft.fftfreq(nbig, d=g.dx)
    for i, j in [(3, 2), (5, 0), (-3, 0), (-8, 1)]:
        a = -g.time_freq_ext[i] - g.freq_axis[j] ** 2
        fb = np.zeros(nbig, complex)
        fb[off:off + g.n_space] = ft[i, j, :]
        ub = np.fft.ifft(np.fft.fft(fb) / (a - xi**2 + 2j * nu * xi))[off:off + g.n_space]
        assert rel(ul_all[i, j, :], ub) < 1e-6


def test_line_multiplier_rejects_bad_nu():
    with pytest.raises(InvalidInputError):
        LineMultiplier(G, 0.0)


# -- exponential conjugation --------------------------------------------------

def test_conjugated_operator_kills_constant():
    one = ext(np.ones((G.n_time_ext,) + G.space_shape))
    assert np.abs(conjugated_operator((2.0, 1.0), one).values).max() < 1e-12


def test_conjugation_identity_on_random_fields(grid):
    r = np.random.default_rng(5)
    for _ in range(5):
        nu = r.normal(size=2)
        nu *= r.uniform(0.5, 1.5) / np.linalg.norm(nu)
        w = smooth_slab_field(grid, r)
        assert conjugation_identity_error(nu, w) < 1e-8


def test_conjugation_by_phase_shape_and_support(grid):
    w = smooth_slab_field(grid, np.random.default_rng(0))
    out = conjugate_by_phase((1.0, 0.0), w)
    assert out.values.shape == w.values.shape and out.support_tag == EXTENDED


def test_plancherel_split(grid):
    r = np.random.default_rng(6)
    for _ in range(5):
        nu = r.normal(size=2)
        w = smooth_slab_field(grid, r)
        total, free, transport = plancherel_split(nu, w)
        assert abs(total - free - transport) <= 1e-8 * total


def test_poincare_constant_stays_bounded(grid):
    rows = poincare_sweep(grid)
    cs = np.array([r["C"] for r in rows])
    assert np.all(cs > 0) and cs.max() < 1.0


# -- the two-dimensional model multiplier ------------------------------------

def test_T_divides_by_q():
    n, h = 64, 2 * np.pi / 64
    f = PlaneField(np.zeros((n, n)), (h, h))
    x1, x2 = f.coords()
    mode = np.exp(1j * x1) * np.ones_like(x2)  # frequency (1, 0), q = 1
    assert t_symbol(1.0, 0.0) == 1.0
    assert rel(apply_T_2d(PlaneField(mode, (h, h))).values, mode) < 1e-12
    assert not np.any(apply_T_2d(f).values)


def test_T_norm_scaling_constant_is_stable():
    rows = t_norm_sweep(0.25, n=256, h=0.05)
    cs = [r["C"] for r in rows]
    assert max(cs) / min(cs) < 2.0


# -- benchmark ----------------------------------------------------------------

def test_bench_is_deterministic():
    a = bench_multiplier_norm((4.0, 0.0), 0.25, trials=1, seed=3, grid=G)
    b = bench_multiplier_norm((4.0, 0.0), 0.25, trials=1, seed=3, grid=G)
    assert a == b and a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "trial,nu,theta,x_norm,y_norm,ratio"


def test_bench_ratio_matches_direct_norms():
    rep = bench_multiplier_norm((0.0, 4.0), 0.3, trials=2, seed=7, grid=G)
    rng = np.random.default_rng(7)
    op = LineMultiplier(G, 4.0)
    for i in range(2):
        f = ext(strip_localized_input(G, 4.0, rng))
        u = ext(op.apply(f.values))
        x = x_norm(f, WeightedNormParams(0.3, (0.0, 4.0)))
        y = y_norm(u, WeightedNormParams(0.2, (0.0, 4.0)))
        assert rep.ratios[i] == pytest.approx(y / x, rel=1e-12)
    assert rep.max_ratio == max(rep.ratios) and rep.nu_norm == 4.0


def test_strip_input_lives_in_one_strip():
    from cgolab.dyadic import build_dyadic

    f = strip_localized_input(G, 4.0, np.random.default_rng(1))
    dec = build_dyadic(G, (0.0, 4.0))
    hit = [a for a in dec.alphas() if np.any(f[dec.mask(a)] != 0)]
    assert len(hit) == 1


def test_bench_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        bench_multiplier_norm((4.0, 0.0), 0.6, grid=G)
    with pytest.raises(InvalidInputError):
        bench_multiplier_norm((4.0, 0.0), 0.25, trials=0, grid=G)
