import numpy as np
import pytest
from hypothesis import given, strategies as st

from cgolab.exceptions import InvalidInputError, PreconditionError
from cgolab.grid import (EXTENDED, FREQUENCY, SLAB, GridSpec, SpaceTimeField, SpatialField,
                         region_l2_norm, transform_spacetime, transform_spatial)


def test_grid_defaults_and_spacings(grid):
    assert grid.n_dim == 2 and grid.n_space == 64
    assert grid.dx == pytest.approx(2 * grid.half_width / 64)
    assert grid.dt == pytest.approx(1.0 / 128)
    assert grid.n_time_ext == 516
    assert grid.times_ext[grid.slab_offset] == 0.0


def test_frequency_axis_matches_box(grid):
    k = np.sort(grid.freq_axis) * grid.half_width / np.pi
    np.testing.assert_allclose(k, np.arange(-32, 32), atol=1e-12)


@pytest.mark.parametrize("kwargs", [dict(n_space=48), dict(n_time=1), dict(half_width=-1.0),
                                    dict(horizon=0.0), dict(n_dim=1)])
def test_grid_rejects_bad_parameters(kwargs):
    with pytest.raises(InvalidInputError):
        GridSpec(**kwargs)


def test_grid_dict_round_trip(grid):
    assert GridSpec.from_dict(grid.to_dict()) == grid


def test_constant_transforms_to_zero_frequency_delta(grid):
    f = SpatialField(grid, np.ones(grid.space_shape))
    fh = transform_spatial(f).values
    assert fh[0, 0] == pytest.approx(grid.n_space)  # n_space^(n/2) with unitary scaling
    fh[0, 0] = 0
    assert np.abs(fh).max() < 1e-12


def test_single_mode_has_one_coefficient(grid):
    x = grid.coords()[0]
    f = SpatialField(grid, np.exp(1j * np.pi * x / grid.half_width) * np.ones(grid.space_shape))
    fh = np.abs(transform_spatial(f).values)
    assert fh[1, 0] == pytest.approx(grid.n_space)
    fh[1, 0] = 0
    assert fh.max() < 1e-10


def test_spatial_transform_round_trip(grid, rng):
    v = rng.normal(size=grid.space_shape) + 1j * rng.normal(size=grid.space_shape)
    back = transform_spatial(transform_spatial(SpatialField(grid, v)), "inverse")
    assert np.linalg.norm(back.values - v) / np.linalg.norm(v) < 1e-12


def test_transform_domain_checks(grid):
    f = SpatialField(grid, np.zeros(grid.space_shape))
    with pytest.raises(PreconditionError):
        transform_spatial(f, "inverse")
    with pytest.raises(InvalidInputError):
        transform_spatial(f, "sideways")
    with pytest.raises(InvalidInputError):
        SpatialField(grid, np.zeros(10))


def test_spacetime_transform_requires_extended(small_grid):
    u = SpaceTimeField(small_grid, np.zeros((small_grid.n_time,) + small_grid.space_shape))
    with pytest.raises(PreconditionError, match="embed"):
        transform_spacetime(u)
    z = transform_spacetime(u.embed())
    assert z.domain_tag == FREQUENCY and not np.any(z.values)


def test_spacetime_mode_is_single_coefficient(small_grid):
    g = small_grid
    t = g.times_ext.reshape(-1, 1, 1)
    x, y = g.coords()
    tau0, xi0 = g.time_freq_ext[3], g.freq_axis[2]
    u = SpaceTimeField(g, np.exp(1j * (tau0 * t + xi0 * x)) * np.ones_like(y), support_tag=EXTENDED)
    a = np.abs(transform_spacetime(u).values)
    peak = np.unravel_index(a.argmax(), a.shape)
    assert peak == (3, 2, 0)
    a[peak] = 0
    assert a.max() < 1e-9


def test_embed_restrict_is_bit_exact(small_grid, rng):
    g = small_grid
    v = rng.normal(size=(g.n_time,) + g.space_shape) + 0j
    u = SpaceTimeField(g, v)
    back = u.embed().restrict()
    assert back.support_tag == SLAB and np.array_equal(back.values, v)


def test_region_norm_of_constant():
    g = GridSpec(half_width=np.pi, n_space=32, n_time=33)
    u = SpaceTimeField(g, np.ones((g.n_time,) + g.space_shape))
    assert region_l2_norm(u) == pytest.approx(2 * np.pi, rel=1e-12)
    assert region_l2_norm(SpaceTimeField(g, np.zeros_like(u.values))) == 0.0
    assert region_l2_norm(u, np.zeros(g.space_shape, bool)) == 0.0


def test_region_norm_half_slab_by_direct_sum():
    g = GridSpec(half_width=np.pi, n_space=32, n_time=33)
    u = SpaceTimeField(g, np.ones((g.n_time,) + g.space_shape))
    half = g.coords()[0] < 0
    mask = np.broadcast_to(half, g.space_shape)
    assert region_l2_norm(u, mask) == pytest.approx(2 * np.pi / np.sqrt(2), rel=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_parseval_spatial_and_spacetime(seed):
    g = GridSpec(n_space=16, n_time=9)
    r = np.random.default_rng(seed)
    v = r.normal(size=g.space_shape) + 1j * r.normal(size=g.space_shape)
    fh = transform_spatial(SpatialField(g, v)).values
    assert abs(np.linalg.norm(fh) - np.linalg.norm(v)) <= 1e-12 * np.linalg.norm(v)
    w = r.normal(size=(g.n_time_ext,) + g.space_shape) + 0j
    wh = transform_spacetime(SpaceTimeField(g, w, support_tag=EXTENDED)).values
    assert abs(np.linalg.norm(wh) - np.linalg.norm(w)) <= 1e-12 * np.linalg.norm(w)
