"""Schrodinger solves on the periodic box.

``i u_t = -Lap u + V u`` is advanced by Strang splitting: a half step of the
potential phase ``exp(-i V dt/2)`` (``V`` sampled at the step midpoint), an
exact spectral kinetic step ``exp(-i |xi|^2 dt)``, and another half potential
step. Every solve accepts a leading batch axis on the initial data.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .exceptions import DivergenceError, InvalidInputError
from .grid import PHYSICAL, SLAB, GridSpec, SpaceTimeField, SpatialField
from .potentials import Potential


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``u(t_k)`` at every node, shape ``(n_time, *space)`` (or batched)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    potential_id: str = ""

    def __len__(self):
        return self.values.shape[0]

    def state(self, k: int) -> SpatialField:
        return SpatialField(self.grid, self.values[k])

    @property
    def states(self) -> list[SpatialField]:
        return [self.state(k) for k in range(len(self))]

    @property
    def final(self) -> SpatialField:
        return self.state(len(self) - 1)

    def as_field(self) -> SpaceTimeField:
        return SpaceTimeField(self.grid, self.values, support_tag=SLAB)

    def norms(self) -> np.ndarray:
        axes = tuple(range(1, self.values.ndim))
        return np.sqrt(np.sum(np.abs(self.values) ** 2, axis=axes) * self.grid.cell_volume)


def _spatial_axes(grid: GridSpec, arr: np.ndarray) -> tuple[int, ...]:
    return tuple(range(arr.ndim - grid.n_dim, arr.ndim))


def _values(f, grid: GridSpec | None = None) -> tuple[GridSpec, np.ndarray]:
    if isinstance(f, SpatialField):
        if f.domain_tag != PHYSICAL:
            raise InvalidInputError("expected a physical-domain field")
        if grid is not None and f.grid != grid:
            raise InvalidInputError("field and potential live on different grids")
        return f.grid, f.values
    if grid is None:
        raise InvalidInputError("raw arrays need an explicit grid")
    arr = np.asarray(f, dtype=complex)
    if arr.shape[arr.ndim - grid.n_dim:] != grid.space_shape:
        raise InvalidInputError(f"array shape {arr.shape} does not end with {grid.space_shape}")
    return grid, arr


def kinetic_phase(grid: GridSpec, t: float) -> np.ndarray:
    return np.exp(-1j * grid.freq_sq() * t)


def free_propagate(f, t: float, grid: GridSpec | None = None):
    """Exact free evolution ``exp(i t Lap) f``."""
    g, vals = _values(f, grid)
    if t == 0:
        out = np.array(vals, dtype=complex)
        return SpatialField(g, out) if isinstance(f, SpatialField) else out
    axes = _spatial_axes(g, vals)
    out = sfft.ifftn(kinetic_phase(g, t) * sfft.fftn(vals, axes=axes), axes=axes)
    return SpatialField(g, out) if isinstance(f, SpatialField) else out


def _strang(grid: GridSpec, u0: np.ndarray, V: Potential, store: bool,
            source: np.ndarray | None = None) -> np.ndarray:
    """Core stepper. ``source`` (slab nodes) adds ``-i F`` by midpoint injection."""
    # overflow shows up as a non-finite state and is reported as divergence
    with np.errstate(over="ignore", invalid="ignore"):
        return _strang_steps(grid, u0, V, store, source)


def _strang_steps(grid, u0, V, store, source):
    axes = _spatial_axes(grid, u0)
    dt = grid.dt
    half_kin = kinetic_phase(grid, dt / 2)
    full_kin = half_kin * half_kin
    n_steps = grid.n_time - 1
    u = np.array(u0, dtype=complex)
    traj = np.empty((grid.n_time,) + u.shape, dtype=complex) if store else None
    if store:
        traj[0] = u
    static_phase = None if V.time_dependent else np.exp(-0.5j * dt * V.values)
    zero_v = not np.any(V.values)
    for k in range(n_steps):
        phase = static_phase if static_phase is not None else np.exp(-0.5j * dt * V.midpoint(k))
        if not zero_v:
            u *= phase
        if source is None:
            u = sfft.ifftn(full_kin * sfft.fftn(u, axes=axes), axes=axes)
        else:
            u = sfft.ifftn(half_kin * sfft.fftn(u, axes=axes), axes=axes)
            u -= 1j * dt * 0.5 * (source[k] + source[k + 1])
            u = sfft.ifftn(half_kin * sfft.fftn(u, axes=axes), axes=axes)
        if not zero_v:
            u *= phase
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"non-finite state at step {k + 1}", step=k + 1)
        if store:
            traj[k + 1] = u
    if store:
        # time axis first, then any batch axes
        return traj
    return u


def evolve(f, V: Potential) -> Trajectory:
    """Solve ``i u_t = -Lap u + V u`` with ``u(0) = f`` on the slab."""
    g, vals = _values(f, V.grid)
    traj = _strang(g, vals, V, store=True)
    return Trajectory(g, traj, V.label)


def initial_to_final(f, V: Potential):
    """The state at ``t = T``. Accepts a batch ``(N, *space)`` of raw arrays."""
    g, vals = _values(f, V.grid)
    out = _strang(g, vals, V, store=False)
    return SpatialField(g, out) if isinstance(f, SpatialField) else out


def solve_final_value(g_final, V: Potential) -> Trajectory:
    """Solve ``i v_t = -Lap v + conj(V) v`` backward from ``v(T) = g``.

    ``w(s) = conj(v(T - s))`` obeys the forward equation with ``V(T - s)``, so
    the backward problem reuses the forward stepper.
    """
    grid, vals = _values(g_final, V.grid)
    w = _strang(grid, np.conj(vals), V.reversed(), store=True)
    return Trajectory(grid, np.conj(w[::-1]), V.label + "/final-value")


def solve_duhamel(F: SpaceTimeField, V: Potential) -> Trajectory:
    """Solve ``(i d_t + Lap - V) u = F`` with ``u(0) = 0``."""
    if F.grid != V.grid:
        raise InvalidInputError("source and potential live on different grids")
    if F.support_tag != SLAB:
        F = F.restrict()
    u0 = np.zeros(F.grid.space_shape, dtype=complex)
    traj = _strang(F.grid, u0, V, store=True, source=F.values)
    return Trajectory(F.grid, traj, V.label + "/duhamel")
