"""Space-time grids, fields and discrete Fourier transforms.

The unbounded slab ``(0, T) x R^n`` is replaced by a periodic box
``[-L, L)^n`` in space and ``n_time`` uniform nodes on ``[0, T]`` in time.
Space-time transforms act on an *extended* time window that is
``time_pad_factor`` times longer than the slab; slab fields are zero-extended
into that window before transforming.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .exceptions import InvalidInputError, PreconditionError

PHYSICAL = "physical"
FREQUENCY = "frequency"
SLAB = "slab"
EXTENDED = "extended"


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Discretization of the space-time slab.

    Parameters
    ----------
    n_dim : int
        Spatial dimension, 2 or 3.
    half_width : float
        Half side ``L`` of the periodic box ``[-L, L)^n``.
    n_space : int
        Points per spatial axis, a power of two.
    horizon : float
        Final time ``T``.
    n_time : int
        Number of time nodes on ``[0, T]`` (endpoints included).
    time_pad_factor : int
        Length of the extended time window in units of ``n_time``.
    """

    n_dim: int = 2
    half_width: float = 2 * np.pi
    n_space: int = 64
    horizon: float = 1.0
    n_time: int = 129
    time_pad_factor: int = 4

    def __post_init__(self):
        if self.n_dim not in (2, 3):
            raise InvalidInputError(f"n_dim must be 2 or 3, got {self.n_dim}")
        if not _is_power_of_two(int(self.n_space)):
            raise InvalidInputError(f"n_space must be a power of two, got {self.n_space}")
        if not self.half_width > 0 or not self.horizon > 0:
            raise InvalidInputError("half_width and horizon must be positive")
        if self.n_time < 2:
            raise InvalidInputError("n_time must be at least 2")
        if int(self.time_pad_factor) < 1:
            raise InvalidInputError("time_pad_factor must be >= 1")

    # -- spatial geometry ------------------------------------------------
    @property
    def dx(self) -> float:
        return 2 * self.half_width / self.n_space

    @property
    def dt(self) -> float:
        return self.horizon / (self.n_time - 1)

    @property
    def space_shape(self) -> tuple[int, ...]:
        return (self.n_space,) * self.n_dim

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n_dim

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_space)

    @cached_property
    def freq_axis(self) -> np.ndarray:
        """Angular frequencies ``pi k / L`` in FFT order."""
        return 2 * np.pi * sfft.fftfreq(self.n_space, d=self.dx)

    def coords(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays ``x_1, ..., x_n``."""
        return [self.axis.reshape(self._bshape(j)) for j in range(self.n_dim)]

    def freqs(self) -> list[np.ndarray]:
        return [self.freq_axis.reshape(self._bshape(j)) for j in range(self.n_dim)]

    def freq_sq(self) -> np.ndarray:
        return sum(k**2 for k in self.freqs())

    def _bshape(self, j: int) -> tuple[int, ...]:
        shape = [1] * self.n_dim
        shape[j] = self.n_space
        return tuple(shape)

    # -- time geometry ----------------------------------------------------
    @cached_property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_time)

    @property
    def n_time_ext(self) -> int:
        return int(self.time_pad_factor) * self.n_time

    @property
    def slab_offset(self) -> int:
        """Index of ``t = 0`` inside the extended window."""
        return ((int(self.time_pad_factor) - 1) * self.n_time) // 2

    @cached_property
    def times_ext(self) -> np.ndarray:
        return self.dt * (np.arange(self.n_time_ext) - self.slab_offset)

    @cached_property
    def time_freq_ext(self) -> np.ndarray:
        return 2 * np.pi * sfft.fftfreq(self.n_time_ext, d=self.dt)

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_time, self.dt)
        w[0] = w[-1] = self.dt / 2
        return w

    def with_time_steps(self, n_time: int) -> "GridSpec":
        return GridSpec(self.n_dim, self.half_width, self.n_space, self.horizon,
                        n_time, self.time_pad_factor)

    def to_dict(self) -> dict:
        return {
            "n_dim": self.n_dim,
            "half_width": float(self.half_width),
            "n_space": self.n_space,
            "horizon": float(self.horizon),
            "n_time": self.n_time,
            "time_pad_factor": int(self.time_pad_factor),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(**{k: d[k] for k in ("n_dim", "half_width", "n_space", "horizon",
                                         "n_time", "time_pad_factor") if k in d})


@dataclass(frozen=True)
class SpatialField:
    """Complex samples of a function of ``x`` on the box."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    domain_tag: str = PHYSICAL

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.space_shape:
            raise InvalidInputError(
                f"values shape {values.shape} does not match grid {self.grid.space_shape}")
        if self.domain_tag not in (PHYSICAL, FREQUENCY):
            raise InvalidInputError(f"unknown domain tag {self.domain_tag!r}")
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        """Discrete L2 norm with the cell volume included."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))

    def inner(self, other: "SpatialField") -> complex:
        """``<self, other> = sum self * conj(other) dx^n``."""
        return complex(np.vdot(other.values, self.values) * self.grid.cell_volume)


@dataclass(frozen=True)
class SpaceTimeField:
    """Complex samples on (time x space), time axis outermost."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    domain_tag: str = PHYSICAL
    support_tag: str = SLAB

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        nt = self.grid.n_time if self.support_tag == SLAB else self.grid.n_time_ext
        if self.support_tag not in (SLAB, EXTENDED):
            raise InvalidInputError(f"unknown support tag {self.support_tag!r}")
        if values.shape != (nt,) + self.grid.space_shape:
            raise InvalidInputError(
                f"values shape {values.shape} does not match {(nt,) + self.grid.space_shape}")
        object.__setattr__(self, "values", values)

    def embed(self) -> "SpaceTimeField":
        """Zero-extend a slab field into the extended window."""
        if self.support_tag == EXTENDED:
            return self
        out = np.zeros((self.grid.n_time_ext,) + self.grid.space_shape, dtype=complex)
        o = self.grid.slab_offset
        out[o:o + self.grid.n_time] = self.values
        return SpaceTimeField(self.grid, out, self.domain_tag, EXTENDED)

    def restrict(self) -> "SpaceTimeField":
        """Slab part of an extended field."""
        if self.support_tag == SLAB:
            return self
        o = self.grid.slab_offset
        return SpaceTimeField(self.grid, self.values[o:o + self.grid.n_time].copy(),
                              self.domain_tag, SLAB)


def transform_spatial(f: SpatialField, direction: str = "forward") -> SpatialField:
    """Unitary DFT over the spatial axes."""
    axes = tuple(range(f.grid.n_dim))
    if direction == "forward":
        if f.domain_tag != PHYSICAL:
            raise PreconditionError("forward transform expects a physical-domain field")
        return SpatialField(f.grid, sfft.fftn(f.values, axes=axes, norm="ortho"), FREQUENCY)
    if direction == "inverse":
        if f.domain_tag != FREQUENCY:
            raise PreconditionError("inverse transform expects a frequency-domain field")
        return SpatialField(f.grid, sfft.ifftn(f.values, axes=axes, norm="ortho"), PHYSICAL)
    raise InvalidInputError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def transform_spacetime(u: SpaceTimeField, direction: str = "forward") -> SpaceTimeField:
    """Unitary DFT over ``(t, x)`` on the extended periodic window."""
    if u.support_tag != EXTENDED:
        raise PreconditionError("space-time transforms need an extended field; call .embed() first")
    if direction == "forward":
        if u.domain_tag != PHYSICAL:
            raise PreconditionError("forward transform expects a physical-domain field")
        return SpaceTimeField(u.grid, sfft.fftn(u.values, norm="ortho"), FREQUENCY, EXTENDED)
    if direction == "inverse":
        if u.domain_tag != FREQUENCY:
            raise PreconditionError("inverse transform expects a frequency-domain field")
        return SpaceTimeField(u.grid, sfft.ifftn(u.values, norm="ortho"), PHYSICAL, EXTENDED)
    raise InvalidInputError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def time_weights(u: SpaceTimeField) -> np.ndarray:
    """Quadrature weights in time: trapezoid on the slab, rectangle on the window."""
    if u.support_tag == SLAB:
        return u.grid.trapezoid_weights
    return np.full(u.grid.n_time_ext, u.grid.dt)


def region_l2_norm(u: SpaceTimeField, mask: np.ndarray | None = None) -> float:
    """L2 norm of ``u`` over the grid points selected by ``mask``.

    ``mask`` is boolean with the full shape of ``u.values`` or the spatial
    shape only (then it applies at every time). ``None`` means everywhere.
    """
    w = time_weights(u).reshape((-1,) + (1,) * u.grid.n_dim)
    dens = np.abs(u.values) ** 2 * w
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape == u.grid.space_shape:
            mask = np.broadcast_to(mask, u.values.shape)
        if mask.shape != u.values.shape:
            raise InvalidInputError(f"mask shape {mask.shape} incompatible with field")
        dens = np.where(mask, dens, 0.0)
    return float(np.sqrt(dens.sum() * u.grid.cell_volume))
