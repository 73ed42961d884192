"""Potentials ``V(t, x)`` sampled on a grid, plus the built-in test family."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import InvalidInputError
from .grid import SLAB, GridSpec, SpaceTimeField


@dataclass(frozen=True, eq=False)
class Potential:
    """A potential on the slab.

    ``values`` has shape ``(n_time, *space)`` for time-dependent potentials
    and ``space`` otherwise. ``midpoints`` holds samples at the half steps
    ``t_k + dt/2`` used by the splitting scheme; when omitted they are
    averaged from the nodes. ``func(t, *coords)``, when present, lets the
    potential be resampled on other grids.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    midpoints: np.ndarray | None = field(default=None, repr=False)
    decay_rate: float | None = None
    conjugated: bool = False
    label: str = "custom"
    func: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        g = self.grid
        if vals.shape not in (g.space_shape, (g.n_time,) + g.space_shape):
            raise InvalidInputError(f"potential shape {vals.shape} incompatible with grid")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("potential has non-finite values")
        object.__setattr__(self, "values", vals)
        if self.midpoints is not None:
            mid = np.asarray(self.midpoints, dtype=complex)
            if mid.shape != (g.n_time - 1,) + g.space_shape:
                raise InvalidInputError("midpoint samples have the wrong shape")
            object.__setattr__(self, "midpoints", mid)

    @property
    def time_dependent(self) -> bool:
        return self.values.ndim == self.grid.n_dim + 1

    def nodes(self) -> np.ndarray:
        """Samples at every time node, shape ``(n_time, *space)``."""
        if self.time_dependent:
            return self.values
        return np.broadcast_to(self.values, (self.grid.n_time,) + self.grid.space_shape)

    def midpoint(self, k: int) -> np.ndarray:
        """Sample at ``t_k + dt/2``."""
        if not self.time_dependent:
            return self.values
        if self.midpoints is not None:
            return self.midpoints[k]
        return 0.5 * (self.values[k] + self.values[k + 1])

    def as_field(self) -> SpaceTimeField:
        return SpaceTimeField(self.grid, np.array(self.nodes()), support_tag=SLAB)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def conj(self) -> "Potential":
        fn = None
        if self.func is not None:
            fn = lambda t, *x, _f=self.func: np.conj(_f(t, *x))  # noqa: E731
        mid = None if self.midpoints is None else np.conj(self.midpoints)
        return Potential(self.grid, np.conj(self.values), mid, self.decay_rate,
                         not self.conjugated, self.label, fn)

    def reversed(self) -> "Potential":
        """``V(T - t, x)``."""
        if not self.time_dependent:
            return self
        mid = None if self.midpoints is None else self.midpoints[::-1]
        fn = None
        if self.func is not None:
            T = self.grid.horizon
            fn = lambda t, *x, _f=self.func: _f(T - t, *x)  # noqa: E731
        return Potential(self.grid, self.values[::-1], mid, self.decay_rate,
                         self.conjugated, self.label + "/reversed", fn)

    def scaled(self, c: complex) -> "Potential":
        fn = None if self.func is None else (lambda t, *x, _f=self.func: c * _f(t, *x))
        mid = None if self.midpoints is None else c * self.midpoints
        return Potential(self.grid, c * self.values, mid, self.decay_rate,
                         self.conjugated, f"{c}*{self.label}", fn)

    def __add__(self, other: "Potential") -> "Potential":
        if other.grid != self.grid:
            raise InvalidInputError("potentials live on different grids")
        if self.time_dependent or other.time_dependent:
            vals = np.array(self.nodes()) + np.array(other.nodes())
            mid = np.stack([self.midpoint(k) + other.midpoint(k)
                            for k in range(self.grid.n_time - 1)])
        else:
            vals, mid = self.values + other.values, None
        fn = None
        if self.func is not None and other.func is not None:
            fn = lambda t, *x, a=self.func, b=other.func: a(t, *x) + b(t, *x)  # noqa: E731
        rates = [r for r in (self.decay_rate, other.decay_rate) if r is not None]
        return Potential(self.grid, vals, mid, min(rates) if rates else None,
                         False, f"{self.label}+{other.label}", fn)

    def __sub__(self, other: "Potential") -> "Potential":
        return self + other.scaled(-1.0)

    def on_grid(self, grid: GridSpec) -> "Potential":
        """Resample on another grid; requires ``func``."""
        if grid == self.grid:
            return self
        if self.func is None:
            raise InvalidInputError("potential has no generating function to resample")
        return Potential.from_function(grid, self.func, self.time_dependent,
                                       self.decay_rate, self.label)

    def shifted_cells(self, shift) -> "Potential":
        """Periodic shift by whole grid cells along each axis."""
        axes = tuple(range(self.values.ndim - self.grid.n_dim, self.values.ndim))
        vals = np.roll(self.values, tuple(shift), axis=axes)
        mid = None
        if self.midpoints is not None:
            mid = np.roll(self.midpoints, tuple(shift), axis=tuple(a for a in range(1, self.grid.n_dim + 1)))
        return Potential(self.grid, vals, mid, self.decay_rate, self.conjugated,
                         self.label + f"/shift{tuple(shift)}")

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.values).astype("<c16").tobytes())
        if self.midpoints is not None:
            h.update(np.ascontiguousarray(self.midpoints).astype("<c16").tobytes())
        return h.hexdigest()

    def check_decay(self, rate: float, bound: float) -> float:
        """Largest ``|V| e^(rate |x|)`` on the outermost shell of the box.

        Raises if it exceeds ``bound``.
        """
        g = self.grid
        coords = g.coords()
        r = np.sqrt(sum(c**2 for c in coords))
        edge = np.zeros(g.space_shape, dtype=bool)
        for c in coords:
            edge |= np.broadcast_to((c <= g.axis[0]) | (c >= g.axis[-1]), g.space_shape)
        peak = np.max(np.abs(self.nodes()), axis=0)
        worst = float(np.max((peak * np.exp(rate * r))[edge]))
        if worst > bound:
            raise InvalidInputError(
                f"potential does not decay: |V| e^(c|x|) = {worst:.3g} > {bound:.3g} on the box edge")
        return worst

    @classmethod
    def zero(cls, grid: GridSpec) -> "Potential":
        return cls(grid, np.zeros(grid.space_shape), label="zero",
                   func=lambda t, *x: np.zeros(np.broadcast_shapes(*[np.shape(c) for c in x])))

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable, time_dependent: bool = True,
                      decay_rate: float | None = None, label: str = "function") -> "Potential":
        """Sample ``fn(t, x_1, ..., x_n)`` at the nodes and the half steps."""
        coords = grid.coords()
        if not time_dependent:
            vals = np.broadcast_to(fn(0.0, *coords), grid.space_shape)
            return cls(grid, np.array(vals), None, decay_rate, False, label, fn)
        nodes = np.stack([np.broadcast_to(fn(t, *coords), grid.space_shape) for t in grid.times])
        mids = np.stack([np.broadcast_to(fn(t + grid.dt / 2, *coords), grid.space_shape)
                         for t in grid.times[:-1]])
        return cls(grid, nodes, mids, decay_rate, False, label, fn)


def gaussian_bump(grid: GridSpec, amplitude: float = 0.5, width: float = 1.0, center=None,
                  time_profile: Callable | None = None, label: str | None = None) -> Potential:
    """``amplitude * exp(-|x - center|^2 / (2 width^2))`` times an optional ``time_profile(t)``.

    Gaussians decay faster than any exponential; the construction checks
    ``|V| e^{|x|}`` on the box edge against its analytic supremum.
    """
    center = np.zeros(grid.n_dim) if center is None else np.asarray(center, dtype=float)
    if center.shape != (grid.n_dim,):
        raise InvalidInputError("center has the wrong dimension")

    def fn(t, *x):
        r2 = sum((xi - ci) ** 2 for xi, ci in zip(x, center))
        space = amplitude * np.exp(-r2 / (2 * width**2))
        if time_profile is None:
            return space
        return time_profile(t) * space

    name = label or f"gauss(a={amplitude:g},w={width:g},c={tuple(np.round(center, 3))})"
    pot = Potential.from_function(grid, fn, time_profile is not None, decay_rate=1.0, label=name)
    peak_t = 1.0
    if time_profile is not None:
        peak_t = float(np.max(np.abs([time_profile(t) for t in grid.times])))
    c_norm = float(np.linalg.norm(center))
    # sup_x |V| e^{|x|} <= a e^{|c|} e^{w^2/2} for a Gaussian centred at c
    pot.check_decay(1.0, abs(amplitude) * peak_t * np.exp(c_norm + width**2 / 2) * (1 + 1e-9))
    return pot


def cosine_profile(horizon: float) -> Callable:
    """``1 + cos(2 pi t / T)``."""
    return lambda t: 1.0 + np.cos(2 * np.pi * t / horizon)


def smooth_time_profile(horizon: float) -> Callable:
    """A smooth, non-trivial profile used for splitting-order studies."""
    return lambda t: 1.0 + 0.5 * np.sin(2 * np.pi * t / horizon) + 0.25 * np.cos(np.pi * t / horizon)


def random_smooth_potential(grid: GridSpec, rng: np.random.Generator, sup: float = 1.0,
                            n_bumps: int = 3, time_dependent: bool = True,
                            complex_valued: bool = False) -> Potential:
    """Sum of random Gaussian bumps scaled so that ``max |V| = sup``."""
    L = grid.half_width
    pot = None
    for _ in range(n_bumps):
        c = rng.uniform(-L / 3, L / 3, grid.n_dim)
        w = rng.uniform(0.6, 1.2)
        a = rng.normal() + (1j * rng.normal() if complex_valued else 0.0)
        if time_dependent:
            om, ph = rng.uniform(0.5, 2.0), rng.uniform(0, 2 * np.pi)
            prof = (lambda t, om=om, ph=ph: 1.0 + 0.5 * np.cos(om * np.pi * t + ph))
        else:
            prof = None
        b = gaussian_bump(grid, 1.0, w, c, prof)
        b = b.scaled(a)
        pot = b if pot is None else pot + b
    m = pot.sup_norm()
    out = pot.scaled(sup / m)
    return Potential(out.grid, out.values, out.midpoints, 1.0, False, "random-smooth", out.func)

