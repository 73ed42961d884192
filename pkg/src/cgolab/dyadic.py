"""Dyadic strips orthogonal to a direction and the weighted X / Y norms.

A strip ``Pi_alpha = Upsilon_{alpha_1} x Omega_{alpha_2}`` collects the
extended-grid points whose time satisfies ``2^(a1-1) < |t| <= 2^a1`` and whose
position satisfies ``2^(a2-1) < |x . nu_hat| <= 2^a2`` (index 0 means ``<= 1``).
On the truncated box the outermost strips are clipped; the strip sums are
finite and computed exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import InvalidInputError
from .grid import EXTENDED, GridSpec, SpaceTimeField


def dyadic_index(s: np.ndarray) -> np.ndarray:
    """Index ``j`` with ``2^(j-1) < s <= 2^j`` and ``j = 0`` for ``s <= 1``."""
    s = np.abs(np.asarray(s, dtype=float))
    out = np.zeros(s.shape, dtype=np.int64)
    big = s > 1
    out[big] = np.ceil(np.log2(s[big])).astype(np.int64)
    return out


@dataclass(frozen=True)
class WeightedNormParams:
    theta: float
    nu: tuple

    def __post_init__(self):
        if not 0 < self.theta < 0.5:
            raise InvalidInputError(f"theta must lie in (0, 1/2), got {self.theta}")
        nu = tuple(float(v) for v in np.ravel(self.nu))
        if np.linalg.norm(nu) == 0:
            raise InvalidInputError("nu must be nonzero")
        object.__setattr__(self, "nu", nu)

    @property
    def nu_norm(self) -> float:
        return float(np.linalg.norm(self.nu))


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    """Strip labels over the extended space-time grid for one direction ``nu``."""

    grid: GridSpec
    nu: tuple
    time_labels: np.ndarray
    space_labels: np.ndarray

    @property
    def nu_norm(self) -> float:
        return float(np.linalg.norm(self.nu))

    @property
    def max_alpha(self) -> tuple[int, int]:
        return int(self.time_labels.max()), int(self.space_labels.max())

    def alphas(self) -> list[tuple[int, int]]:
        """Nonempty strip indices."""
        ts = np.unique(self.time_labels)
        xs = np.unique(self.space_labels)
        return [(int(a), int(b)) for a in ts for b in xs]

    def mask(self, alpha: tuple[int, int]) -> np.ndarray:
        a1, a2 = alpha
        tm = (self.time_labels == a1).reshape((-1,) + (1,) * self.grid.n_dim)
        return tm & (self.space_labels == a2)

    def strip_sums(self, density: np.ndarray) -> np.ndarray:
        """Sum of ``density`` (extended shape) over each strip, indexed ``[a1, a2]``."""
        nt, nx = self.max_alpha[0] + 1, self.max_alpha[1] + 1
        labels = (self.time_labels.reshape((-1,) + (1,) * self.grid.n_dim) * nx
                  + self.space_labels)
        out = np.bincount(labels.ravel(), weights=np.ravel(density), minlength=nt * nx)
        return out.reshape(nt, nx)

    def strip_l2(self, values: np.ndarray) -> np.ndarray:
        """``||u||_{L2(Pi_alpha)}`` for all strips of an extended-shape array."""
        dens = np.abs(values) ** 2 * self.grid.dt * self.grid.cell_volume
        return np.sqrt(self.strip_sums(dens))

    def strip_linf(self, values: np.ndarray) -> np.ndarray:
        nt, nx = self.max_alpha[0] + 1, self.max_alpha[1] + 1
        out = np.zeros((nt, nx))
        a = np.abs(values)
        for a1 in range(nt):
            sel = a[self.time_labels == a1]
            if sel.size == 0:
                continue
            m = sel.max(axis=0)
            np.maximum.at(out[a1], self.space_labels.ravel(), m.ravel())
        return out

    def weights(self, exponent: float) -> np.ndarray:
        """``2^(exponent * |alpha|)`` on the strip index array."""
        nt, nx = self.max_alpha[0] + 1, self.max_alpha[1] + 1
        a = np.add.outer(np.arange(nt), np.arange(nx))
        return 2.0 ** (exponent * a)


@lru_cache(maxsize=32)
def _cached(grid: GridSpec, nu: tuple) -> DyadicDecomposition:
    nu_arr = np.asarray(nu, dtype=float)
    nn = np.linalg.norm(nu_arr)
    proj = sum(c * (v / nn) for c, v in zip(grid.coords(), nu_arr))
    space = dyadic_index(np.broadcast_to(proj, grid.space_shape))
    time = dyadic_index(grid.times_ext)
    return DyadicDecomposition(grid, tuple(nu), time, np.ascontiguousarray(space))


def build_dyadic(grid: GridSpec, nu) -> DyadicDecomposition:
    """Strip decomposition of the extended grid for direction ``nu``."""
    nu = tuple(float(v) for v in np.ravel(nu))
    if len(nu) != grid.n_dim:
        raise InvalidInputError(f"nu must have {grid.n_dim} components")
    if np.linalg.norm(nu) == 0:
        raise InvalidInputError("nu must be nonzero")
    return _cached(grid, nu)


def _extended_values(f) -> tuple[GridSpec, np.ndarray]:
    if isinstance(f, SpaceTimeField):
        if f.support_tag != EXTENDED:
            f = f.embed()
        return f.grid, f.values
    raise InvalidInputError("expected a SpaceTimeField")


def x_norm(f: SpaceTimeField, p: WeightedNormParams, dec: DyadicDecomposition | None = None) -> float:
    """``|nu|^(-1/4) sum_alpha 2^(|alpha| theta) ||f||_{L2(Pi_alpha)}``.

    Slab-supported fields are zero-extended first.
    """
    grid, vals = _extended_values(f)
    dec = dec or build_dyadic(grid, p.nu)
    l2 = dec.strip_l2(vals)
    return float(p.nu_norm ** -0.25 * np.sum(dec.weights(p.theta) * l2))


def y_norm(u: SpaceTimeField, p: WeightedNormParams, dec: DyadicDecomposition | None = None) -> float:
    """``|nu|^(1/4) sup_alpha 2^(-|alpha| theta) ||u||_{L2(Pi_alpha)}``."""
    grid, vals = _extended_values(u)
    dec = dec or build_dyadic(grid, p.nu)
    l2 = dec.strip_l2(vals)
    return float(p.nu_norm ** 0.25 * np.max(dec.weights(-p.theta) * l2))


def potential_strip_sum(V: SpaceTimeField, nu, exponent: float = 0.5) -> float:
    """``sum_alpha 2^(|alpha| exponent) ||V||_{L_inf(Pi_alpha)}``."""
    grid, vals = _extended_values(V)
    dec = build_dyadic(grid, nu)
    return float(np.sum(dec.weights(exponent) * dec.strip_linf(vals)))


def bilinear_bound(V: SpaceTimeField, u: SpaceTimeField, v: SpaceTimeField, nu, theta: float):
    """Both sides of the strip-wise Cauchy-Schwarz bound for ``int |V u conj(v)|``.

    Returns ``(lhs, rhs)``; ``lhs <= rhs`` holds for every triple.
    """
    grid, Vv = _extended_values(V)
    _, uv = _extended_values(u)
    _, vv = _extended_values(v)
    lhs = float(np.sum(np.abs(Vv * uv * np.conj(vv))) * grid.dt * grid.cell_volume)
    nn = float(np.linalg.norm(nu))
    rhs = (nn ** -0.5 * potential_strip_sum(V, nu, 0.5)
           * y_norm(u, WeightedNormParams(0.5 - theta, nu))
           * y_norm(v, WeightedNormParams(theta, nu)))
    return lhs, rhs
