"""Initial-to-final-state datasets ``{(f_i, U_T f_i)}``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, MissingSampleError
from .grid import GridSpec, SpatialField
from .potentials import Potential
from .propagator import initial_to_final

FOURIER = "fourier"
GAUSSIAN = "gaussian"
CHUNK = 256


def spiral_modes(grid: GridSpec, count: int) -> np.ndarray:
    """The ``count`` lowest integer mode vectors, ordered by ``|k|^2`` then angle.

    Components lie in ``[-n_space/2, n_space/2)``.
    """
    total = grid.n_space**grid.n_dim
    if count > total:
        raise InvalidInputError(f"only {total} distinct Fourier modes exist on this grid, asked for {count}")
    half = grid.n_space // 2
    ax = np.arange(-half, half)
    ks = np.stack(np.meshgrid(*([ax] * grid.n_dim), indexing="ij"), axis=-1).reshape(-1, grid.n_dim)
    r2 = np.sum(ks**2, axis=1)
    ang = np.arctan2(ks[:, 1], ks[:, 0])
    extra = [ks[:, j] for j in range(grid.n_dim - 1, 1, -1)]
    order = np.lexsort(tuple(extra) + (ang, r2))
    return ks[order[:count]]


def square_modes(grid: GridSpec, K: int) -> np.ndarray:
    """All integer modes with ``max_j |k_j| <= K``."""
    if 2 * K + 1 > grid.n_space:
        raise InvalidInputError("probe band exceeds the grid")
    ax = np.arange(-K, K + 1)
    return np.stack(np.meshgrid(*([ax] * grid.n_dim), indexing="ij"), axis=-1).reshape(-1, grid.n_dim)


def mode_frequency(grid: GridSpec, k) -> np.ndarray:
    """Angular frequency ``pi k / L`` of integer modes (wrapped into the grid band)."""
    k = np.asarray(k)
    half = grid.n_space // 2
    wrapped = (k + half) % grid.n_space - half
    return np.pi * wrapped / grid.half_width


def fourier_mode(grid: GridSpec, k) -> np.ndarray:
    """``exp(i kappa . x)`` for integer mode ``k`` (unnormalized)."""
    kap = mode_frequency(grid, k)
    return np.exp(1j * sum(c * kk for c, kk in zip(grid.coords(), kap)))


def gaussian_packets(grid: GridSpec, count: int, rng: np.random.Generator) -> tuple[np.ndarray, list]:
    L = grid.half_width
    out = np.empty((count,) + grid.space_shape, dtype=complex)
    params = []
    for i in range(count):
        c = rng.uniform(-L / 2, L / 2, grid.n_dim)
        k = rng.uniform(-4.0, 4.0, grid.n_dim)
        w = rng.uniform(0.7, 1.5)
        r2 = sum((x - cj) ** 2 for x, cj in zip(grid.coords(), c))
        f = np.exp(-r2 / (2 * w**2) + 1j * sum(kj * x for kj, x in zip(k, grid.coords())))
        out[i] = f / np.sqrt(np.sum(np.abs(f) ** 2) * grid.cell_volume)
        params.append({"center": c.tolist(), "momentum": k.tolist(), "width": float(w)})
    return out, params


def evolve_batch(inputs: np.ndarray, V: Potential, chunk: int = CHUNK) -> np.ndarray:
    """``U_T`` applied to each row of ``inputs``, in chunks to bound memory."""
    out = np.empty_like(inputs)
    for s in range(0, inputs.shape[0], chunk):
        out[s:s + chunk] = initial_to_final(inputs[s:s + chunk], V)
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Pairs ``(f_i, U_T f_i)`` plus the metadata needed to reproduce them."""

    grid: GridSpec
    inputs: np.ndarray = field(repr=False)
    outputs: np.ndarray = field(repr=False)
    basis: str = FOURIER
    seed: int = 0
    noise_sigma: float = 0.0
    potential_digest: str = ""
    kappas: np.ndarray | None = field(default=None, repr=False)
    packets: list | None = field(default=None, repr=False)

    def __post_init__(self):
        shape = self.grid.space_shape
        for name in ("inputs", "outputs"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != self.grid.n_dim + 1 or arr.shape[1:] != shape:
                raise InvalidInputError(f"{name} must have shape (N, {shape})")
            object.__setattr__(self, name, arr)
        if self.inputs.shape[0] != self.outputs.shape[0]:
            raise InvalidInputError("inputs and outputs differ in length")
        if self.inputs.shape[0] < 1:
            raise InvalidInputError("a dataset needs at least one entry")
        if self.kappas is not None:
            k = np.asarray(self.kappas, dtype=np.int64)
            if k.shape != (len(self), self.grid.n_dim):
                raise InvalidInputError("kappas must have shape (N, n_dim)")
            object.__setattr__(self, "kappas", k)

    def __len__(self):
        return self.inputs.shape[0]

    def entry(self, i: int) -> tuple[SpatialField, SpatialField]:
        return SpatialField(self.grid, self.inputs[i]), SpatialField(self.grid, self.outputs[i])

    def manifest(self) -> dict:
        m = {
            "grid": self.grid.to_dict(),
            "potential_digest": self.potential_digest,
            "basis": self.basis,
            "N": len(self),
            "seed": int(self.seed),
            "noise_sigma": float(self.noise_sigma),
        }
        if self.kappas is not None:
            m["kappas"] = self.kappas.tolist()
        if self.packets is not None:
            m["packets"] = self.packets
        return m

    def index_of_mode(self, k) -> int:
        if self.kappas is None:
            raise MissingSampleError("dataset has no Fourier-mode inputs")
        hits = np.nonzero(np.all(self.kappas == np.asarray(k, dtype=np.int64), axis=1))[0]
        if hits.size == 0:
            raise MissingSampleError(f"mode {tuple(int(v) for v in k)} is not in the dataset")
        return int(hits[0])

    def lookup(self, f: SpatialField | np.ndarray) -> np.ndarray:
        """Output recorded for input ``f`` (exact match on the samples)."""
        vals = f.values if isinstance(f, SpatialField) else np.asarray(f, dtype=complex)
        diffs = np.max(np.abs(self.inputs - vals[None]), axis=tuple(range(1, vals.ndim + 1)))
        scale = max(float(np.max(np.abs(vals))), 1e-300)
        i = int(np.argmin(diffs))
        if diffs[i] > 1e-12 * scale:
            raise MissingSampleError("input is not in the dataset")
        return self.outputs[i]


def gen_dataset(V: Potential, basis: str = FOURIER, N: int = 16, seed: int = 0,
                noise_sigma: float = 0.0, modes=None) -> Dataset:
    """Generate ``N`` pairs ``(f_i, U_T f_i)``.

    The Fourier basis takes the ``N`` lowest modes in spiral order (or the
    explicit integer ``modes``); the Gaussian basis draws seeded packets.
    Outputs receive i.i.d. complex Gaussian noise with ``E |n|^2 = sigma^2``.
    """
    grid = V.grid
    if noise_sigma < 0:
        raise InvalidInputError("noise_sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    kappas = packets = None
    if basis == FOURIER:
        if modes is None:
            if N < 1:
                raise InvalidInputError("N must be >= 1")
            kappas = spiral_modes(grid, N)
        else:
            kappas = np.asarray(modes, dtype=np.int64).reshape(-1, grid.n_dim)
            N = kappas.shape[0]
        inputs = np.stack([fourier_mode(grid, k) for k in kappas])
    elif basis == GAUSSIAN:
        if N < 1:
            raise InvalidInputError("N must be >= 1")
        inputs, packets = gaussian_packets(grid, N, rng)
    else:
        raise InvalidInputError(f"unknown basis {basis!r}")
    outputs = evolve_batch(inputs, V)
    if noise_sigma > 0:
        noise = rng.standard_normal(outputs.shape) + 1j * rng.standard_normal(outputs.shape)
        outputs = outputs + noise * (noise_sigma / np.sqrt(2.0))
    return Dataset(grid, inputs, outputs, basis, int(seed), float(noise_sigma), V.digest(),
                   kappas, packets)
