"""Orthogonality identity, Born reconstruction and uniqueness diagnostics.

Sample convention: a sample at ``(tau, xi)`` estimates

    F(tau, xi) = int_0^T int V(t, x) exp(-i (tau t + xi . x)) dx dt,

the unnormalized space-time Fourier transform of the potential on the slab
(the unitary transform is ``F / (2 pi)^((n + 1) / 2)``). With probe modes
``kappa_1`` (input) and ``kappa_2`` (test function), ``tau = |k1|^2 - |k2|^2``
and ``xi = k2 - k1``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from sklearn.base import BaseEstimator

from .dataset import FOURIER, Dataset, evolve_batch, fourier_mode, gen_dataset, mode_frequency, square_modes
from .exceptions import InvalidInputError
from .grid import GridSpec, SpatialField
from .potentials import Potential
from .propagator import evolve, initial_to_final, solve_final_value

EPS_FLOOR = 1e-12


# -- evolution-map handles ----------------------------------------------------

class EvolutionMap:
    """``U_T`` for a potential, or the lookup table of a dataset."""

    def __init__(self, source):
        if isinstance(source, Potential):
            self.potential, self.dataset = source, None
            self.grid = source.grid
        elif isinstance(source, Dataset):
            self.potential, self.dataset = None, source
            self.grid = source.grid
        else:
            raise InvalidInputError("an evolution map needs a Potential or a Dataset")

    def __call__(self, f) -> np.ndarray:
        vals = f.values if isinstance(f, SpatialField) else np.asarray(f, dtype=complex)
        if self.dataset is not None:
            return self.dataset.lookup(vals)
        return initial_to_final(vals, self.potential)


def _as_map(h) -> EvolutionMap:
    return h if isinstance(h, EvolutionMap) else EvolutionMap(h)


def _vals(f) -> np.ndarray:
    return f.values if isinstance(f, SpatialField) else np.asarray(f, dtype=complex)


def identity_lhs(UT1, UT2, f, g) -> complex:
    """``i <(U_T^1 - U_T^2) f, g>`` with the discrete spatial inner product."""
    m1, m2 = _as_map(UT1), _as_map(UT2)
    if m1.grid != m2.grid:
        raise InvalidInputError("maps live on different grids")
    d = m1(f) - m2(f)
    return complex(1j * np.vdot(_vals(g), d) * m1.grid.cell_volume)


def identity_rhs(V1: Potential, V2: Potential, f, g) -> complex:
    """``int_Sigma (V1 - V2) u1 conj(v2)``.

    ``u1`` solves the forward problem with ``V1`` from ``f``; ``v2`` solves
    the final-value problem with ``conj(V2)`` and ``v2(T) = g``. The time
    integral uses the trapezoid rule with the potential at the nodes.
    """
    if V1.grid != V2.grid:
        raise InvalidInputError("potentials live on different grids")
    grid = V1.grid
    u1 = evolve(SpatialField(grid, _vals(f)), V1).values
    v2 = solve_final_value(SpatialField(grid, _vals(g)), V2).values
    dV = np.array(V1.nodes()) - np.array(V2.nodes())
    integrand = np.sum(dV * u1 * np.conj(v2), axis=tuple(range(1, grid.n_dim + 1))) * grid.cell_volume
    return complex(np.sum(grid.trapezoid_weights * integrand))


def identity_gap(V1: Potential, V2: Potential, f, g) -> tuple[complex, complex, float]:
    """``(lhs, rhs, relative gap)`` with the ``EPS_FLOOR`` guard."""
    lhs = identity_lhs(V1, V2, f, g)
    rhs = identity_rhs(V1, V2, f, g)
    gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), EPS_FLOOR)
    return lhs, rhs, gap


# -- samples ------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencySample:
    tau: float
    xi: tuple
    value: complex
    kappa1: tuple
    kappa2: tuple
    weight: float = 1.0


def trapezoid_time_factor(grid: GridSpec, tau) -> np.ndarray:
    """``sum_k w_k exp(-i tau t_k)``: the time integral as the splitting scheme sees it."""
    tau = np.asarray(tau, dtype=float)
    # sample taus repeat heavily (integer mode arithmetic); evaluate each once
    uniq, inv = np.unique(tau, return_inverse=True)
    vals = np.exp(-1j * np.multiply.outer(uniq, grid.times)) @ grid.trapezoid_weights
    return vals[inv].reshape(tau.shape)


def _spatial_coefficients(grid: GridSpec, fields: np.ndarray) -> np.ndarray:
    """``dV sum_x u(x) exp(-i xi_k x)`` for every grid mode (FFT order)."""
    axes = tuple(range(fields.ndim - grid.n_dim, fields.ndim))
    sign = 1.0
    for j in range(grid.n_dim):
        k = np.rint(grid.freq_axis * grid.half_width / np.pi).astype(int)
        sh = [1] * fields.ndim
        sh[fields.ndim - grid.n_dim + j] = grid.n_space
        # the grid starts at -L: e^{-i xi_k x_j} = (-1)^k e^{-2 pi i j k / n}
        sign = sign * np.where(k % 2 == 0, 1.0, -1.0).reshape(sh)
    return grid.cell_volume * sign * sfft.fftn(fields, axes=axes)


def _mode_grid(grid: GridSpec) -> np.ndarray:
    """Integer mode vector of every FFT-ordered frequency, shape ``(*space, n)``."""
    k = np.rint(grid.freq_axis * grid.half_width / np.pi).astype(np.int64)
    return np.stack(np.meshgrid(*([k] * grid.n_dim), indexing="ij"), axis=-1)


@dataclass(frozen=True, eq=False)
class SampleTable:
    """All Born samples from a Fourier-mode dataset.

    ``values[i, *k2]`` is the sample for probe ``kappas[i]`` and test mode
    ``k2`` (FFT order). ``tau`` has the same shape; ``xi_index[i, *k2]``
    holds the flat FFT index of ``xi = k2 - k1`` (wrapped on the grid).
    """

    grid: GridSpec
    kappas: np.ndarray
    values: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    xi_index: np.ndarray = field(repr=False)

    def sample(self, i: int, k2) -> FrequencySample:
        g = self.grid
        n = g.n_space
        idx = tuple(int(v) % n for v in k2)
        k1 = self.kappas[i]
        kap1 = mode_frequency(g, k1)
        kap2 = mode_frequency(g, k2)
        xi = mode_frequency(g, np.asarray(k2) - k1)
        return FrequencySample(float(self.tau[(i,) + idx]), tuple(float(v) for v in xi),
                               complex(self.values[(i,) + idx]), tuple(kap1), tuple(kap2))

    def rows(self):
        """``(tau, xi..., re, im, weight)`` rows for CSV output."""
        g = self.grid
        modes = _mode_grid(g).reshape(-1, g.n_dim)
        for i, k1 in enumerate(self.kappas):
            xi = mode_frequency(g, modes - k1)
            tau = self.tau[i].ravel()
            val = self.values[i].ravel()
            w = np.abs(trapezoid_time_factor(g, tau)) ** 2
            for j in range(modes.shape[0]):
                yield (tau[j], *xi[j], val[j].real, val[j].imag, w[j])


def sample_table(data: Dataset, reference: np.ndarray | None = None) -> SampleTable:
    """Born samples ``e^{i |k2|^2 T} i <U_T f - U_ref f, e^{i k2 x}>`` for every probe and test mode.

    ``reference`` defaults to the free evolution of the probes.
    """
    if data.basis != FOURIER or data.kappas is None:
        raise InvalidInputError("Born samples need a Fourier-mode dataset")
    g = data.grid
    T = g.horizon
    kap1 = mode_frequency(g, data.kappas)
    if reference is None:
        reference = data.inputs * np.exp(-1j * np.sum(kap1**2, axis=1) * T).reshape((-1,) + (1,) * g.n_dim)
    coef = _spatial_coefficients(g, data.outputs - reference)
    k2sq = g.freq_sq()
    values = 1j * np.exp(1j * k2sq * T)[None] * coef
    tau = np.sum(kap1**2, axis=1).reshape((-1,) + (1,) * g.n_dim) - k2sq[None]
    modes = _mode_grid(g)
    n = g.n_space
    xi_int = (modes[None] - data.kappas.reshape((-1,) + (1,) * g.n_dim + (g.n_dim,))) % n
    flat = np.ravel_multi_index(tuple(np.moveaxis(xi_int, -1, 0)), g.space_shape)
    return SampleTable(g, data.kappas, values, tau, flat)


def born_sample(source, kappa1, kappa2) -> FrequencySample:
    """One Born sample for integer probe modes ``kappa1`` (input) and ``kappa2`` (test)."""
    if isinstance(source, Dataset):
        grid = source.grid
        i = source.index_of_mode(kappa1)
        out = source.outputs[i]
    else:
        m = _as_map(source)
        grid = m.grid
        out = m(fourier_mode(grid, kappa1))
    for k in (kappa1, kappa2):
        arr = np.asarray(k)
        if arr.shape != (grid.n_dim,) or not np.all(arr == np.rint(arr)):
            raise InvalidInputError("probe modes must be integer vectors on the grid")
    k1 = np.asarray(kappa1, dtype=np.int64)
    k2 = np.asarray(kappa2, dtype=np.int64)
    kap1, kap2 = mode_frequency(grid, k1), mode_frequency(grid, k2)
    T = grid.horizon
    f = fourier_mode(grid, k1)
    free = f * np.exp(-1j * float(kap1 @ kap1) * T)
    g = fourier_mode(grid, k2)
    inner = np.vdot(g, out - free) * grid.cell_volume
    value = 1j * np.exp(1j * float(kap2 @ kap2) * T) * inner
    tau = float(kap1 @ kap1 - kap2 @ kap2)
    xi = mode_frequency(grid, k2 - k1)
    w = float(abs(trapezoid_time_factor(grid, tau)) ** 2)
    return FrequencySample(tau, tuple(float(v) for v in xi), complex(value), tuple(kap1), tuple(kap2), w)


# -- reconstruction -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    estimate: Potential
    relative_l2_error: float | None
    samples_used: int
    conditioning: float
    method: str
    flagged: int = 0
    misfit_history: tuple = ()
    early_stop: bool = False
    absolute_l2_error: float | None = None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "relative_l2_error": self.relative_l2_error,
            "absolute_l2_error": self.absolute_l2_error,
            "samples_used": int(self.samples_used),
            "conditioning": float(self.conditioning),
            "rank_deficient_frequencies": int(self.flagged),
            "misfit_history": [float(m) for m in self.misfit_history],
            "early_stop": bool(self.early_stop),
            "time_dependent": bool(self.estimate.time_dependent),
        }


def l2_error(W: Potential, V: Potential) -> tuple[float, float]:
    """``(absolute, relative)`` L2 distance on the slab (trapezoid in time)."""
    g = V.grid
    d = np.array(W.nodes()) - np.array(V.nodes())
    ax = tuple(range(1, g.n_dim + 1))
    wt = g.trapezoid_weights
    num = np.sqrt(np.sum(wt * np.sum(np.abs(d) ** 2, axis=ax)) * g.cell_volume)
    den = np.sqrt(np.sum(wt * np.sum(np.abs(np.array(V.nodes())) ** 2, axis=ax)) * g.cell_volume)
    return float(num), float(num / max(den, EPS_FLOOR))


def _from_spatial_coefficients(grid: GridSpec, coef: np.ndarray) -> np.ndarray:
    """Invert :func:`_spatial_coefficients` over the trailing spatial axes."""
    axes = tuple(range(coef.ndim - grid.n_dim, coef.ndim))
    sign = 1.0
    for j in range(grid.n_dim):
        k = np.rint(grid.freq_axis * grid.half_width / np.pi).astype(int)
        sh = [1] * coef.ndim
        sh[coef.ndim - grid.n_dim + j] = grid.n_space
        sign = sign * np.where(k % 2 == 0, 1.0, -1.0).reshape(sh)
    return sfft.ifftn(sign * coef, axes=axes) / grid.cell_volume


def _solve_time_independent(table: SampleTable):
    g = table.grid
    E = trapezoid_time_factor(g, table.tau.ravel()).reshape(table.tau.shape)
    num = np.bincount(table.xi_index.ravel(), weights=(np.conj(E) * table.values).real.ravel(),
                      minlength=g.n_space**g.n_dim) \
        + 1j * np.bincount(table.xi_index.ravel(), weights=(np.conj(E) * table.values).imag.ravel(),
                           minlength=g.n_space**g.n_dim)
    den = np.bincount(table.xi_index.ravel(), weights=(np.abs(E) ** 2).ravel(), minlength=g.n_space**g.n_dim)
    covered = den > 0
    coef = np.where(covered, num / np.where(covered, den, 1.0), 0.0).reshape(g.space_shape)
    cond = float(np.sqrt(np.min(den[covered]))) if np.any(covered) else 0.0
    return coef, cond, int(np.sum(~covered))


def time_design_matrix(grid: GridSpec, tau: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """Linearized response of the splitting scheme to ``exp(i omega t)`` at frequency ``tau``.

    Each step integrates the midpoint sample against the endpoint average:
    ``(dt/2) sum_k e^{i omega t_{k+1/2}} (e^{-i tau t_k} + e^{-i tau t_{k+1}})``.
    """
    t = grid.times
    tm = t[:-1] + grid.dt / 2
    a = np.exp(-1j * np.multiply.outer(tau, t))
    ends = 0.5 * grid.dt * (a[:, :-1] + a[:, 1:])
    return ends @ np.exp(1j * np.multiply.outer(tm, omegas))


def _solve_time_dependent(table: SampleTable, m_max: int, rcond: float):
    g = table.grid
    T = g.horizon
    n_sp = g.n_space**g.n_dim
    N = table.values.shape[0]
    vals = table.values.reshape(N, -1)
    taus = table.tau.reshape(N, -1)
    xi_idx = table.xi_index.reshape(N, -1)
    # regroup samples by xi: every probe contributes exactly one sample per xi
    order = np.argsort(xi_idx, axis=1, kind="stable")
    vals_x = np.take_along_axis(vals, order, axis=1)
    taus_x = np.take_along_axis(taus, order, axis=1)
    ms = np.arange(-m_max, m_max + 1)
    om = 2 * np.pi * ms / T
    # taus repeat across xi; build the design rows once per distinct tau
    uniq, inv = np.unique(taus_x, return_inverse=True)
    inv = inv.reshape(taus_x.shape)
    design = time_design_matrix(g, uniq, om)
    coefs = np.zeros((ms.size, n_sp), dtype=complex)
    smin, flagged = np.inf, 0
    for j in range(n_sp):
        tau = taus_x[:, j]
        use = (om >= tau.min() - 1e-9) & (om <= tau.max() + 1e-9)
        if not np.any(use):
            flagged += 1
            continue
        A = design[inv[:, j]][:, use]
        s = np.linalg.svd(A, compute_uv=False)
        if s[-1] <= rcond * s[0]:
            flagged += 1
            continue
        smin = min(smin, float(s[-1]))
        c, *_ = np.linalg.lstsq(A, vals_x[:, j], rcond=None)
        coefs[use, j] = c
    return ms, coefs.reshape((ms.size,) + g.space_shape), (0.0 if smin == np.inf else smin), flagged


def _potential_from_time_series(grid: GridSpec, ms: np.ndarray, coefs: np.ndarray, label: str) -> Potential:
    """Potential with ``V(t) = sum_m c_m e^{2 pi i m t / T}`` at nodes and midpoints."""
    spatial = _from_spatial_coefficients(grid, coefs)
    om = 2 * np.pi * ms / grid.horizon

    def at(times):
        return np.tensordot(np.exp(1j * np.multiply.outer(times, om)), spatial, axes=1)

    return Potential(grid, at(grid.times), at(grid.times[:-1] + grid.dt / 2), label=label)


def reconstruct_born(source, time_independent: bool = True, truth: Potential | None = None,
                     m_max: int = 4, rcond: float = 1e-10) -> ReconstructionReport:
    """Born estimate of ``V`` from a Fourier-mode dataset (or a precomputed :class:`SampleTable`).

    Time-independent mode averages all samples at each ``xi`` against the
    discrete time factor of the scheme. Time-dependent mode fits, per
    ``xi``, the Fourier coefficients ``c_m`` (``|m| <= m_max``, ``2 pi m / T``
    inside the sampled ``tau`` range) by least squares; rank-deficient
    systems are flagged and left at zero.
    """
    table = source if isinstance(source, SampleTable) else sample_table(source)
    g = table.grid
    if time_independent:
        coef, cond, flagged = _solve_time_independent(table)
        est = Potential(g, _from_spatial_coefficients(g, coef), label="born")
    else:
        ms, coefs, cond, flagged = _solve_time_dependent(table, m_max, rcond)
        est = _potential_from_time_series(g, ms, coefs, "born-td")
    abs_err = rel = None
    if truth is not None:
        abs_err, rel = l2_error(est, truth)
    return ReconstructionReport(est, rel, int(table.values.size), cond, "born", flagged,
                                absolute_l2_error=abs_err)


def data_misfit(data: Dataset, W: Potential) -> float:
    """``||U_T^W f_i - y_i|| / ||y_i||`` over the whole dataset."""
    pred = evolve_batch(data.inputs, W)
    return float(np.linalg.norm(pred - data.outputs) / max(np.linalg.norm(data.outputs), EPS_FLOOR))


def reconstruct_iterative(data: Dataset, initial: Potential | None = None, iters: int = 5,
                          time_independent: bool = True, truth: Potential | None = None,
                          m_max: int = 4, rcond: float = 1e-10) -> ReconstructionReport:
    """Refine ``W <- W + Born(y - U_T^W f)`` and keep the iterate with the smallest misfit.

    The data residual against the current estimate is read through the same
    Born sampling as the first step. Stops early (flagging it) once the
    misfit has grown twice in a row.
    """
    if iters < 1:
        raise InvalidInputError("iters must be >= 1")
    g = data.grid
    W = initial if initial is not None else Potential.zero(g)
    if W.grid != g:
        raise InvalidInputError("initial potential lives on a different grid")
    best, best_misfit = W, None
    history = []
    growth = 0
    early = False
    samples = cond = flagged = 0
    for _ in range(iters):
        pred = evolve_batch(data.inputs, W)
        misfit = float(np.linalg.norm(pred - data.outputs) / max(np.linalg.norm(data.outputs), EPS_FLOOR))
        history.append(misfit)
        if best_misfit is None or misfit < best_misfit:
            best, best_misfit = W, misfit
        if len(history) > 1 and misfit > history[-2]:
            growth += 1
            if growth >= 2:
                early = True
                warnings.warn("iterative reconstruction stopped: misfit grew twice in a row", RuntimeWarning)
                break
        else:
            growth = 0
        table = sample_table(data, reference=pred)
        step = reconstruct_born(table, time_independent, None, m_max, rcond)
        samples, cond, flagged = step.samples_used, step.conditioning, step.flagged
        W = _add(W, step.estimate)
    else:
        misfit = data_misfit(data, W)
        history.append(misfit)
        if misfit < best_misfit:
            best, best_misfit = W, misfit
    abs_err = rel = None
    if truth is not None:
        abs_err, rel = l2_error(best, truth)
    best = Potential(best.grid, best.values, best.midpoints, best.decay_rate, False, "iterative")
    return ReconstructionReport(best, rel, samples, cond, "iterative", flagged, tuple(history), early,
                                abs_err)


def _add(a: Potential, b: Potential) -> Potential:
    out = a + b
    return Potential(out.grid, out.values, out.midpoints, None, False, "estimate")


def probe_dataset(V: Potential, K: int = 8, noise_sigma: float = 0.0, seed: int = 0) -> Dataset:
    """Fourier dataset over the square probe band ``max |k_j| <= K``."""
    return gen_dataset(V, FOURIER, seed=seed, noise_sigma=noise_sigma, modes=square_modes(V.grid, K))


# -- uniqueness ---------------------------------------------------------------

def uniqueness_gap(V1: Potential, V2: Potential, probes: int = 8, seed: int = 0) -> float:
    """``max_f ||(U_T^1 - U_T^2) f||`` over random unit white-noise probes."""
    if probes < 1:
        raise InvalidInputError("probes must be >= 1")
    if V1.grid != V2.grid:
        raise InvalidInputError("potentials live on different grids")
    g = V1.grid
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((probes,) + g.space_shape) + 1j * rng.standard_normal((probes,) + g.space_shape)
    ax = tuple(range(1, g.n_dim + 1))
    f /= np.sqrt(np.sum(np.abs(f) ** 2, axis=ax, keepdims=True) * g.cell_volume)
    d = evolve_batch(f, V1) - evolve_batch(f, V2)
    return float(np.max(np.sqrt(np.sum(np.abs(d) ** 2, axis=ax) * g.cell_volume)))


# -- estimator interface --------------------------------------------------------

def _check_states(X, grid: GridSpec, name: str) -> np.ndarray:
    arr = np.asarray(X)
    if arr.dtype == object:
        raise InvalidInputError(f"{name} must be a numeric array")
    arr = arr.astype(complex)
    if arr.ndim == grid.n_dim:
        arr = arr[None]
    if arr.ndim != grid.n_dim + 1 or arr.shape[1:] != grid.space_shape:
        raise InvalidInputError(f"{name} must have shape (n_samples, {grid.space_shape})")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def _detect_modes(X: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Integer modes of inputs that are exact plane waves ``exp(i kappa . x)``."""
    coef = _spatial_coefficients(grid, X)
    flat = np.abs(coef.reshape(X.shape[0], -1))
    top = np.argmax(flat, axis=1)
    rest = flat.copy()
    rest[np.arange(X.shape[0]), top] = 0
    if np.any(rest.max(axis=1) > 1e-8 * flat.max(axis=1)):
        raise InvalidInputError("inputs must be single Fourier modes exp(i kappa . x)")
    modes = _mode_grid(grid).reshape(-1, grid.n_dim)
    return modes[top]


class _ReconstructorBase(BaseEstimator):
    def _dataset(self, X, y) -> Dataset:
        if isinstance(X, Dataset):
            return X
        if y is None:
            raise InvalidInputError("fit needs final states y unless X is a Dataset")
        grid = self.grid if self.grid is not None else GridSpec()
        Xa = _check_states(X, grid, "X")
        ya = _check_states(y, grid, "y")
        if Xa.shape != ya.shape:
            raise InvalidInputError("X and y differ in shape")
        return Dataset(grid, Xa, ya, FOURIER, kappas=_detect_modes(Xa, grid))

    def _check_fitted(self):
        if not hasattr(self, "potential_"):
            from sklearn.exceptions import NotFittedError
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")

    def predict(self, X) -> np.ndarray:
        """Final states under the learned potential."""
        self._check_fitted()
        Xa = _check_states(X, self.potential_.grid, "X")
        return evolve_batch(Xa, self.potential_)

    def score(self, X, y) -> float:
        """Negative relative misfit of :meth:`predict` against ``y``."""
        pred = self.predict(X)
        ya = _check_states(y, self.potential_.grid, "y")
        return -float(np.linalg.norm(pred - ya) / max(np.linalg.norm(ya), EPS_FLOOR))


class BornReconstructor(_ReconstructorBase):
    """Estimator wrapper around :func:`reconstruct_born`.

    ``fit(X, y)`` takes plane-wave initial states and their final states (or
    a :class:`Dataset` as ``X``); the estimate lands in ``potential_`` and
    the diagnostics in ``report_``.
    """

    def __init__(self, time_independent: bool = True, m_max: int = 4, rcond: float = 1e-10,
                 grid: GridSpec | None = None):
        self.time_independent = time_independent
        self.m_max = m_max
        self.rcond = rcond
        self.grid = grid

    def fit(self, X, y=None, truth: Potential | None = None):
        data = self._dataset(X, y)
        self.report_ = reconstruct_born(data, self.time_independent, truth, self.m_max, self.rcond)
        self.potential_ = self.report_.estimate
        return self


class IterativeReconstructor(_ReconstructorBase):
    """Estimator wrapper around :func:`reconstruct_iterative`."""

    def __init__(self, iters: int = 5, time_independent: bool = True, m_max: int = 4,
                 rcond: float = 1e-10, grid: GridSpec | None = None):
        self.iters = iters
        self.time_independent = time_independent
        self.m_max = m_max
        self.rcond = rcond
        self.grid = grid

    def fit(self, X, y=None, initial: Potential | None = None, truth: Potential | None = None):
        data = self._dataset(X, y)
        self.report_ = reconstruct_iterative(data, initial, self.iters, self.time_independent, truth,
                                             self.m_max, self.rcond)
        self.potential_ = self.report_.estimate
        return self


__all__ = [
    "EvolutionMap", "FrequencySample", "ReconstructionReport", "SampleTable",
    "identity_lhs", "identity_rhs", "identity_gap", "born_sample", "sample_table",
    "reconstruct_born", "reconstruct_iterative", "uniqueness_gap", "probe_dataset",
    "trapezoid_time_factor", "time_design_matrix", "data_misfit", "l2_error",
    "BornReconstructor", "IterativeReconstructor",
]
