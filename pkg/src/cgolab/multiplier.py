"""Inverse operators of constant-coefficient conjugated Schrodinger operators.

For ``lambda`` real and ``zeta`` complex the operator
``P = i d_t + Lap + 2 zeta . grad + zeta . zeta - lambda`` acts on
``exp(i (tau t + xi . x))`` as multiplication by the symbol

    p(tau, xi) = -lambda + zeta . zeta - tau - |xi|^2 + 2 i zeta . xi.

Two realizations of its inverse ``S`` live here:

* :func:`apply_S` multiplies frequency by frequency on the periodic
  extended window (Tikhonov-regularized where ``p`` vanishes).
* :class:`LineMultiplier` treats the direction of ``nu`` as the real line,
  where the inverse has an exponential kernel with a long tail (length about
  ``2 |nu| / |a|``) that the periodic box would wrap around. Time and the
  transverse directions stay periodic.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .dyadic import WeightedNormParams, build_dyadic, x_norm, y_norm
from .exceptions import InvalidInputError, PreconditionError, SingularSymbolError
from .grid import EXTENDED, FREQUENCY, GridSpec, SpaceTimeField

DEFAULT_DELTA = 1e-8
ROUNDING_FLOOR = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class SymbolParams:
    """Parameters ``(lambda, zeta)`` of the symbol and the regularization ``delta``."""

    lam: float
    zeta: tuple
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        zeta = tuple(complex(z) for z in np.ravel(self.zeta))
        if np.linalg.norm(np.real(zeta)) == 0:
            raise InvalidInputError("Re zeta must be nonzero")
        if not 0 <= self.delta <= 1e-2:
            raise InvalidInputError(f"delta must lie in [0, 1e-2], got {self.delta}")
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def for_nu(cls, nu, delta: float = DEFAULT_DELTA) -> "SymbolParams":
        """``lambda = |nu|^2``, ``zeta = nu``: the operator ``i d_t + Lap + 2 nu . grad``."""
        nu = np.asarray(nu, dtype=float).ravel()
        return cls(float(nu @ nu), tuple(nu), delta)


def symbol_eval(p: SymbolParams, tau, xi):
    """Evaluate ``p_(lambda, zeta)`` at ``tau`` and ``xi`` (broadcasting).

    ``xi`` is a sequence of ``n`` arrays (or scalars).
    """
    zeta = np.asarray(p.zeta)
    if len(xi) != zeta.size:
        raise InvalidInputError(f"xi needs {zeta.size} components")
    zz = complex(np.sum(zeta * zeta))
    xi_sq = sum(np.asarray(x) ** 2 for x in xi)
    zx = sum(z * np.asarray(x) for z, x in zip(zeta, xi))
    return -p.lam + zz - np.asarray(tau) - xi_sq + 2j * zx


def normalized_symbol(tau, xi):
    """``p(tau, xi) = tau - |xi|^2 + i xi_n``."""
    xi_sq = sum(np.asarray(x) ** 2 for x in xi)
    return np.asarray(tau) - xi_sq + 1j * np.asarray(xi[-1])


def _time_offset(grid: GridSpec, offset: bool) -> float:
    """Half a time-frequency step when ``offset`` is set, else 0."""
    return np.pi / (grid.n_time_ext * grid.dt) if offset else 0.0


def _spacetime_freqs(grid: GridSpec, shift: float = 0.0):
    tau = (grid.time_freq_ext + shift).reshape((-1,) + (1,) * grid.n_dim)
    xi = [k[None] for k in grid.freqs()]
    return tau, xi


def symbol_grid(p: SymbolParams, grid: GridSpec, time_offset: bool = False) -> np.ndarray:
    tau, xi = _spacetime_freqs(grid, _time_offset(grid, time_offset))
    return np.broadcast_to(symbol_eval(p, tau, xi), (grid.n_time_ext,) + grid.space_shape)


def _check_extended(f: SpaceTimeField):
    if f.support_tag != EXTENDED:
        raise PreconditionError("multipliers act on extended fields; call .embed() first")
    if f.domain_tag == FREQUENCY:
        raise PreconditionError("expected a physical-domain field")


def _modulate(grid: GridSpec, values: np.ndarray, shift: float, sign: int) -> np.ndarray:
    if shift == 0.0:
        return values
    ph = np.exp(sign * 1j * shift * grid.times_ext).reshape((-1,) + (1,) * grid.n_dim)
    return values * ph


def _multiply(f: SpaceTimeField, mult: np.ndarray, shift: float) -> SpaceTimeField:
    g = f.grid
    vals = _modulate(g, f.values, shift, -1)
    out = sfft.ifftn(mult * sfft.fftn(vals))
    return SpaceTimeField(g, _modulate(g, out, shift, +1), support_tag=EXTENDED)


def inverse_symbol(symbol: np.ndarray, delta: float, frequencies=None) -> np.ndarray:
    """Regularized ``1/p``.

    Exact ``1/p`` wherever ``|p| > delta M`` (``M = max |p|``); on the
    remaining near-characteristic frequencies the Tikhonov form
    ``conj(p) / (|p|^2 + (delta M)^2)`` is used. ``delta = 0`` demands exact
    inversion everywhere and raises on a vanishing symbol. Symbol values
    within ``ROUNDING_FLOOR * M`` of zero are treated as exact zeros.
    """
    # values below the rounding level of the symbol's terms count as zeros
    symbol = np.where(np.abs(symbol) <= ROUNDING_FLOOR * float(np.max(np.abs(symbol))), 0.0, symbol)
    if delta == 0:
        zero = symbol == 0
        if np.any(zero):
            idx = tuple(int(i[0]) for i in np.nonzero(zero))
            freq = None if frequencies is None else frequencies(idx)
            raise SingularSymbolError(f"symbol vanishes at grid frequency {freq or idx}", freq)
        return 1.0 / symbol
    M = float(np.max(np.abs(symbol)))
    eps = delta * M
    small = np.abs(symbol) <= eps
    safe = np.where(small, 1.0, symbol)
    return np.where(small, np.conj(symbol) / (np.abs(symbol) ** 2 + eps**2), 1.0 / safe)


def regularized_mask(symbol: np.ndarray, delta: float) -> np.ndarray:
    """Frequencies handled by the Tikhonov branch of :func:`inverse_symbol`."""
    return np.abs(symbol) <= delta * float(np.max(np.abs(symbol)))


def apply_forward_operator(p: SymbolParams, f: SpaceTimeField, time_offset: bool = False) -> SpaceTimeField:
    """``(i d_t + Lap + 2 zeta . grad + zeta . zeta - lambda) f`` computed spectrally."""
    _check_extended(f)
    shift = _time_offset(f.grid, time_offset)
    return _multiply(f, symbol_grid(p, f.grid, time_offset), shift)


def apply_S(p: SymbolParams, f: SpaceTimeField, time_offset: bool = False) -> SpaceTimeField:
    """Periodic realization of ``S_(lambda, zeta) f``.

    With ``time_offset`` the time frequencies are shifted by half a grid step
    (the field is modulated before and after the transform), which keeps the
    grid off the zero set of symbols with real coefficients in time.
    """
    _check_extended(f)
    g = f.grid
    shift = _time_offset(g, time_offset)
    sym = symbol_grid(p, g, time_offset)

    def freq(idx):
        tau, xi = _spacetime_freqs(g, shift)
        return (float(tau.ravel()[idx[0]]),) + tuple(float(x.ravel()[i]) for x, i in zip(xi, idx[1:]))

    return _multiply(f, inverse_symbol(sym, p.delta, freq), shift)


def inversion_residual(p: SymbolParams, f: SpaceTimeField, time_offset: bool = False) -> float:
    """Relative error of ``P S f - f`` restricted to frequencies with ``|p| > delta M``.

    Returned as ``||P S f - f|| / ||f||`` over that frequency set (Parseval).
    """
    _check_extended(f)
    g = f.grid
    shift = _time_offset(g, time_offset)
    sym = symbol_grid(p, g, time_offset)
    keep = ~regularized_mask(sym, p.delta)
    u = apply_S(p, f, time_offset)
    Pu = _multiply(u, sym, shift)
    fh = sfft.fftn(_modulate(g, f.values, shift, -1))
    rh = sfft.fftn(_modulate(g, Pu.values, shift, -1)) - fh
    den = np.linalg.norm(fh[keep])
    return float(np.linalg.norm(rh[keep]) / den) if den > 0 else 0.0


def apply_S_normalized(nu, f: SpaceTimeField, delta: float = DEFAULT_DELTA,
                       time_offset: bool = False) -> SpaceTimeField:
    """``S_(0, nu)`` evaluated through the normalized symbol.

    Each grid frequency ``(sigma, eta)`` is mapped to
    ``tau = (1 - sigma/|nu|^2) / 4`` and ``xi = Q^T eta / (2 |nu|)``, where
    ``Q`` is the rotation with ``Q e_n = nu/|nu|``, and the multiplier is
    ``1 / (4 |nu|^2 p(tau, xi))``.
    """
    from .cgo import householder  # local import: cgo builds on this module

    _check_extended(f)
    g = f.grid
    nu = np.asarray(nu, dtype=float).ravel()
    nn = float(np.linalg.norm(nu))
    Q = householder(nu / nn)
    shift = _time_offset(g, time_offset)
    sigma, eta = _spacetime_freqs(g, shift)
    tau = (1.0 - sigma / nn**2) / 4.0
    xi = [sum(Q[i, j] * eta[i] for i in range(g.n_dim)) / (2 * nn) for j in range(g.n_dim)]
    sym = 4 * nn**2 * np.broadcast_to(normalized_symbol(tau, xi), (g.n_time_ext,) + g.space_shape)
    return _multiply(f, inverse_symbol(sym, delta), shift)


# -- exponential conjugation ------------------------------------------------

def _nu_vector(grid: GridSpec, nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float).ravel()
    if nu.size != grid.n_dim or not np.any(nu):
        raise InvalidInputError(f"nu must be a nonzero {grid.n_dim}-vector")
    return nu


def _spectral(w: SpaceTimeField, sym: np.ndarray) -> np.ndarray:
    return sfft.ifftn(sym * sfft.fftn(w.values))


def conjugated_operator(nu, w: SpaceTimeField) -> SpaceTimeField:
    """``(i d_t + Lap + 2 nu . grad) w`` computed spectrally."""
    _check_extended(w)
    g = w.grid
    nu = _nu_vector(g, nu)
    tau, xi = _spacetime_freqs(g)
    sym = -tau - g.freq_sq()[None] + 2j * sum(n * k for n, k in zip(nu, xi))
    return SpaceTimeField(g, _spectral(w, sym), support_tag=EXTENDED)


def conjugate_by_phase(nu, w: SpaceTimeField) -> SpaceTimeField:
    """``exp(-phi) (i d_t + Lap) [exp(phi) w]`` with ``phi = i |nu|^2 t + nu . x``.

    The weighted product is differentiated directly, so ``w`` must vanish
    near the time ends of the window and near the spatial boundary, and
    ``exp(|nu| L)`` must stay representable.
    """
    _check_extended(w)
    g = w.grid
    nu = _nu_vector(g, nu)
    t = g.times_ext.reshape((-1,) + (1,) * g.n_dim)
    phi = 1j * float(nu @ nu) * t + sum(n * x for n, x in zip(nu, g.coords()))[None]
    tau, _ = _spacetime_freqs(g)
    sym = -tau - g.freq_sq()[None]
    lifted = SpaceTimeField(g, np.exp(phi) * w.values, support_tag=EXTENDED)
    return SpaceTimeField(g, np.exp(-phi) * _spectral(lifted, sym), support_tag=EXTENDED)


def conjugation_identity_error(nu, w: SpaceTimeField) -> float:
    """Relative gap between :func:`conjugate_by_phase` and :func:`conjugated_operator`.

    Both sides are multiplied by ``exp(nu . x)`` before comparing. Unweighted,
    rounding in the lifted derivative is amplified by up to ``exp(2 |nu| L)``
    where the weight is small, which says nothing about the identity.
    """
    g = w.grid
    weight = np.exp(sum(n * x for n, x in zip(_nu_vector(g, nu), g.coords())))[None]
    a = weight * conjugate_by_phase(nu, w).values
    b = weight * conjugated_operator(nu, w).values
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def plancherel_split(nu, w: SpaceTimeField) -> tuple[float, float, float]:
    """Squared norms ``(|P_nu w|^2, |(i d_t + Lap) w|^2, 4 |nu . grad w|^2)``.

    The first term is measured through :func:`conjugate_by_phase`, the other
    two spectrally; the first equals the sum of the others.
    """
    _check_extended(w)
    g = w.grid
    nu = _nu_vector(g, nu)
    tau, xi = _spacetime_freqs(g)
    vol = g.dt * g.cell_volume

    def sq(vals):
        return float(np.sum(np.abs(vals) ** 2) * vol)

    free = _spectral(w, -tau - g.freq_sq()[None])
    transport = _spectral(w, 1j * sum(n * k for n, k in zip(nu, xi)))
    return sq(conjugate_by_phase(nu, w).values), sq(free), 4 * sq(transport)


def poincare_constant(nu, w: SpaceTimeField, R: float) -> float:
    """Empirical ``C`` in ``|nu| |w| <= C R |(i d_t + Lap + 2 nu . grad) w|``."""
    num = float(np.linalg.norm(_nu_vector(w.grid, nu))) * np.linalg.norm(w.values)
    return float(num / (R * np.linalg.norm(conjugated_operator(nu, w).values)))


def poincare_sweep(grid: GridSpec, nu_norms=(1.0, 2.0, 4.0, 8.0), radii=(1.25, 2.5, 5.0),
                   seed: int = 0, direction=None) -> list[dict]:
    """Empirical Poincare constants over a sweep of ``|nu|`` and strip radii.

    For each ``R`` the field is a Gaussian of width ``R/5`` across the strip
    ``|nu . x| < |nu| R`` times a random transverse packet and a slab time
    profile; the same field is reused for every ``|nu|``.
    """
    rng = np.random.default_rng(seed)
    d = np.ones(grid.n_dim) if direction is None else np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    x = grid.coords()
    t = grid.times_ext.reshape((-1,) + (1,) * grid.n_dim)
    T = grid.horizon
    rows = []
    for R in radii:
        s = sum(dj * xj for dj, xj in zip(d, x))
        perp2 = sum(xj**2 for xj in x) - s**2
        k = rng.normal(size=grid.n_dim)
        spatial = np.exp(-(s / (R / 5)) ** 2 / 2 - perp2 / 2 + 1j * sum(kj * xj for kj, xj in zip(k, x)))
        vals = np.exp(-((t - T / 2) / (T / 16)) ** 2 / 2) * spatial[None]
        w = SpaceTimeField(grid, vals, support_tag=EXTENDED)
        for nn in nu_norms:
            rows.append({"nu": float(nn), "R": float(R), "C": poincare_constant(nn * d, w, R)})
    return rows


def smooth_slab_field(grid: GridSpec, rng: np.random.Generator, packets: int = 3,
                      width=(0.5, 0.6), center_box: float = 1.5) -> SpaceTimeField:
    """Random sum of Gaussian packets, negligible outside the slab and the box.

    Time profiles have width ``T/16`` and centres in the middle half of the
    slab, so the field is below 1e-14 of its peak at the slab ends. With the
    default widths and centres, ``exp(nu . x)`` times the field stays below
    1e-10 of its peak on the box boundary for ``|nu| <= 1.5``.
    """
    T = grid.horizon
    t = grid.times_ext.reshape((-1,) + (1,) * grid.n_dim)
    x = grid.coords()
    out = np.zeros((grid.n_time_ext,) + grid.space_shape, dtype=complex)
    for _ in range(packets):
        t0 = rng.uniform(0.375 * T, 0.625 * T)
        c = rng.uniform(-center_box, center_box, grid.n_dim)
        k = rng.integers(-1, 2, grid.n_dim)
        s = rng.uniform(*width)
        r2 = sum((xj - cj) ** 2 for xj, cj in zip(x, c))
        spatial = np.exp(-r2 / (2 * s**2) + 1j * sum(kj * xj for kj, xj in zip(k, x)))
        amp = rng.normal() + 1j * rng.normal()
        out += amp * np.exp(-((t - t0) / (T / 16)) ** 2 / 2) * spatial[None]
    return SpaceTimeField(grid, out, support_tag=EXTENDED)


# -- the line realization ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class LineMultiplier:
    """``S_nu`` with ``nu = |nu| e_n``, exact on the real line in ``x_n``.

    After transforming in ``t`` and ``x' = (x_1, ..., x_{n-1})`` every line
    ``(tau, xi')`` carries the ODE ``u'' + 2|nu| u' + a u = f`` with
    ``a = -tau - |xi'|^2``. The source is the trigonometric interpolant of
    ``f`` on ``[-L, L)`` extended by zero, and the bounded solution is
    assembled from the roots ``r = -|nu| +- sqrt(|nu|^2 - a)``: each root
    with ``Re r < 0`` integrates from the left edge, each root with
    ``Re r > 0`` from the right edge. Where ``a = 0`` (the zero frequency
    lies on the characteristic set) the two one-sided choices are averaged.
    """

    grid: GridSpec
    nu_norm: float
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.nu_norm > 0:
            raise InvalidInputError("|nu| must be positive")

    def _setup(self):
        """Per-line roots, boundary layers and zero-mode responses (cached)."""
        if self._cache:
            return self._cache
        g = self.grid
        nu = float(self.nu_norm)
        n = g.n_dim
        tau = g.time_freq_ext.reshape((-1,) + (1,) * (n - 1))
        xi_t = sum(g.freq_axis.reshape(tuple(g.n_space if i == j else 1 for i in range(n - 1))) ** 2
                   for j in range(n - 1))
        a = (-tau - xi_t)[..., None]          # shape (nt, *transverse, 1)
        s = np.sqrt(nu**2 - a.astype(complex))
        s = np.where(np.abs(s) < 1e-7, 1e-7, s)
        real_case = s.imag == 0
        # r1 = -nu + s without cancellation when real
        r1 = np.where(real_case, -a / (nu + s), -nu + s)
        r2 = -nu - s
        xi = g.freq_axis
        nonzero = np.rint(xi * g.half_width / np.pi).astype(int) != 0
        ik_xi = 1j * xi
        p_line = a - xi**2 + 2j * nu * xi
        inv_p = np.where(nonzero, 1.0 / np.where(nonzero, p_line, 1.0), 0.0)
        scale = 1.0 / ((r1 - r2) * g.n_space)
        roots = []
        for r, sign in ((r1, -1.0), (r2, 1.0)):
            # integrate from the left edge for decaying roots, from the right
            # edge for growing ones; anchor 0 at r = 0 gives the average of both
            anchor = np.where(r.real < 0, -g.half_width, np.where(r.real > 0, g.half_width, 0.0))
            za = g.axis - anchor
            e = np.exp(r * za)
            w = r * za
            safe = np.where(w == 0, 1.0, w)
            R = za * np.where(w == 0, 1.0, np.expm1(safe) / safe)
            # the grid starts at -L, so fh_k carries (-1)^k, cancelling e^{-i xi_k L}
            weights = np.where(nonzero, 1.0 / np.where(nonzero, ik_xi - r, 1.0), 0.0)
            roots.append(dict(r=r, e=sign * scale * e, R=-sign * scale * R, w=weights))
        self._cache.update(dict(a=a, ik_xi=ik_xi, inv_p=inv_p, roots=roots))
        return self._cache

    def _solve_lines(self, fh: np.ndarray, order: int):
        """Per-line solution and its ``x_n``-derivatives up to ``order``.

        ``fh`` is transformed in every axis (numpy's unnormalized FFT, so
        ``f(z) = sum_k fh_k e^{i xi_k z} / n`` along the line).
        """
        c = self._setup()
        interior_h = fh * c["inv_p"]
        f0 = fh[..., :1]
        outs = []
        for m in range(order + 1):
            out = sfft.ifft(interior_h * c["ik_xi"] ** m, axis=-1)
            for root in c["roots"]:
                B = np.sum(fh * root["w"], axis=-1, keepdims=True)
                rm = root["r"] ** m
                out += rm * root["e"] * B
                # zero mode: R' = e^{r z_a}, R'' = r e^{r z_a}
                if m == 0:
                    out += root["R"] * f0
                else:
                    out += -(root["r"] ** (m - 1)) * root["e"] * f0
            outs.append(out)
        return outs

    def _check(self, f):
        if isinstance(f, SpaceTimeField):
            _check_extended(f)
            if f.grid != self.grid:
                raise InvalidInputError("field lives on a different grid")
            return f.values
        arr = np.asarray(f, dtype=complex)
        if arr.shape != (self.grid.n_time_ext,) + self.grid.space_shape:
            raise InvalidInputError("expected an extended-shape array")
        return arr

    def _forward(self, vals):
        axes = tuple(range(vals.ndim - 1))
        return sfft.fft(sfft.fftn(vals, axes=axes), axis=-1), axes

    def apply(self, f):
        """``S_nu f``; accepts a SpaceTimeField or a raw extended array."""
        vals = self._check(f)
        fh, axes = self._forward(vals)
        (u,) = self._solve_lines(fh, 0)
        out = sfft.ifftn(u, axes=axes)
        return SpaceTimeField(self.grid, out, support_tag=EXTENDED) if isinstance(f, SpaceTimeField) else out

    def apply_with_image(self, f):
        """``(u, P u)`` where ``u = S_nu f`` and ``P u`` is evaluated from the
        differentiated representation, independently of the construction."""
        vals = self._check(f)
        fh, axes = self._forward(vals)
        u, du, d2u = self._solve_lines(fh, 2)
        a = self._setup()["a"]
        Pu = d2u + 2 * self.nu_norm * du + a * u
        return sfft.ifftn(u, axes=axes), sfft.ifftn(Pu, axes=axes)


def apply_S_line(nu_norm: float, f: SpaceTimeField) -> SpaceTimeField:
    return LineMultiplier(f.grid, float(nu_norm)).apply(f)


# -- the two-dimensional multiplier T ----------------------------------------

@dataclass(frozen=True)
class PlaneField:
    """Samples on a periodic two-dimensional window ``(s_1, s_2)``."""

    values: np.ndarray = field(repr=False)
    spacing: tuple = (1.0, 1.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2:
            raise InvalidInputError("plane fields are two-dimensional")
        object.__setattr__(self, "values", v)

    def freqs(self):
        k1 = 2 * np.pi * sfft.fftfreq(self.values.shape[0], d=self.spacing[0])
        k2 = 2 * np.pi * sfft.fftfreq(self.values.shape[1], d=self.spacing[1])
        return k1[:, None], k2[None, :]

    def coords(self):
        n1, n2 = self.values.shape
        return ((np.arange(n1) - n1 // 2) * self.spacing[0])[:, None], \
               ((np.arange(n2) - n2 // 2) * self.spacing[1])[None, :]


def t_symbol(xi1, xi2):
    """``q(xi) = xi_1 - xi_2^2 + i xi_2``."""
    return xi1 - xi2**2 + 1j * xi2


def apply_T_2d(f: PlaneField, delta: float = DEFAULT_DELTA, adjoint: bool = False) -> PlaneField:
    """Multiply by the regularized ``1/q`` (or its conjugate for the adjoint)."""
    if not isinstance(f, PlaneField):
        raise InvalidInputError("apply_T_2d expects a PlaneField")
    q = np.broadcast_to(t_symbol(*f.freqs()), f.values.shape)
    m = inverse_symbol(q, delta)
    if adjoint:
        m = np.conj(m)
    return PlaneField(sfft.ifft2(m * sfft.fft2(f.values)), f.spacing)


def restricted_T_norm(shape, spacing, E: np.ndarray, F: np.ndarray, iters: int = 40,
                      seed: int = 0, delta: float = DEFAULT_DELTA) -> float:
    """Power-iteration estimate of the L2 norm of ``1_E T 1_F``."""
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(shape) * F
    est = 0.0
    for _ in range(iters):
        g = E * apply_T_2d(PlaneField(F * f, spacing), delta).values
        f = F * apply_T_2d(PlaneField(E * g, spacing), delta, adjoint=True).values
        nf = np.linalg.norm(f)
        if nf == 0:
            return 0.0
        est = np.sqrt(nf)
        f = f / nf
    return float(est)


def t_norm_sweep(theta: float = 0.25, sides=(1.0, 2.0, 4.0), n: int = 512, h: float = 0.05,
                 iters: int = 40, seed: int = 0) -> list[dict]:
    """Fit ``C = ||1_E T 1_F|| / (|E|^theta |F|^(1/2 - theta))`` over centred squares."""
    ref = PlaneField(np.zeros((n, n)), (h, h))
    x1, x2 = ref.coords()
    rows = []
    for a in sides:
        for b in sides:
            E = (np.abs(x1) < a / 2) & (np.abs(x2) < a / 2)
            F = (np.abs(x1) < b / 2) & (np.abs(x2) < b / 2)
            mE, mF = E.sum() * h * h, F.sum() * h * h
            nrm = restricted_T_norm((n, n), (h, h), E, F, iters, seed)
            rows.append(dict(side_E=a, side_F=b, measure_E=mE, measure_F=mF, norm=nrm,
                             C=nrm / (mE**theta * mF ** (0.5 - theta))))
    return rows


# -- benchmark of the X -> Y bound -----------------------------------------

@dataclass(frozen=True)
class BenchReport:
    nu: tuple
    theta: float
    seed: int
    x_norms: tuple
    y_norms: tuple

    @property
    def ratios(self) -> np.ndarray:
        return np.asarray(self.y_norms) / np.asarray(self.x_norms)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def nu_norm(self) -> float:
        return float(np.linalg.norm(self.nu))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "nu", "theta", "x_norm", "y_norm", "ratio"])
        for i, (x, y) in enumerate(zip(self.x_norms, self.y_norms)):
            w.writerow([i, repr(self.nu_norm), repr(self.theta), repr(x), repr(y), repr(y / x)])
        return buf.getvalue()


def strip_localized_input(grid: GridSpec, nu_norm: float, rng: np.random.Generator) -> np.ndarray:
    """Random smooth field supported in one dyadic strip (frame with ``nu`` along ``x_n``).

    A strip ``(alpha_1, alpha_2)`` is drawn uniformly among the nonempty
    ones; the field is smoothed white noise cut to that strip.
    """
    dec = build_dyadic(grid, (0.0,) * (grid.n_dim - 1) + (float(nu_norm),))
    a1 = int(rng.integers(0, dec.max_alpha[0] + 1))
    a2 = int(rng.integers(0, dec.max_alpha[1] + 1))
    mask = dec.mask((a1, a2))
    noise = rng.standard_normal(mask.shape) + 1j * rng.standard_normal(mask.shape)
    # Gaussian low-pass with a random length scale between 0.5 and 2
    ell = float(rng.uniform(0.5, 2.0))
    tau = grid.time_freq_ext.reshape((-1,) + (1,) * grid.n_dim)
    smooth = np.exp(-0.125 * ell**2 * (tau**2 / 16.0 + grid.freq_sq()[None]))
    f = sfft.ifftn(smooth * sfft.fftn(noise))
    return np.where(mask, f, 0.0)


def bench_multiplier_norm(nu, theta: float, trials: int = 8, seed: int = 0,
                          grid: GridSpec | None = None) -> BenchReport:
    """Largest observed ``||S_nu f||_Y(1/2 - theta) / ||f||_X(theta)`` over random inputs.

    Computed in the frame where ``nu`` points along the last axis; the norms
    and the operator commute with that rotation.
    """
    WeightedNormParams(theta, nu)
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    grid = grid or GridSpec()
    nn = float(np.linalg.norm(nu))
    frame_nu = (0.0,) * (grid.n_dim - 1) + (nn,)
    op = LineMultiplier(grid, nn)
    px = WeightedNormParams(theta, frame_nu)
    py = WeightedNormParams(0.5 - theta, frame_nu)
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for _ in range(trials):
        f = SpaceTimeField(grid, strip_localized_input(grid, nn, rng), support_tag=EXTENDED)
        u = op.apply(f)
        xs.append(x_norm(f, px))
        ys.append(y_norm(u, py))
    return BenchReport(tuple(float(v) for v in np.ravel(nu)), float(theta), int(seed),
                       tuple(xs), tuple(ys))
