"""Complex geometrical optics solutions ``u = e^phi (u_sharp + u_flat)``.

Everything is computed in the *frame* where the real direction of the phase
is the last coordinate axis: ``y = Q^T x`` with ``Q e_n = sign * nu / |nu|``.
In the frame ``phi = i |nu|^2 t + |nu| y_n`` and the conjugated operator is
``i d_t + Lap + 2 |nu| d_{y_n}``. Only :func:`assemble` ever forms ``e^phi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .dyadic import WeightedNormParams, build_dyadic, x_norm, y_norm
from .exceptions import DivergenceError, InvalidInputError, InvalidStateError
from .grid import EXTENDED, GridSpec, SpaceTimeField, SpatialField
from .multiplier import LineMultiplier
from .potentials import Potential

DEFAULT_THETA = 0.25
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 64


def householder(direction) -> np.ndarray:
    """Orthogonal ``Q`` with ``Q e_n = direction`` (a unit vector).

    ``Q = I - 2 w w^T / w^T w`` with ``w = e_n - direction``; the identity
    when ``direction`` already equals ``e_n``.
    """
    d = np.asarray(direction, dtype=float).ravel()
    n = d.size
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    w = e_n - d
    ww = float(w @ w)
    if ww < 1e-30:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(w, w) / ww


@dataclass(frozen=True, eq=False)
class CGOPhase:
    """``phi(t, x) = i |nu|^2 t + sign * nu . x`` and the frame rotation."""

    nu: tuple
    sign: int
    rotation: np.ndarray = field(repr=False)
    reflection_flag: bool

    @property
    def nu_norm(self) -> float:
        return float(np.linalg.norm(self.nu))

    @property
    def n_dim(self) -> int:
        return len(self.nu)

    @property
    def gamma(self) -> complex:
        return 1j * self.nu_norm**2

    @property
    def zeta(self) -> np.ndarray:
        return self.sign * np.asarray(self.nu)

    @property
    def frame_nu(self) -> tuple:
        return (0.0,) * (self.n_dim - 1) + (self.nu_norm,)

    def eikonal_defect(self) -> float:
        """``|i gamma + zeta . zeta|``; zero for a free exponential solution."""
        return abs(1j * self.gamma + complex(self.zeta @ self.zeta))

    def real_part(self, coords) -> np.ndarray:
        """``Re phi = sign * nu . x`` on lab coordinates."""
        return sum(z * c for z, c in zip(self.zeta, coords))

    def frame_coords(self, grid: GridSpec) -> list[np.ndarray]:
        """Lab coordinates ``x = Q y`` of the frame grid points ``y``."""
        ys = grid.coords()
        return [sum(self.rotation[i, j] * ys[j] for j in range(grid.n_dim)) for i in range(grid.n_dim)]


def make_phase(nu, sign: int = 1) -> CGOPhase:
    """Build the phase for ``nu`` and choose the frame rotation.

    For ``sign = -1`` the rotation is composed with the reflection ``R``
    (``R e_n = -e_n``, ``R e_j = e_j`` otherwise).
    """
    nu = np.asarray(nu, dtype=float).ravel()
    if nu.size < 2:
        raise InvalidInputError("nu needs at least two components")
    nn = float(np.linalg.norm(nu))
    if nn == 0 or not np.isfinite(nn):
        raise InvalidInputError("nu must be a nonzero finite vector")
    if sign not in (1, -1):
        raise InvalidInputError("sign must be +1 or -1")
    Q = householder(nu / nn)
    if sign == -1:
        R = np.eye(nu.size)
        R[-1, -1] = -1.0
        Q = Q @ R
    ph = CGOPhase(tuple(nu), sign, Q, sign == -1)
    if ph.eikonal_defect() > 1e-12 * max(1.0, nn**2):
        raise InvalidStateError("eikonal relation violated")
    return ph


def _signed_permutation(Q: np.ndarray):
    """``(perm, signs)`` if ``Q`` is a signed permutation matrix, else ``None``."""
    r = np.rint(Q)
    if not np.allclose(Q, r, atol=1e-14):
        return None
    if not np.all(np.sum(np.abs(r), axis=0) == 1) or not np.all(np.sum(np.abs(r), axis=1) == 1):
        return None
    perm = np.argmax(np.abs(r), axis=0)       # y_j = sign_j x_{perm_j}
    signs = r[perm, np.arange(r.shape[1])]
    return perm, signs


def _index_map(grid: GridSpec, perm, signs):
    """Indices into lab arrays for every frame point (exact on the grid)."""
    n = grid.n_space
    idx = np.indices(grid.space_shape)       # frame indices j_1..j_n
    lab = [None] * grid.n_dim
    for j in range(grid.n_dim):
        ij = idx[j]
        # y = -L + j dx; reflecting y -> -y maps index j to (n - j) mod n
        lab[perm[j]] = ij if signs[j] > 0 else (-ij) % n
    return tuple(lab)


def _trig_resample(grid: GridSpec, values: np.ndarray, coords) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``values`` (space axes last) at ``coords``."""
    n = grid.n_space
    k = np.rint(grid.freq_axis * grid.half_width / np.pi)
    axes = tuple(range(values.ndim - grid.n_dim, values.ndim))
    coef = sfft.fftn(values, axes=axes) / n**grid.n_dim
    pts = [np.broadcast_to(c, grid.space_shape).ravel() for c in coords]
    # e^{i pi k (x + L) / L} along each axis, contracted one axis at a time
    out = coef
    lead = values.shape[: values.ndim - grid.n_dim]
    basis = [np.exp(1j * np.pi * np.outer(k, (p + grid.half_width)) / grid.half_width) for p in pts]
    flat = out.reshape(lead + (n**grid.n_dim,))
    mats = np.ones((n**grid.n_dim, pts[0].size), dtype=complex)
    grids = np.indices(grid.space_shape).reshape(grid.n_dim, -1)
    for j in range(grid.n_dim):
        mats = mats * basis[j][grids[j]]
    return (flat @ mats).reshape(lead + grid.space_shape)


def frame_potential(V: Potential, phase: CGOPhase) -> np.ndarray:
    """``V(t, Q y)`` at the slab nodes, shape ``(n_time, *space)``."""
    g = V.grid
    if phase.n_dim != g.n_dim:
        raise InvalidInputError("phase and potential dimensions differ")
    sp = _signed_permutation(phase.rotation)
    if sp is not None:
        idx = _index_map(g, *sp)
        return np.array(V.nodes())[(slice(None),) + idx]
    xs = phase.frame_coords(g)
    if V.func is not None:
        return np.stack([np.broadcast_to(V.func(t, *xs), g.space_shape) for t in g.times]).astype(complex)
    if g.n_space ** (2 * g.n_dim) > 2**26:
        raise InvalidInputError("grid too large for trigonometric resampling; give the potential a func")
    wrapped = [((x + g.half_width) % (2 * g.half_width)) - g.half_width for x in xs]
    return _trig_resample(g, np.array(V.nodes()), wrapped)


def transverse_grid_check(psi: SpatialField | np.ndarray, grid: GridSpec) -> np.ndarray:
    vals = psi.values if isinstance(psi, SpatialField) else np.asarray(psi, dtype=complex)
    if vals.shape != (grid.n_space,) * (grid.n_dim - 1):
        raise InvalidInputError(
            f"amplitude data must live on the {(grid.n_space,) * (grid.n_dim - 1)} transverse grid")
    return vals


def amplitude(psi, phase: CGOPhase, grid: GridSpec) -> SpaceTimeField:
    """``u_sharp(t, y) = [e^{i t Lap'} psi](y')`` on the extended window, in the frame.

    ``psi`` is an array on the transverse grid (the first ``n - 1`` axes).
    """
    vals = transverse_grid_check(psi, grid)
    m = grid.n_dim - 1
    axes = tuple(range(m))
    xi_sq = sum(grid.freq_axis.reshape(tuple(grid.n_space if i == j else 1 for i in range(m))) ** 2
                for j in range(m))
    ph = np.exp(-1j * grid.times_ext.reshape((-1,) + (1,) * m) * xi_sq)
    evolved = sfft.ifftn(ph * sfft.fftn(vals, axes=axes)[None], axes=tuple(a + 1 for a in axes))
    out = np.broadcast_to(evolved[..., None], (grid.n_time_ext,) + grid.space_shape)
    return SpaceTimeField(grid, np.array(out), support_tag=EXTENDED)


def apply_conjugated(grid: GridSpec, nu_norm: float, u: np.ndarray) -> np.ndarray:
    """``(i d_t + Lap + 2 |nu| d_{y_n}) u`` spectrally on the extended window."""
    tau = grid.time_freq_ext.reshape((-1,) + (1,) * grid.n_dim)
    xi = grid.freqs()
    sym = -tau - grid.freq_sq()[None] + 2j * nu_norm * xi[-1][None]
    return sfft.ifftn(sym * sfft.fftn(u))


@dataclass(frozen=True, eq=False)
class CGOSolution:
    phase: CGOPhase
    grid: GridSpec
    u_sharp: SpaceTimeField = field(repr=False)
    u_flat: SpaceTimeField = field(repr=False)
    potential: np.ndarray = field(repr=False)  # frame V-tilde, extended shape
    psi: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0
    increment_history: tuple = ()
    y_norm_flat: float = 0.0
    x_norm_source: float = 0.0
    residual: float = 0.0
    source_norm: float = 0.0
    converged: bool = False
    theta: float = DEFAULT_THETA
    tol: float = DEFAULT_TOL
    image: np.ndarray | None = field(default=None, repr=False)  # P u_flat
    residual_history: tuple = ()

    @property
    def contraction(self) -> float:
        """Largest observed ratio of successive increment norms (after the first)."""
        h = np.asarray(self.increment_history)
        if h.size < 3:
            return 0.0
        h = h[1:]
        nz = h[:-1] > 0
        return float(np.max(h[1:][nz] / h[:-1][nz])) if np.any(nz) else 0.0

    @property
    def amplification(self) -> float:
        """``||u_flat||_Y / ||V u_sharp||_X``."""
        return self.y_norm_flat / self.x_norm_source if self.x_norm_source > 0 else 0.0

    def slab_mask(self, radius: float) -> np.ndarray:
        """Frame points of the slab with ``|y_n| < radius``, extended time shape."""
        g = self.grid
        tm = np.zeros(g.n_time_ext, dtype=bool)
        tm[g.slab_offset:g.slab_offset + g.n_time] = True
        sm = np.abs(g.coords()[-1]) < radius
        return tm.reshape((-1,) + (1,) * g.n_dim) & np.broadcast_to(sm, g.space_shape)

    def flat_norm_near(self, radius: float = 2.0) -> float:
        """``||u_flat||_{L2}`` over the slab restricted to ``|x . nu_hat| < radius``."""
        g = self.grid
        u = SpaceTimeField(g, self.u_flat.values, support_tag=EXTENDED).restrict()
        mask = np.broadcast_to(np.abs(g.coords()[-1]) < radius, g.space_shape)
        from .grid import region_l2_norm
        return region_l2_norm(u, mask)


def solve_remainder(V: Potential, u_sharp: SpaceTimeField, phase: CGOPhase,
                    theta: float = DEFAULT_THETA, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER, psi=None, callback=None) -> CGOSolution:
    """Neumann iteration ``u_flat <- S_nu(V (u_sharp + u_flat))`` from zero.

    Stops when the Y-norm of the increment drops below ``tol`` times the
    Y-norm of ``u_flat`` (or vanishes). Raises :class:`DivergenceError` once
    the increment has grown three iterations in a row.
    """
    grid = V.grid
    params = WeightedNormParams(theta, phase.frame_nu)
    p_y = WeightedNormParams(0.5 - theta, phase.frame_nu)
    if max_iter < 1:
        raise InvalidInputError("max_iter must be >= 1")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if u_sharp.support_tag != EXTENDED or u_sharp.grid != grid:
        raise InvalidInputError("u_sharp must be an extended field on the potential's grid")
    Vt = np.zeros((grid.n_time_ext,) + grid.space_shape, dtype=complex)
    o = grid.slab_offset
    Vt[o:o + grid.n_time] = frame_potential(V, phase)
    dec = build_dyadic(grid, phase.frame_nu)
    op = LineMultiplier(grid, phase.nu_norm)
    us = u_sharp.values
    src = Vt * us
    src_field = SpaceTimeField(grid, src, support_tag=EXTENDED)
    x_src = x_norm(src_field, params, dec)
    dv = grid.dt * grid.cell_volume
    src_l2 = float(np.sqrt(np.sum(np.abs(src) ** 2) * dv))

    flat = np.zeros_like(us)
    history: list[float] = []
    residuals: list[float] = []
    growth = 0
    converged = False
    it = 0
    last_rhs = src
    while it < max_iter:
        rhs = Vt * (us + flat)
        new = op.apply(rhs)
        inc = y_norm(SpaceTimeField(grid, new - flat, support_tag=EXTENDED), p_y, dec)
        ref = y_norm(SpaceTimeField(grid, new, support_tag=EXTENDED), p_y, dec)
        it += 1
        # P new = rhs exactly, so the equation residual of the iterate is V (flat - new)
        residuals.append(float(np.sqrt(np.sum(np.abs(Vt * (flat - new)) ** 2) * dv)))
        flat, last_rhs = new, rhs
        if history and inc > history[-1]:
            growth += 1
        else:
            growth = 0
        history.append(inc)
        if callback is not None:
            callback(it, inc, residuals[-1])
        if not np.all(np.isfinite(flat)):
            raise DivergenceError("remainder iteration produced non-finite values", step=it)
        if growth >= 3:
            rate = history[-1] / history[-2] if history[-2] > 0 else float("inf")
            raise DivergenceError(
                f"Neumann iteration diverges at |nu| = {phase.nu_norm:g}: increment grew "
                f"3 times in a row (last ratio {rate:.3g}); |nu| is below the contraction threshold",
                step=it, contraction=rate)
        if inc == 0.0 or inc <= tol * ref:
            converged = True
            break
    # one more application with the derivative representation gives P u_flat
    _, image = op.apply_with_image(last_rhs)
    res = float(np.sqrt(np.sum(np.abs(image - Vt * (us + flat)) ** 2) * dv))
    y_flat = y_norm(SpaceTimeField(grid, flat, support_tag=EXTENDED), p_y, dec)
    return CGOSolution(phase, grid, u_sharp, SpaceTimeField(grid, flat, support_tag=EXTENDED), Vt,
                       None if psi is None else np.asarray(psi), it, tuple(history), y_flat, x_src,
                       res, src_l2, converged, theta, tol, image, tuple(residuals))


def build_cgo(V: Potential, nu, psi, sign: int = 1, theta: float = DEFAULT_THETA,
              tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER, callback=None) -> CGOSolution:
    """Phase, amplitude and remainder in one call."""
    phase = make_phase(nu, sign)
    us = amplitude(psi, phase, V.grid)
    return solve_remainder(V, us, phase, theta, tol, max_iter, psi=psi, callback=callback)


@dataclass(frozen=True, eq=False)
class AssembledCGO:
    """``u = e^phi (u_sharp + u_flat)`` on the slab, in frame coordinates.

    ``weighted`` holds ``e^{-phi} u = u_sharp + u_flat``; ``log_weight`` is
    ``Re phi`` so that ``|u| = |weighted| e^{log_weight}`` without overflow.
    """

    solution: CGOSolution
    weighted: SpaceTimeField = field(repr=False)
    residual: float = 0.0

    def values(self) -> np.ndarray:
        """``e^phi (u_sharp + u_flat)`` itself; may overflow for large ``|nu| L``."""
        g = self.solution.grid
        ph = self.solution.phase
        t = g.times.reshape((-1,) + (1,) * g.n_dim)
        phi = 1j * ph.nu_norm**2 * t + ph.nu_norm * g.coords()[-1]
        return np.exp(phi) * self.weighted.values


def conjugated_residual(sol: CGOSolution) -> float:
    """Relative residual of ``(i d_t + Lap + 2|nu| d_n - V)(u_sharp + u_flat)`` on interior slab nodes.

    ``P u_flat`` comes from the differentiated line representation. For the
    amplitude, ``i d_t`` is taken from its transverse Fourier series and the
    spatial part of ``P`` is applied spectrally to the sampled values, so the
    cancellation is measured rather than assumed.
    """
    g = sol.grid
    o = g.slab_offset
    sl = slice(o + 1, o + g.n_time - 1)
    m = g.n_dim - 1
    us = sol.u_sharp.values[sl]
    if sol.psi is not None:
        axes = tuple(range(m))
        xi_sq = sum(g.freq_axis.reshape(tuple(g.n_space if i == j else 1 for i in range(m))) ** 2
                    for j in range(m))
        ph = np.exp(-1j * g.times_ext[sl].reshape((-1,) + (1,) * m) * xi_sq)
        coef = sfft.fftn(sol.psi, axes=axes)[None] * ph
        # i d_t of e^{-i |xi'|^2 t} is multiplication by |xi'|^2
        dt_part = sfft.ifftn(xi_sq * coef, axes=tuple(a + 1 for a in axes))[..., None]
        space_sym = -g.freq_sq() + 2j * sol.phase.nu_norm * g.freqs()[-1]
        space_axes = tuple(range(1, g.n_dim + 1))
        p_sharp = dt_part + sfft.ifftn(space_sym[None] * sfft.fftn(us, axes=space_axes), axes=space_axes)
    else:
        p_sharp = 0.0
    total = us + sol.u_flat.values[sl]
    r = p_sharp + sol.image[sl] - sol.potential[sl] * total
    num = np.linalg.norm(np.broadcast_to(r, total.shape))
    den = np.linalg.norm(total)
    return float(num / den) if den > 0 else float(num)


def assemble(sol: CGOSolution) -> AssembledCGO:
    if not sol.converged:
        raise InvalidStateError("remainder iteration did not converge; nothing to assemble")
    weighted = SpaceTimeField(sol.grid, sol.u_sharp.values + sol.u_flat.values,
                              support_tag=EXTENDED).restrict()
    return AssembledCGO(sol, weighted, conjugated_residual(sol))


def remainder_decay(V: Potential, nus=(4.0, 8.0, 16.0, 32.0), psi=None, radius: float = 2.0,
                    theta: float = DEFAULT_THETA, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER, direction=None):
    """Fit ``log ||u_flat||_{L2(|x . nu_hat| < R)}`` against ``log |nu|``.

    Returns ``(slope, rows)`` with one row per ``|nu|``.
    """
    g = V.grid
    direction = np.eye(g.n_dim)[-1] if direction is None else np.asarray(direction, float)
    direction = direction / np.linalg.norm(direction)
    if psi is None:
        y = g.coords()[0].ravel()
        psi = np.exp(-0.5 * y**2)
        if g.n_dim == 3:
            psi = psi[:, None] * psi[None, :]
    rows = []
    for s in nus:
        sol = build_cgo(V, s * direction, psi, 1, theta, tol, max_iter)
        rows.append(dict(nu=float(s), iterations=sol.iterations, converged=sol.converged,
                         flat_norm=sol.flat_norm_near(radius), y_norm_flat=sol.y_norm_flat,
                         contraction=sol.contraction, residual=sol.residual / max(sol.source_norm, 1e-300)))
    x = np.log([r["nu"] for r in rows])
    yv = np.log([r["flat_norm"] for r in rows])
    slope = float(np.polyfit(x, yv, 1)[0])
    return slope, rows


def product_gram_rank(grid: GridSpec, nu, n_modes: int = 4, tol: float = 1e-10):
    """Rank of the Gram matrix of ``u1_sharp * conj(v2_sharp)`` products.

    Both amplitudes are single transverse modes; each product is a plane
    wave in ``(t, y')`` with ``xi' = k1 - k2`` and ``tau = |k2|^2 - |k1|^2``.
    Returns ``(rank, n_distinct)``: the family spans the sampled frequencies
    with ``xi`` orthogonal to ``nu`` iff the two agree. Time frequencies are
    not harmonics of the slab, so the Gram matrix degrades quickly with
    ``n_modes``; beyond 4 the rank test needs a smaller ``tol``.
    """
    make_phase(nu)  # validates nu
    m = grid.n_dim - 1
    ks = grid.freq_axis[np.r_[0:n_modes, -n_modes + 1:0]]
    t = grid.times.reshape((-1,) + (1,) * m)
    y = grid.coords()
    cols, freqs = [], set()
    for k1 in ks:
        for k2 in ks:
            prod = np.exp(-1j * (k1**2 - k2**2) * t) * np.exp(1j * (k1 - k2) * y[0].ravel())
            if m == 2:
                prod = prod[..., None] * np.ones(grid.n_space)
            cols.append(prod.ravel())
            freqs.add((round(k2**2 - k1**2, 9), round(k1 - k2, 9)))
    A = np.stack(cols, axis=1)
    w = np.sqrt(grid.trapezoid_weights).repeat(A.shape[0] // grid.n_time)
    s = np.linalg.svd(A * w[:, None], compute_uv=False)
    rank = int(np.sum(s > tol * s[0]))
    return rank, len(freqs)
