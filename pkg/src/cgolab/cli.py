"""Command-line entry point ``cgolab``.

Exit status: 0 on success, 1 for usage or configuration errors, 2 for
numerical failures (divergence, singular symbols, corrupt files).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import io as cio
from .cgo import build_cgo, assemble
from .config import RunConfig, parse_vector
from .dataset import FOURIER, GAUSSIAN, fourier_mode, gen_dataset, square_modes
from .exceptions import CorruptFileError, DivergenceError, InvalidInputError, SingularSymbolError
from .grid import SpatialField
from .inverse import identity_gap, reconstruct_born, reconstruct_iterative, sample_table, uniqueness_gap
from .multiplier import bench_multiplier_norm
from .propagator import evolve

NUMERICAL_FAILURES = (DivergenceError, SingularSymbolError, CorruptFileError, FloatingPointError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _vector(text):
    try:
        return parse_vector(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output path (file or directory, per command)")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")

    p = _Parser(prog="cgolab", description="Schrodinger CGO and inverse-problem laboratory")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="forward solve; writes the trajectory")
    s.add_argument("--initial", default="gaussian", choices=["gaussian", "mode"])
    s.add_argument("--kappa", type=_vector, default=None, help="integer mode for --initial mode")

    s = sub.add_parser("gen-data", parents=[common], help="initial-to-final-state dataset")
    s.add_argument("--basis", default=FOURIER, choices=[FOURIER, GAUSSIAN])
    s.add_argument("-N", type=int, default=16)
    s.add_argument("--band", type=int, default=None, help="square Fourier band max|k| <= band")
    s.add_argument("--noise", type=float, default=0.0)

    s = sub.add_parser("cgo", parents=[common], help="build a CGO solution; writes diagnostics CSV")
    s.add_argument("--nu", type=_vector, required=True)
    s.add_argument("--theta", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--sign", type=int, default=1, choices=[1, -1])
    s.add_argument("--max-iter", type=int, default=64)

    s = sub.add_parser("verify-identity", parents=[common], help="LHS vs RHS of the orthogonality identity")
    s.add_argument("--pairs", type=int, default=4)
    s.add_argument("--tol", type=float, default=1e-3)

    s = sub.add_parser("bench-multiplier", parents=[common], help="empirical X -> Y bound of S_nu")
    s.add_argument("--nu", type=_vector, required=True)
    s.add_argument("--theta", type=float)
    s.add_argument("--trials", type=int, default=8)

    s = sub.add_parser("reconstruct", parents=[common], help="recover V from a Fourier dataset")
    s.add_argument("--data", help="dataset file (otherwise generated from the config)")
    s.add_argument("--method", default="born", choices=["born", "iterative"])
    s.add_argument("--time-independent", action="store_true")
    s.add_argument("--iters", type=int, default=5)
    s.add_argument("--band", type=int, default=8)

    s = sub.add_parser("uniqueness-gap", parents=[common], help="distance between two evolution maps")
    s.add_argument("--probes", type=int, default=8)
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = RunConfig(cfg.grid, cfg.theta, cfg.tol, cfg.delta, args.seed, cfg.potential,
                        cfg.potential2, cfg.paths, cfg.extra)
    return cfg


def _emit(path, text: str, default_name: str | None = None):
    if path is None:
        sys.stdout.write(text)
        return
    if default_name and os.path.isdir(path):
        path = os.path.join(path, default_name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv(rows, header) -> str:
    import io
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def cmd_simulate(args, cfg: RunConfig) -> int:
    g = cfg.grid
    V = cfg.V()
    if args.initial == "mode":
        k = np.zeros(g.n_dim, int) if args.kappa is None else np.rint(args.kappa).astype(int)
        f = fourier_mode(g, k)
    else:
        r2 = sum(c**2 for c in g.coords())
        f = np.exp(-r2 / 2).astype(complex)
    traj = evolve(SpatialField(g, f), V)
    out = args.out or "trajectory.field"
    cio.save_field(out, traj.as_field())
    norms = traj.norms()
    print(f"simulate: {g.n_time} nodes written to {out}; norm drift {np.ptp(norms) / norms[0]:.3e}")
    return 0


def cmd_gen_data(args, cfg: RunConfig) -> int:
    V = cfg.V()
    modes = square_modes(cfg.grid, args.band) if args.band is not None else None
    data = gen_dataset(V, args.basis, args.N, cfg.seed, args.noise, modes)
    out = args.out or "dataset.field"
    cio.save_dataset(out, data)
    print(f"gen-data: {len(data)} pairs ({args.basis}) written to {out}")
    return 0


def cmd_cgo(args, cfg: RunConfig) -> int:
    V = cfg.V()
    g = cfg.grid
    nu = args.nu
    if nu.size != g.n_dim:
        raise InvalidInputError(f"--nu needs {g.n_dim} components")
    theta = args.theta if args.theta is not None else cfg.theta
    tol = args.tol if args.tol is not None else cfg.tol
    y = g.axis
    psi = np.exp(-0.5 * y**2)
    if g.n_dim == 3:
        psi = psi[:, None] * psi[None, :]
    rows = []
    try:
        sol = build_cgo(V, nu, psi, args.sign, theta, tol, args.max_iter,
                        callback=lambda it, inc, res: rows.append((it, inc, res)))
    finally:
        # diagnostics up to the failure are still useful
        _emit(args.out, _csv(rows, ["iter", "increment_y_norm", "residual"]), "cgo.csv")
    if not sol.converged:
        print(f"cgo: no convergence within {args.max_iter} iterations", file=sys.stderr)
        return 2
    res = assemble(sol).residual
    print(f"cgo: |nu|={sol.phase.nu_norm:g} converged in {sol.iterations} iterations; "
          f"weighted residual {res:.3e}", file=sys.stderr if args.out is None else sys.stdout)
    return 0


def cmd_verify_identity(args, cfg: RunConfig) -> int:
    g = cfg.grid
    V1, V2 = cfg.V(), cfg.V2()
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = 0.0
    for i in range(args.pairs):
        fields = []
        for _ in range(2):
            c = rng.uniform(-2, 2, g.n_dim)
            k = rng.integers(-3, 4, g.n_dim) * np.pi / g.half_width
            r2 = sum((x - cj) ** 2 for x, cj in zip(g.coords(), c))
            fields.append(np.exp(-r2 / 2 + 1j * sum(kj * x for kj, x in zip(k, g.coords()))))
        lhs, rhs, gap = identity_gap(V1, V2, fields[0], fields[1])
        worst = max(worst, gap)
        rows.append((i, lhs.real, lhs.imag, rhs.real, rhs.imag, gap))
    _emit(args.out, _csv(rows, ["pair", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "relative_gap"]),
          "identity.csv")
    if worst > args.tol:
        print(f"verify-identity: largest relative gap {worst:.3e} exceeds {args.tol:g}", file=sys.stderr)
        return 2
    print(f"verify-identity: largest relative gap {worst:.3e}", file=sys.stderr)
    return 0


def cmd_bench(args, cfg: RunConfig) -> int:
    theta = args.theta if args.theta is not None else cfg.theta
    rep = bench_multiplier_norm(args.nu, theta, args.trials, cfg.seed)
    _emit(args.out, rep.to_csv(), "bench.csv")
    print(f"bench-multiplier: max ratio {rep.max_ratio:.6g}", file=sys.stderr)
    return 0


def cmd_reconstruct(args, cfg: RunConfig) -> int:
    if args.data:
        data = cio.load_dataset(args.data)
        truth = None
    else:
        truth = cfg.V()
        data = gen_dataset(truth, FOURIER, seed=cfg.seed, modes=square_modes(cfg.grid, args.band))
    if args.method == "born":
        rep = reconstruct_born(data, args.time_independent, truth)
    else:
        rep = reconstruct_iterative(data, None, args.iters, args.time_independent, truth)
    out = cio.ensure_dir(args.out or "reconstruction")
    est = rep.estimate
    field = est.as_field() if est.time_dependent else SpatialField(est.grid, est.values)
    cio.save_field(os.path.join(out, "estimate.field"), field)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(rep.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    table = sample_table(data)
    xi_names = [f"xi{j + 1}" for j in range(data.grid.n_dim)]
    with open(os.path.join(out, "samples.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(_csv(table.rows(), ["tau", *xi_names, "re", "im", "weight"]))
    msg = f"reconstruct: {rep.method}, {rep.samples_used} samples, conditioning {rep.conditioning:.3e}"
    if rep.relative_l2_error is not None:
        msg += f", relative L2 error {rep.relative_l2_error:.3e}"
    print(msg)
    return 0


def cmd_gap(args, cfg: RunConfig) -> int:
    gap = uniqueness_gap(cfg.V(), cfg.V2(), args.probes, cfg.seed)
    text = json.dumps({"uniqueness_gap": gap, "probes": args.probes, "seed": cfg.seed}, sort_keys=True) + "\n"
    _emit(args.out, text, "gap.json")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "gen-data": cmd_gen_data,
    "cgo": cmd_cgo,
    "verify-identity": cmd_verify_identity,
    "bench-multiplier": cmd_bench,
    "reconstruct": cmd_reconstruct,
    "uniqueness-gap": cmd_gap,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except InvalidInputError as exc:
        print(f"cgolab: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_FAILURES as exc:
        print(f"cgolab: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
