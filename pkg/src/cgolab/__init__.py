"""Spectral Schrodinger solvers, complex geometrical optics solutions and
potential reconstruction from initial-to-final-state data."""
from .cgo import AssembledCGO, CGOPhase, CGOSolution, assemble, build_cgo, make_phase, solve_remainder
from .config import RunConfig
from .dataset import Dataset, gen_dataset
from .dyadic import DyadicDecomposition, WeightedNormParams, build_dyadic, x_norm, y_norm
from .exceptions import (CGOLabError, CorruptFileError, DivergenceError, InvalidInputError,
                         InvalidStateError, MissingSampleError, PreconditionError, SingularSymbolError)
from .grid import GridSpec, SpaceTimeField, SpatialField
from .inverse import (BornReconstructor, IterativeReconstructor, identity_gap, reconstruct_born,
                      reconstruct_iterative, uniqueness_gap)
from .io import load_dataset, load_field, save_dataset, save_field
from .multiplier import SymbolParams, apply_S, apply_T_2d, bench_multiplier_norm, symbol_eval
from .potentials import Potential, gaussian_bump
from .propagator import Trajectory, evolve, free_propagate, initial_to_final, solve_duhamel, solve_final_value

__version__ = "0.1.0"

__all__ = [
    "AssembledCGO", "BornReconstructor", "CGOLabError", "CGOPhase", "CGOSolution", "CorruptFileError",
    "Dataset", "DivergenceError", "DyadicDecomposition", "GridSpec", "InvalidInputError",
    "InvalidStateError", "IterativeReconstructor", "MissingSampleError", "Potential",
    "PreconditionError", "RunConfig", "SingularSymbolError", "SpaceTimeField", "SpatialField",
    "SymbolParams", "Trajectory", "WeightedNormParams", "apply_S", "apply_T_2d", "assemble",
    "bench_multiplier_norm", "build_cgo", "build_dyadic", "evolve", "free_propagate", "gaussian_bump",
    "gen_dataset", "identity_gap", "initial_to_final", "load_dataset", "load_field", "make_phase",
    "reconstruct_born", "reconstruct_iterative", "save_dataset", "save_field", "solve_duhamel",
    "solve_final_value", "solve_remainder", "symbol_eval", "uniqueness_gap", "x_norm", "y_norm",
    "__version__",
]
