"""Learn a 1-D SDE from sampled trajectories and find its most probable transition path."""
from ._jit import USE_JIT
from .errors import (ConfigError, ContractViolation, DivergenceError, DomainError, EmptyInputError,
                     InsufficientDataError, KmpathError, ModelDomainError, SolverFailure,
                     UnderdeterminedError, UnreachableEndpointError)
from .fokker_planck import DensityField, PdeGrid, grid_delta, pairing, solve_backward, solve_forward
from .model import (PolynomialDictionary, SdeModel, build_design_matrix, double_well, eval_poly,
                    ornstein_uhlenbeck)
from .moments import BinnedMoments, BinningConfig, bin_moments
from .simulate import IncrementPairs, SimulationConfig, TrajectorySet, extract_pairs, simulate_em
from .ssr import (CvReport, SparsityPath, cv_score, dictionary_size_scan, select_model, ssr_path,
                  ssr_step)
from .transition import (ConditionalDensity, PathProblem, TransitionPath, conditional_density,
                         most_probable_path, path_for_learned_model)

__version__ = "0.1.0"
