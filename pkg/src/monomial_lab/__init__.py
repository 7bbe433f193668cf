"""Classification, verification and stabilization for the monomial functional-equation family."""
from .difference import (ChainReport, DifferenceSpec, delta, delta_chain, delta_iter,
                         gp_degree_probe, verify_elimination_chain)
from .equation import (Degree, DegenerateRatio, EquationFamily, NonIntegerDegree, UndefinedBase,
                       classify, new_family, preset, residual_D, residual_stats, scaling_ratio)
from .errors import *  # noqa: F401,F403
from .fnspec import build_function, parse_function_spec, print_function_spec
from .functions import (EXACT, FLOAT, FunctionHandle, from_callable, linear_grid, monomial,
                        pairs, polynomial)
from .gp import GPModel, component_split, eval_gp, fit_gp, is_monomial, scale_law_check
from .stability import (ControlFunction, StabilityBranch, StabilityReport, contraction_map,
                        estimate_L, iterate_map, psi_metric, select_branch, stabilize,
                        stabilize_diagonal, verify_bound)

__version__ = "0.1.0"
