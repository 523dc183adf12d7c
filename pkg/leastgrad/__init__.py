"""
leastgrad - Level-set construction and verification of minimizers of
weighted least gradient problems on regular grids.
"""

__version__ = '0.1.0'
__author__ = 'leastgrad developers'

from .errors import LeastGradError, ConfigError
from .fields import IndicatorSet, ScalarField, DiscreteVectorField
from .domain import build_domain, build_weight, extend_boundary_data, superlevel_exterior
from .geometry import (make_stencil, stencil_for, alpha_perimeter, alpha_total_variation,
                       coarea_quadrature, submodularity_defect, conformal_mass)
from .solvers import (solve_star, exhaustive_min, local_minimality_check, barrier_check,
                      solve_dirichlet_tv, objective_primal, compare_solutions,
                      mse_residual, weak_form, solve_mse_dirichlet, homotopy_coefficients,
                      ellipticity_certificate, comparison_test)
from .construction import (build_family, assemble_solution, check_boundary_values,
                           check_separation, check_component_reaches_boundary)
from .converters import emit_field, emit_report
from .core import run_experiment, verify_field, dump_cut

__all__ = [
    'LeastGradError', 'ConfigError', 'IndicatorSet', 'ScalarField', 'DiscreteVectorField',
    'build_domain', 'build_weight', 'extend_boundary_data', 'superlevel_exterior',
    'make_stencil', 'stencil_for', 'alpha_perimeter', 'alpha_total_variation',
    'coarea_quadrature', 'submodularity_defect', 'conformal_mass', 'solve_star',
    'exhaustive_min', 'local_minimality_check', 'barrier_check', 'solve_dirichlet_tv',
    'objective_primal', 'compare_solutions', 'mse_residual', 'weak_form',
    'solve_mse_dirichlet', 'homotopy_coefficients', 'ellipticity_certificate',
    'comparison_test', 'build_family', 'assemble_solution', 'check_boundary_values',
    'check_separation', 'check_component_reaches_boundary', 'emit_field', 'emit_report',
    'run_experiment', 'verify_field', 'dump_cut',
]
