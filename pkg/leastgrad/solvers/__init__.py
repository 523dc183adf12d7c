"""Min-cut, primal-dual and minimal surface solvers."""

from .cuts import (CutProblem, MinimizerPair, build_cut_problem, solve_problem, solve_star,
                   enumerate_optima, lattice_closed, exhaustive_solve, exhaustive_min,
                   local_minimality_check, barrier_check, barrier_margin, MAX_EXHAUSTIVE)
from .tv import PDState, solve_dirichlet_tv, objective_primal, compare_solutions, active_cells
from .mse import (MSEWeight, GraphPatch, LinearizedCoefficients, mse_residual, weak_form,
                  solve_mse_dirichlet, homotopy_coefficients, ellipticity_certificate,
                  comparison_test, jacobian, jacobian_fd_error, patch_energy,
                  first_integral_profile)

__all__ = ['CutProblem', 'MinimizerPair', 'build_cut_problem', 'solve_problem', 'solve_star',
           'enumerate_optima', 'lattice_closed', 'exhaustive_solve', 'exhaustive_min',
           'local_minimality_check', 'barrier_check', 'barrier_margin', 'MAX_EXHAUSTIVE',
           'PDState',
           'solve_dirichlet_tv', 'objective_primal', 'compare_solutions', 'active_cells',
           'MSEWeight', 'GraphPatch', 'LinearizedCoefficients', 'mse_residual', 'weak_form',
           'solve_mse_dirichlet', 'homotopy_coefficients', 'ellipticity_certificate',
           'comparison_test', 'jacobian', 'jacobian_fd_error', 'patch_energy',
           'first_integral_profile']
