import numpy as np
import pytest

from leastgrad.core import SINE_WEIGHT
from leastgrad.errors import HypothesisViolated, NonConvergence, TestFunctionNotCompactlySupported
from leastgrad.parsers.config_parser import DEFAULT_CHECK_PARAMS
from leastgrad.solvers import (GraphPatch, MSEWeight, comparison_test, ellipticity_certificate,
                               first_integral_profile, homotopy_coefficients, jacobian_fd_error,
                               mse_residual, patch_energy, solve_mse_dirichlet, weak_form)

UNIT = MSEWeight(lambda x, s: 1.0 + 0.0 * s, alpha=1.0)


def sine_profile(t):
    return 2.0 + np.sin(t)


SINE = MSEWeight(lambda x, s: 2.0 + np.sin(x[..., 0]) + 0.0 * s, alpha=2.0)


def profile_patch(c, nodes):
    x = np.linspace(0.0, 1.0, nodes)
    return solve_mse_dirichlet((0.0,), (1.0,), (nodes - 1,), SINE, first_integral_profile(sine_profile, c, x))


def test_straight_line_needs_no_newton_step():
    patch = solve_mse_dirichlet((0.0,), (1.0,), (32,), UNIT, lambda X: X[..., 0])
    assert patch.info['converged']
    assert patch.info['iterations'] == 0
    assert np.allclose(patch.u, np.linspace(0.0, 1.0, 33), atol=1e-8)


def test_plane_is_reproduced_exactly():
    def plane(X):
        return 0.3 * X[..., 0] + 0.2 * X[..., 1]

    patch = solve_mse_dirichlet((0.0, 0.0), (1.0, 1.0), (8, 8), UNIT, plane)
    assert patch.info['converged']
    assert np.max(np.abs(patch.u - plane(patch.coordinates()))) <= 1e-10


@pytest.mark.slow
def test_constant_flux_profile_matches_newton_solution():
    x = np.linspace(0.0, 1.0, 2001)
    exact = first_integral_profile(sine_profile, 1.0, x)
    patch = profile_patch(1.0, 2001)
    assert patch.info['converged']
    assert np.max(np.abs(patch.u - exact)) <= 1e-6


def test_saddle_converges_and_tests_to_zero():
    patch = solve_mse_dirichlet((0.0, 0.0), (1.0, 1.0), (8, 8), UNIT,
                                lambda X: 0.3 * (X[..., 0] ** 2 - X[..., 1] ** 2))
    assert patch.info['converged']
    assert np.max(np.abs(mse_residual(patch))) <= 1e-10
    phi = np.where(patch.interior(), 1.0, 0.0)
    assert abs(weak_form(patch, phi)) <= 1e-8


def test_weak_form_rejects_test_functions_on_the_boundary():
    patch = solve_mse_dirichlet((0.0, 0.0), (1.0, 1.0), (4, 4), UNIT, lambda X: X[..., 0])
    with pytest.raises(TestFunctionNotCompactlySupported):
        weak_form(patch, np.ones(patch.u.shape))


def test_assembled_jacobian_matches_finite_differences():
    weight = MSEWeight(lambda x, s: 1.0 + 0.5 * s ** 2 + 0.1 * x[..., 0],
                       ds=lambda x, s: s, dss=lambda x, s: 1.0 + 0.0 * s, alpha=1.0)
    axes = np.linspace(0.0, 1.0, 7)
    X, Y = np.meshgrid(axes, axes, indexing='ij')
    patch = GraphPatch((0.0, 0.0), (1.0, 1.0), 0.3 * np.sin(3.0 * X) + 0.2 * Y ** 2, weight)
    assert jacobian_fd_error(patch) <= 1e-5


def test_ellipticity_holds_with_the_true_gradient_bound():
    u0 = solve_mse_dirichlet((0.0, 0.0), (1.0, 1.0), (6, 6), UNIT, lambda X: X[..., 0])
    u1 = solve_mse_dirichlet((0.0, 0.0), (1.0, 1.0), (6, 6), UNIT,
                             lambda X: X[..., 0] + 0.5 * X[..., 1] ** 2)
    coeffs = homotopy_coefficients(u0, u1)
    cert = ellipticity_certificate(coeffs, 1.0, coeffs.grad_sup)
    assert cert['passed']
    assert cert['symmetry_defect'] <= 1e-12
    with pytest.raises(ValueError):
        ellipticity_certificate(coeffs, 1.0, 0.5 * coeffs.grad_sup)


def test_comparison_of_ordered_profiles():
    upper, lower = profile_patch(1.0, 201), profile_patch(0.5, 201)
    result = comparison_test(upper, lower)
    assert result['passed']
    assert result['ordered']
    assert result['touching_count'] == 0
    with pytest.raises(HypothesisViolated):
        comparison_test(lower, upper)


def test_patch_needs_interior_nodes():
    with pytest.raises(ValueError):
        GraphPatch((0.0,), (1.0,), np.zeros(2), UNIT)


def test_straight_line_has_least_area():
    line = solve_mse_dirichlet((0.0,), (1.0,), (16,), UNIT, lambda X: X[..., 0])
    bumped = line.u.copy()
    bumped[8] += 0.05
    assert patch_energy(line) == pytest.approx(np.sqrt(2.0))
    assert patch_energy(line) < patch_energy(line.with_values(bumped))


def test_flux_constant_must_stay_below_the_weight():
    with pytest.raises(ValueError):
        first_integral_profile(sine_profile, 2.0, np.linspace(0.0, 1.0, 11))


@pytest.mark.parametrize('c', [0.5, 1.0])
def test_profiles_converge_at_the_configured_resolution(c):
    nodes = DEFAULT_CHECK_PARAMS['mse_nodes']
    x = np.linspace(0.0, 1.0, nodes)
    exact = first_integral_profile(sine_profile, c, x)
    patch = solve_mse_dirichlet((0.0,), (1.0,), (nodes - 1,), SINE_WEIGHT, exact)
    assert patch.info['converged']
    assert patch.info['weak_residual'] <= 1e-10
    assert np.max(np.abs(patch.u - exact)) <= 1e-6


def test_strict_solve_raises_when_newton_is_cut_short():
    with pytest.raises(NonConvergence):
        solve_mse_dirichlet((0.0, 0.0), (1.0, 1.0), (8, 8), UNIT,
                            lambda X: 0.3 * (X[..., 0] ** 2 - X[..., 1] ** 2),
                            params={'max_iter': 1, 'tol': 1e-30}, strict=True)
