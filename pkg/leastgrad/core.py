"""
Core pipelines for leastgrad: run an experiment, verify a field against a
config, and dump a level's cut problem.
"""

import logging
import os
import platform
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib.metadata import version as dist_version

import numpy as np
import scipy
from scipy.spatial import cKDTree

from . import __version__
from .construction import (assemble_solution, boundary_trace_error, build_family,
                           check_boundary_values, check_competitor_inequality,
                           check_family_components, check_nestedness, check_separation,
                           check_trace_containment, continuity_modulus, interface_deviation,
                           level_table, superlevel_recovery)
from .converters import CheckResult, RunReport, dump_dimacs, emit_family, emit_field, emit_report
from .domain import (build_domain, build_weight, extend_boundary_data, modulus_of_continuity,
                     superlevel_exterior, Box)
from .errors import (ConfigError, DisconnectedBoundary, DisconnectedInterior, EmptyInterior,
                     LeastGradError)
from .fields import IndicatorSet, ScalarField
from .geometry import (alpha_perimeter, coarea_quadrature, conformal_mass, icosphere,
                       polyline_circle, stencil_for, submodularity_defect)
from .parsers import (load_config, read_boundary_csv, read_field_csv, read_field_pgm, read_mask,
                      read_raster)
from .registry import resolve_boundary, resolve_exact, resolve_shape, resolve_weight
from .solvers import (GraphPatch, MSEWeight, barrier_check, build_cut_problem, comparison_test,
                      compare_solutions, ellipticity_certificate, exhaustive_min,
                      first_integral_profile, homotopy_coefficients, jacobian_fd_error,
                      local_minimality_check, solve_dirichlet_tv, solve_mse_dirichlet,
                      solve_star)
from .utils.file_utils import ensure_dir, sha256_file

logger = logging.getLogger(__name__)

VERIFY_CHECKS = ('boundary-trace', 'continuity-modulus', 'coarea', 'exact-sup-error',
                 'competitor-inequality')


@dataclass
class Inputs:
    """Everything derived from a config before any solve."""
    dom: object
    w: object
    st: object
    bd: object
    exact: object = None


@dataclass
class _Run:
    config: object
    inputs: Inputs
    fam: object = None
    solution: object = None
    competitor: object = None
    tv: tuple = None
    cache: dict = field(default_factory=dict)

    def rng(self, name):
        """Generator seeded from the config seed and the check name."""
        return np.random.default_rng([self.config.seed] + [ord(c) for c in name])


def build_inputs(config):
    """
    Domain, weight, stencil, boundary data and optional exact solution of a
    config.

    Raises:
        ConfigError: if a form is unknown or the inputs do not fit together
    """
    h = config.h
    try:
        if 'mask' in config.domain:
            spec = read_mask(config.resolve_path(config.domain['mask']))
        else:
            spec = resolve_shape(config.domain['shape'])
        dom = build_domain(spec, h, config.collar_width)
    except (EmptyInterior, DisconnectedInterior, DisconnectedBoundary, ValueError) as exc:
        raise ConfigError('[domain]: {}'.format(exc))

    if 'raster' in config.weight:
        lo, hi = config.weight.get('range', [1.0, 2.0])
        weight = read_raster(config.resolve_path(config.weight['raster']), lo, hi)
        if weight.shape != dom.shape:
            weight = np.pad(weight, config.collar_width, mode='edge')
        if weight.shape != dom.shape:
            raise ConfigError('[weight]: raster of shape {} does not cover the grid {}'
                              .format(weight.shape, dom.shape))
    else:
        weight = resolve_weight(config.weight['form'])
    try:
        w = build_weight(dom, weight, alpha=config.weight.get('alpha'))
    except ValueError as exc:
        raise ConfigError('[weight]: {}'.format(exc))

    if 'csv' in config.boundary:
        g = read_boundary_csv(config.resolve_path(config.boundary['csv']), dom)
    else:
        g = resolve_boundary(config.boundary['form'])
    try:
        bd = extend_boundary_data(dom, g)
    except ValueError as exc:
        raise ConfigError('[boundary]: {}'.format(exc))

    try:
        st = stencil_for(dom, config.neighborhood)
    except ValueError as exc:
        raise ConfigError('[stencil]: {}'.format(exc))
    exact = config.check_params.get('exact')
    return Inputs(dom=dom, w=w, st=st, bd=bd,
                  exact=resolve_exact(exact) if exact is not None else None)


def _trace_tolerance(run, key):
    tol = run.config.tolerances[key]
    if tol is not None:
        return float(tol)
    dom, bd = run.inputs.dom, run.inputs.bd
    lip = modulus_of_continuity(bd, 1.5 * dom.h) / dom.h
    return lip * 5 * dom.h + run.fam.step


def _small_square(n_side, h):
    return build_domain(Box((0.0, 0.0), (n_side * h, n_side * h)), h)


def _small_stencil(run, dom):
    neighborhood = run.config.neighborhood if run.inputs.dom.ndim == 2 else None
    return stencil_for(dom, neighborhood)


# level-set family

def _nestedness(run):
    return check_nestedness(run.fam)


def _boundary_values(run):
    return check_boundary_values(run.fam, run.inputs.bd, _trace_tolerance(run, 'boundary_values'))


def _separation(run):
    return check_separation(run.fam)


def _components(run):
    return check_family_components(run.fam)


def _trace_containment(run):
    return check_trace_containment(run.fam, run.inputs.bd,
                                   _trace_tolerance(run, 'trace_containment'))


def _superlevel_recovery(run):
    return superlevel_recovery(run.fam, run.solution)


def _boundary_trace(run):
    dom, bd = run.inputs.dom, run.inputs.bd
    step = run.fam.step if run.fam is not None else 0.0
    tol = step + modulus_of_continuity(bd, 5 * dom.h) + 1e-12
    err, cell = boundary_trace_error(run.solution, bd)
    report = {'passed': err <= tol, 'value': err, 'tolerance': tol, 'constant_C': 5}
    if err > tol:
        report['witness'] = {'cell': cell}
    return report


def _continuity(run):
    return {'passed': True, 'value': continuity_modulus(run.solution, run.inputs.dom),
            'recorded': True}


def _exact_sup(run):
    if run.inputs.exact is None:
        return {'skipped': 'no exact solution configured'}
    dom = run.inputs.dom
    exact = np.asarray(run.inputs.exact(dom.centers()), dtype=float)
    diff = np.where(dom.interior, np.abs(run.solution.values - exact), 0.0)
    cell = int(np.argmax(diff))
    value = float(diff.ravel()[cell])
    tol = run.config.tolerances['exact_sup_error']
    report = {'passed': value <= tol, 'value': value, 'tolerance': tol}
    if value > tol:
        report['witness'] = {'cell': cell}
    return report


def _interface(run):
    if run.inputs.exact is None:
        return {'skipped': 'no exact solution configured'}
    dev = interface_deviation(run.fam, run.inputs.exact)
    tol = run.config.tolerances['interface_cells'] * run.inputs.dom.h
    report = {'passed': dev['value'] <= tol, 'value': dev['value'], 'tolerance': tol}
    if not report['passed']:
        report['witness'] = {'level': dev['level']}
    return report


def _local_minimality(run):
    dom, w, st = run.inputs.dom, run.inputs.w, run.inputs.st
    params = run.config.check_params
    count = len(run.fam.levels)
    picks = sorted(set(np.linspace(0, count - 1, min(count, params['local_levels']))
                       .round().astype(int).tolist()))
    checked, failures = 0, []
    for k in picks:
        rep = local_minimality_check(run.fam.sets[k], dom.interior, w, st,
                                     radius=params['local_radius'])
        checked += rep['checked']
        if not rep['passed']:
            failures.append({'level': k, 'blocks': rep['failures'][:3]})
    report = {'passed': not failures, 'value': checked, 'levels': picks}
    if failures:
        report['witness'] = failures
    return report


def _coarea(run):
    dom, w, st = run.inputs.dom, run.inputs.w, run.inputs.st
    tv, co, used = coarea_quadrature(run.solution, dom.interior, w, st, closure=True)
    diff = abs(tv - co)
    tol = run.config.tolerances['coarea'] * max(1.0, tv)
    report = {'passed': diff <= tol, 'value': diff, 'tolerance': tol,
              'total_variation': tv, 'layer_cake': co, 'levels': used}
    if diff > tol:
        report['witness'] = {'total_variation': tv, 'layer_cake': co}
    return report


# random small instances

def _coarea_random(run):
    rng = run.rng('coarea-random')
    dom = _small_square(16, 1.0 / 16)
    st = _small_stencil(run, dom)
    tol = run.config.tolerances['coarea']
    worst, witness = 0.0, None
    for trial in range(run.config.check_params['coarea_instances']):
        w = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape))
        values = rng.integers(0, 6, dom.shape) * rng.uniform(0.1, 2.0)
        tv, co, _ = coarea_quadrature(ScalarField(dom, values), None, w, st)
        if abs(tv - co) > worst:
            worst = abs(tv - co)
            witness = {'instance': trial, 'total_variation': tv, 'layer_cake': co}
    report = {'passed': worst <= tol, 'value': worst, 'tolerance': tol}
    if worst > tol:
        report['witness'] = witness
    return report


def _submodularity(run):
    rng = run.rng('submodularity-random')
    dom = _small_square(16, 1.0 / 16)
    st = _small_stencil(run, dom)
    w = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape))
    tol = run.config.tolerances['submodularity']
    lowest, witness = np.inf, None
    for trial in range(run.config.check_params['submodularity_pairs']):
        p, q = rng.uniform(0.2, 0.8, 2)
        E1 = IndicatorSet(dom, rng.random(dom.shape) < p)
        E2 = IndicatorSet(dom, rng.random(dom.shape) < q)
        defect = submodularity_defect(E1, E2, dom.interior, w, st)
        if defect < lowest:
            lowest, witness = defect, {'pair': trial}
    report = {'passed': lowest >= -tol, 'value': float(lowest), 'tolerance': -tol}
    if lowest < -tol:
        report['witness'] = witness
    return report


def _oracle(run):
    rng = run.rng('oracle-equivalence')
    side = int(np.sqrt(run.config.check_params['oracle_max_cells']))
    dom = _small_square(side, 1.0 / side)
    st = _small_stencil(run, dom)
    mismatches = []
    trials = run.config.check_params['random_instances']
    for trial in range(trials):
        w = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape))
        L_t = IndicatorSet(dom, dom.collar & (rng.random(dom.shape) < 0.5))
        fast, slow = solve_star(dom, w, st, L_t), exhaustive_min(dom, w, st, L_t)
        if (fast.units != slow.units or fast.E_max != slow.E_max
                or fast.E_min != slow.E_min):
            mismatches.append({'instance': trial, 'flow_units': fast.units,
                               'exhaustive_units': slow.units})
    report = {'passed': not mismatches, 'value': len(mismatches), 'instances': trials,
              'free_cells': int(dom.interior.sum())}
    if mismatches:
        report['witness'] = mismatches[:5]
    return report


# primal-dual cross-checks

def _tv_gap(run):
    _, cert = run.tv
    tol = run.config.tv.get('gap_tol', 1e-4)
    weak = cert['primal'] >= cert['dual'] - 1e-10 * max(1.0, abs(cert['primal']))
    report = {'passed': bool(cert['converged'] and weak), 'value': cert['gap'], 'tolerance': tol,
              'certificate': {k: v for k, v in cert.items() if k != 'dual_field'}}
    if not report['passed']:
        report['witness'] = {'iterations': cert['iterations'], 'primal': cert['primal'],
                             'dual': cert['dual']}
    return report


def _tv_superlevel(run):
    dom, w, st = run.inputs.dom, run.inputs.w, run.inputs.st
    u_pd, _ = run.tv
    ratio = run.config.tolerances['superlevel_ratio']
    worst, witness = 0.0, None
    for k, (t, E) in enumerate(zip(run.fam.levels, run.fam.sets)):
        ours = alpha_perimeter(E, dom.interior, w, st, closure=True)
        theirs = alpha_perimeter(u_pd.superlevel(t), dom.interior, w, st, closure=True)
        excess = theirs - ratio * ours
        if excess > 1e-12 * max(1.0, ours) and (witness is None or excess > worst):
            worst, witness = excess, {'level': k, 'chosen': ours, 'superlevel': theirs}
    report = {'passed': witness is None, 'value': worst, 'tolerance': ratio}
    if witness is not None:
        report['witness'] = witness
    return report


def _tv_cross(run):
    u_pd, _ = run.tv
    dom = run.inputs.dom
    diff = compare_solutions(u_pd, run.solution, dom.interior)
    value = diff['L1'] / dom.volume()
    tol = run.config.tolerances['cross_l1']
    report = {'passed': value <= tol, 'value': value, 'tolerance': tol, 'norms': diff}
    if value > tol:
        report['witness'] = {'cell': diff['argmax_cell'], 'levels': diff['argmax_levels']}
    return report


def _competitor(run):
    if run.competitor is None:
        return {'skipped': 'no competitor field available'}
    dom, w, st = run.inputs.dom, run.inputs.w, run.inputs.st
    return check_competitor_inequality(run.fam, run.competitor, dom, w, st)


# barrier condition

def _barrier_cells(dom, params):
    cells = np.flatnonzero(dom.boundary.ravel())
    points = dom.centers().reshape(-1, dom.ndim)[cells]
    if params['barrier_at']:
        targets = np.asarray(params['barrier_at'], dtype=float).reshape(-1, dom.ndim)
        _, idx = cKDTree(points).query(targets)
    else:
        n = int(params['barrier_points'])
        if dom.ndim == 2:
            theta = 2.0 * np.pi * np.arange(n) / n
            dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        else:
            z = 1.0 - 2.0 * (np.arange(n) + 0.5) / n
            phi = np.pi * (3.0 - np.sqrt(5.0)) * np.arange(n)
            r = np.sqrt(1.0 - z * z)
            dirs = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        center = dom.centers()[dom.interior].mean(axis=0)
        rel = points - center
        rel /= np.linalg.norm(rel, axis=1, keepdims=True)
        idx = np.argmax(rel @ dirs.T, axis=0)
    chosen = []
    for i in np.atleast_1d(idx):
        if int(cells[i]) not in chosen:
            chosen.append(int(cells[i]))
    return chosen


def _barrier(run):
    dom, w, st = run.inputs.dom, run.inputs.w, run.inputs.st
    params = run.config.check_params
    expect = params['barrier_expect'] == 'pass'
    verdicts = []
    for cell in _barrier_cells(dom, params):
        verdict, _ = barrier_check(dom, w, st, cell, params['barrier_eps'],
                                   params['barrier_margin'], params['barrier_select'])
        verdicts.append(verdict)
    unexpected = [v for v in verdicts if v['passed'] != expect]
    report = {'passed': not unexpected, 'value': sum(v['passed'] for v in verdicts),
              'points': len(verdicts), 'expected': params['barrier_expect'],
              'eps': params['barrier_eps'],
              'select': params['barrier_select'],
              'margin': verdicts[0]['margin'] if verdicts else None,
              'contacts_maximal': sum(v['contacts_maximal'] > 0 for v in verdicts)}
    if unexpected:
        report['witness'] = [{'cell': v['x0'], 'cells': v['witness_cells'][:5]}
                             for v in unexpected[:5]]
    return report


# conformal mass

def _conformal(weighted, riemannian, exact, tol):
    dev = max(abs(weighted - exact), abs(riemannian - exact))
    report = {'passed': dev <= tol, 'value': dev, 'tolerance': tol,
              'weighted_area': weighted, 'riemannian_area': riemannian, 'exact': exact}
    if dev > tol:
        report['witness'] = {'weighted_area': weighted, 'riemannian_area': riemannian}
    return report


def _conformal_circle(run):
    curve = polyline_circle((0.0, 0.0), 0.5, run.config.check_params['circle_segments'])
    weighted, riemannian = conformal_mass(curve, lambda p: 1.0 + np.sum(p ** 2, axis=-1),
                                          n=2, sigma=2)
    return _conformal(weighted, riemannian, 1.25 * np.pi,
                      run.config.tolerances['conformal_circle'])


def _conformal_sphere(run):
    mesh = icosphere(radius=1.0, subdivisions=run.config.check_params['sphere_subdivisions'])
    weighted, riemannian = conformal_mass(mesh, lambda p: np.full(p.shape[:-1], 4.0),
                                          n=3, sigma=1)
    return _conformal(weighted, riemannian, 16.0 * np.pi,
                      run.config.tolerances['conformal_sphere'])


# minimal surface patches

def _zero(x, s):
    return np.zeros(np.shape(s))


UNIT_WEIGHT = MSEWeight(lambda x, s: np.ones(np.shape(s)), ds=_zero, dss=_zero, alpha=1.0)
SINE_WEIGHT = MSEWeight(lambda x, s: 2.0 + np.sin(x[..., 0]) + 0.0 * s, ds=_zero, dss=_zero,
                        alpha=1.0)


def _mse_patches(run):
    if 'mse' not in run.cache:
        params = run.config.mse
        line = solve_mse_dirichlet((0.0,), (1.0,), (64,), UNIT_WEIGHT,
                                   lambda X: X[..., 0], params=params)
        nodes = run.config.check_params['mse_nodes']
        x = np.linspace(0.0, 1.0, nodes)
        patches = {'line': line, 'profiles': {}}
        for c in (0.5, 1.0):
            profile = first_integral_profile(lambda t: 2.0 + np.sin(t), c, x)
            patch = solve_mse_dirichlet((0.0,), (1.0,), (nodes - 1,), SINE_WEIGHT, profile,
                                        params=params)
            patches['profiles'][c] = (profile, patch)
        run.cache['mse'] = patches
    return run.cache['mse']


def _mse_line(run):
    line = _mse_patches(run)['line']
    err = float(np.max(np.abs(line.u - line.coordinates()[..., 0])))
    tol = run.config.tolerances['mse_line']
    report = {'passed': err <= tol and line.info['converged'], 'value': err, 'tolerance': tol,
              'newton': line.info}
    if not report['passed']:
        report['witness'] = {'node': int(np.argmax(np.abs(line.u - line.coordinates()[..., 0])))}
    return report


def _mse_oracle(run):
    profile, patch = _mse_patches(run)['profiles'][1.0]
    diff = np.abs(patch.u - profile)
    err = float(diff.max())
    tol = run.config.tolerances['mse_oracle']
    report = {'passed': err <= tol and patch.info['converged'], 'value': err, 'tolerance': tol,
              'newton': patch.info}
    if not report['passed']:
        report['witness'] = {'node': int(np.argmax(diff))}
    return report


def _mse_jacobian(run):
    weight = MSEWeight(lambda x, s: (2.0 + np.sin(x[..., 0])) * np.exp(0.3 * s),
                       ds=lambda x, s: 0.3 * (2.0 + np.sin(x[..., 0])) * np.exp(0.3 * s),
                       dss=lambda x, s: 0.09 * (2.0 + np.sin(x[..., 0])) * np.exp(0.3 * s))
    axes = np.meshgrid(np.linspace(0, 1, 7), np.linspace(0, 1, 7), indexing='ij')
    u = 0.3 * axes[0] + 0.2 * axes[1] ** 2 + 0.1 * axes[0] * axes[1]
    err = jacobian_fd_error(GraphPatch((0.0, 0.0), (1.0, 1.0), u, weight))
    tol = run.config.tolerances['mse_jacobian']
    report = {'passed': err <= tol, 'value': err, 'tolerance': tol}
    if err > tol:
        report['witness'] = {'relative_error': err}
    return report


def _mse_ellipticity(run):
    patches = _mse_patches(run)
    solved = [('line', patches['line'])] + [('profile c={}'.format(c), p)
                                            for c, (_, p) in sorted(patches['profiles'].items())]
    margins, failing = [], []
    for name, patch in solved:
        coeffs = homotopy_coefficients(patch, patch)
        cert = ellipticity_certificate(coeffs, patch.weight.alpha, coeffs.grad_sup)
        margins.append(cert['margin'])
        if not cert['passed']:
            failing.append({'patch': name, 'min_eigenvalue': cert['min_eigenvalue'],
                            'bound': cert['bound']})
    report = {'passed': not failing, 'value': float(min(margins)), 'tolerance': 0.0}
    if failing:
        report['witness'] = failing
    return report


def _mse_comparison(run):
    profiles = _mse_patches(run)['profiles']
    result = comparison_test(profiles[1.0][1], profiles[0.5][1])
    report = dict(result, value=result['min_gap'])
    if not result['passed']:
        report['witness'] = {'touching': result['touching'][:5]}
    return report


# name: (function, operation, property, needs)
CHECKS = {
    'nestedness': (_nestedness, 'build_family', 'nested-family', 'family'),
    'boundary-values': (_boundary_values, 'check_boundary_values', 'boundary-values', 'family'),
    'separation': (_separation, 'check_separation', 'boundary-separation', 'family'),
    'component-reaches-boundary': (_components, 'check_component_reaches_boundary',
                                   'component-reaches-boundary', 'family'),
    'trace-containment': (_trace_containment, 'check_trace_containment', 'trace-containment',
                          'family'),
    'superlevel-recovery': (_superlevel_recovery, 'assemble_solution', 'superlevel-recovery',
                            'family'),
    'boundary-trace': (_boundary_trace, 'assemble_solution', 'boundary-trace', None),
    'continuity-modulus': (_continuity, 'continuity_modulus', 'discrete-continuity', None),
    'exact-sup-error': (_exact_sup, 'assemble_solution', 'exact-solution', None),
    'interface-hausdorff': (_interface, 'interface_deviation', 'interface-location', 'family'),
    'local-minimality': (_local_minimality, 'local_minimality_check', 'local-minimality',
                         'family'),
    'coarea': (_coarea, 'coarea_quadrature', 'coarea-identity', None),
    'submodularity-random': (_submodularity, 'submodularity_defect', 'submodular-inequality',
                             None),
    'coarea-random': (_coarea_random, 'coarea_quadrature', 'coarea-identity', None),
    'oracle-equivalence': (_oracle, 'solve_star', 'oracle-equivalence', None),
    'tv-gap': (_tv_gap, 'solve_dirichlet_tv', 'duality-gap', 'tv'),
    'tv-superlevel-minimality': (_tv_superlevel, 'solve_dirichlet_tv', 'superlevel-minimality',
                                 'tv'),
    'tv-cross-method': (_tv_cross, 'compare_solutions', 'cross-method-agreement', 'tv'),
    'competitor-inequality': (_competitor, 'check_competitor_inequality',
                              'competitor-inequality', 'family'),
    'barrier': (_barrier, 'barrier_check', 'barrier-condition', None),
    'conformal-circle': (_conformal_circle, 'conformal_mass', 'conformal-mass-identity', None),
    'conformal-sphere': (_conformal_sphere, 'conformal_mass', 'conformal-mass-identity', None),
    'mse-line': (_mse_line, 'solve_mse_dirichlet', 'mse-classical-solution', None),
    'mse-oracle': (_mse_oracle, 'solve_mse_dirichlet', 'mse-first-integral', None),
    'mse-jacobian': (_mse_jacobian, 'jacobian', 'linearization', None),
    'mse-ellipticity': (_mse_ellipticity, 'ellipticity_certificate', 'uniform-ellipticity',
                        None),
    'mse-comparison': (_mse_comparison, 'comparison_test', 'strict-maximum-principle', None),
}

_RESERVED = ('passed', 'value', 'tolerance', 'witness', 'skipped')


def run_check(name, run):
    """
    Run one named check and wrap its report. Solver errors become failed
    checks carrying the error as witness.
    """
    func, operation, prop, needs = CHECKS[name]
    base = {'name': name, 'operation': operation, 'property': prop}
    if needs == 'family' and run.fam is None:
        return CheckResult(status='skipped', details={'reason': 'no level-set family'}, **base)
    if needs == 'tv' and run.tv is None:
        return CheckResult(status='skipped', details={'reason': 'primal-dual solve unavailable'},
                           **base)
    if needs is None and name in ('boundary-trace', 'continuity-modulus', 'exact-sup-error',
                                  'coarea') and run.solution is None:
        return CheckResult(status='skipped', details={'reason': 'no field'}, **base)
    started = time.perf_counter()
    try:
        report = func(run)
    except (LeastGradError, ValueError) as exc:
        logger.warning('check %s raised %s: %s', name, type(exc).__name__, exc)
        return CheckResult(status='fail', witness={'error': type(exc).__name__,
                                                   'message': str(exc)}, **base)
    logger.info('check %s finished in %.2fs', name, time.perf_counter() - started)
    if 'skipped' in report:
        return CheckResult(status='skipped', details={'reason': report['skipped']}, **base)
    status = 'pass' if report['passed'] else 'fail'
    witness = report.get('witness')
    if status == 'fail' and witness is None:
        witness = {'value': report.get('value'), 'tolerance': report.get('tolerance')}
    details = {k: v for k, v in report.items() if k not in _RESERVED}
    return CheckResult(status=status, value=report.get('value'),
                       tolerance=report.get('tolerance'), witness=witness, details=details,
                       **base)


def _provenance(config, inputs):
    sha = sha256_file(config.path) if os.path.isfile(config.path) else None
    return {'config': os.path.basename(config.path), 'config_sha256': sha,
            'seed': config.seed, 'h': config.h, 'K': config.K,
            'grid_shape': list(inputs.dom.shape),
            'interior_cells': int(inputs.dom.interior.sum()),
            'stencil': inputs.st.neighborhood,
            'versions': {'leastgrad': __version__, 'numpy': np.__version__,
                         'scipy': scipy.__version__, 'PyMaxflow': dist_version('PyMaxflow'),
                         'python': '.'.join(platform.python_version_tuple()[:2])}}


def _timestamp(started_at, started):
    return {'started': started_at, 'elapsed_seconds': round(time.perf_counter() - started, 3)}


def run_experiment(config_path, overrides=None):
    """
    Run the configured pipeline and write its artifacts.

    The pipeline builds the inputs, solves every level, assembles the
    field, optionally runs the primal-dual solver, then runs the selected
    checks. ``report.json``, the assembled field and the family dump land in
    the output directory.

    Args:
        config_path: TOML config file
        overrides: Optional dict with ``out``, ``seed``, ``threads``, ``checks``

    Returns:
        RunReport

    Raises:
        ConfigError: on an invalid config
        OSError: if the config cannot be read or the output cannot be written
    """
    started_at = datetime.now(timezone.utc).isoformat()
    started = time.perf_counter()
    config = load_config(config_path, overrides)
    inputs = build_inputs(config)
    out_dir = ensure_dir(config.out_dir)
    run = _Run(config=config, inputs=inputs)
    report = RunReport(provenance=_provenance(config, inputs))
    dom, w, st, bd = inputs.dom, inputs.w, inputs.st, inputs.bd

    try:
        run.fam = build_family(dom, w, st, bd, config.K, threads=config.threads)
        run.solution = assemble_solution(run.fam)
    except LeastGradError as exc:
        logger.error('level-set construction failed: %s', exc)
        report.add(CheckResult(name='construction', status='fail', operation='build_family',
                               property='nested-family',
                               witness={'error': type(exc).__name__, 'message': str(exc)}))
    if run.fam is not None:
        emit_field(run.solution, os.path.join(out_dir, 'u_star'))
        if config.write_masks:
            emit_family(run.fam, os.path.join(out_dir, 'family'), level_table(run.fam, w, st))

    wants_tv = any(CHECKS[c][3] == 'tv' for c in config.checks)
    if config.run_tv and (wants_tv or 'competitor-inequality' in config.checks):
        try:
            params = dict(config.tv)
            params.setdefault('seed', config.seed)
            run.tv = solve_dirichlet_tv(dom, w, bd, params=params)
            emit_field(run.tv[0], os.path.join(out_dir, 'u_tv'))
        except LeastGradError as exc:
            logger.error('primal-dual solve failed: %s', exc)
            report.add(CheckResult(name='tv-solve', status='fail',
                                   operation='solve_dirichlet_tv', property='duality-gap',
                                   witness={'error': type(exc).__name__, 'message': str(exc)}))
    if run.tv is not None:
        run.competitor = run.tv[0]
    elif inputs.exact is not None:
        run.competitor = ScalarField(dom, inputs.exact(dom.centers()))

    for name in config.checks:
        report.add(run_check(name, run))

    report.timestamp = _timestamp(started_at, started)
    emit_report(report, os.path.join(out_dir, 'report.json'))
    failed = report.failed()
    logger.info('%d checks, %d failed', len(report.checks), len(failed))
    return report


def verify_field(field_path, config_path, overrides=None):
    """
    Run the field checks on a stored field (CSV, or PGM with its sidecar)
    against a config, without solving for it.

    Returns:
        RunReport (also written as ``verify_report.json``)
    """
    started_at = datetime.now(timezone.utc).isoformat()
    started = time.perf_counter()
    config = load_config(config_path, overrides)
    inputs = build_inputs(config)
    dom = inputs.dom
    if field_path.endswith('.pgm'):
        values = read_field_pgm(field_path)
        if values.shape != dom.shape:
            raise ConfigError('field image {} does not match the grid {}'
                              .format(values.shape, dom.shape))
        field_ = ScalarField(dom, values)
    else:
        field_ = read_field_csv(field_path, dom)

    run = _Run(config=config, inputs=inputs, solution=field_, competitor=field_)
    report = RunReport(provenance=_provenance(config, inputs))
    selected = [c for c in config.checks if c in VERIFY_CHECKS]
    if 'competitor-inequality' in selected or 'boundary-trace' in selected:
        try:
            run.fam = build_family(dom, inputs.w, inputs.st, inputs.bd, config.K,
                                   threads=config.threads)
        except LeastGradError as exc:
            logger.error('level-set construction failed: %s', exc)
    for name in selected:
        report.add(run_check(name, run))
    report.timestamp = _timestamp(started_at, started)
    emit_report(report, os.path.join(ensure_dir(config.out_dir), 'verify_report.json'))
    return report


def dump_cut(config_path, level=None, out_path=None, overrides=None):
    """
    Write the cut problem of one level in DIMACS format.

    Args:
        config_path: TOML config file
        level: Level value; defaults to the middle of the data range
        out_path: Target file; defaults to ``cut.dimacs`` in the output directory

    Returns:
        str: The path written
    """
    config = load_config(config_path, overrides)
    inputs = build_inputs(config)
    bd = inputs.bd
    t = 0.5 * (bd.lower + bd.upper) if level is None else float(level)
    pinned = superlevel_exterior(bd, t).values
    problem = build_cut_problem(inputs.dom, inputs.w, inputs.st, inputs.dom.interior, pinned)
    if out_path is None:
        out_path = os.path.join(ensure_dir(config.out_dir), 'cut.dimacs')
    logger.info('cut problem at level %g: %d free cells, %d edges', t, problem.n_free,
                len(problem.units))
    return dump_dimacs(problem, out_path)
