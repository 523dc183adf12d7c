"""
Direct minimization of the weighted total variation with Dirichlet data by
the first-order primal-dual method, certified by a duality gap.

The collar is pinned to the extended boundary data and the unknowns are
clipped to the data range [min g, max g], which keeps the dual objective
finite. Dual fields live on the active cells: interior cells and cells
whose forward neighbor is interior.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..domain.boundary import nearest_extension
from ..errors import NonConvergence
from ..fields import DiscreteVectorField, ScalarField, require_same_domain
from ..geometry.duality import discrete_divergence, discrete_gradient
from ..geometry.perimeter import alpha_total_variation
from ..utils.grid_utils import shifted

logger = logging.getLogger(__name__)

DEFAULT_PARAMS = {'max_iter': 20000, 'gap_tol': 1e-4, 'check_every': 10,
                  'power_iterations': 20, 'seed': 0}


@dataclass
class PDState:
    """Iterate of the primal-dual method."""
    u: np.ndarray
    Y: np.ndarray
    tau: float
    sigma: float
    iteration: int = 0
    gap_history: list = field(default_factory=list)


def active_cells(dom):
    """Cells whose forward-difference gradient involves an interior cell."""
    active = np.array(dom.interior)
    for axis in range(dom.ndim):
        off = tuple(1 if k == axis else 0 for k in range(dom.ndim))
        active |= shifted(dom.interior, off, False)
    return active


def _project(Y, bound):
    """Pointwise projection of each vector onto the ball of radius ``bound``."""
    norms = np.sqrt(np.sum(Y ** 2, axis=-1))
    factor = np.where(norms > bound, bound / np.maximum(norms, 1e-300), 1.0)
    return Y * factor[..., None]


def _operator_norm(dom, active, iterations, rng):
    free = dom.interior
    x = rng.standard_normal(dom.shape) * free
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        g = discrete_gradient(x, dom.h) * active[..., None]
        y = -discrete_divergence(g, dom.h) * free
        estimate = float(np.sum(x * y))
        x = y / max(np.linalg.norm(y), 1e-300)
    bound = np.sqrt(4.0 * dom.ndim) / dom.h
    return min(1.1 * np.sqrt(max(estimate, 0.0)), bound)


def primal_value(u, dom, w, active):
    grad = discrete_gradient(u, dom.h)
    density = w.cell * np.sqrt(np.sum(grad ** 2, axis=-1))
    return float(np.sum(density[active]) * dom.h ** dom.ndim)


def dual_value(Y, dom, G, lower, upper):
    """
    Minimum of ``<grad u, Y>`` over fields pinned to ``G`` on the collar and
    bounded by [lower, upper] inside.
    """
    k = -discrete_divergence(Y, dom.h)
    free = dom.interior
    pinned_part = np.sum(G[~free] * k[~free])
    free_part = np.sum(np.minimum(lower * k[free], upper * k[free]))
    return float((pinned_part + free_part) * dom.h ** dom.ndim)


def relative_gap(primal, dual):
    scale = max(abs(primal), abs(dual))
    if scale == 0:
        return 0.0
    return (primal - dual) / max(scale, 1e-300)


def solve_dirichlet_tv(dom, w, bd, params=None, strict=False):
    """
    Minimize ``h**n * sum a |grad u|`` with ``u = G`` on the collar.

    Args:
        dom: DiscreteDomain
        w: WeightField
        bd: BoundaryData
        params: Overrides of :data:`DEFAULT_PARAMS` (max_iter, gap_tol, ...)
        strict: Raise NonConvergence instead of flagging it

    Returns:
        tuple: (ScalarField, certificate dict with primal, dual, gap,
        iterations, converged)
    """
    p = dict(DEFAULT_PARAMS)
    p.update(params or {})
    if p['max_iter'] <= 0 or p['gap_tol'] <= 0:
        raise ValueError('max_iter and gap_tol must be positive')

    free = dom.interior
    active = active_cells(dom)
    lower, upper = bd.lower, bd.upper
    G = bd.values()

    u = np.where(free, nearest_extension(bd, free), G)
    u = np.where(free, np.clip(u, lower, upper), G)
    L = _operator_norm(dom, active, p['power_iterations'], np.random.default_rng(p['seed']))
    step = 1.0 / L if L > 0 else 1.0
    state = PDState(u=u, Y=np.zeros(dom.shape + (dom.ndim,)), tau=step, sigma=step)
    bound = w.cell
    mask = active[..., None]

    best_u, best_primal = u.copy(), primal_value(u, dom, w, active)
    best_Y, best_dual = state.Y.copy(), dual_value(state.Y, dom, G, lower, upper)
    gap = relative_gap(best_primal, best_dual)
    u_bar = u.copy()
    u_sum, Y_sum = np.zeros(dom.shape), np.zeros(state.Y.shape)
    converged = False

    while not converged and state.iteration < p['max_iter']:
        state.iteration += 1
        Y = state.Y + state.sigma * discrete_gradient(u_bar, dom.h)
        state.Y = np.where(mask, _project(Y, bound), 0.0)

        u_old = state.u
        u_new = u_old + state.tau * discrete_divergence(state.Y, dom.h)
        state.u = np.where(free, np.clip(u_new, lower, upper), G)
        u_bar = 2.0 * state.u - u_old
        u_sum += state.u
        Y_sum += state.Y

        if state.iteration == 1 or state.iteration % p['check_every'] == 0:
            # running averages stay feasible and are scored as candidates too
            n = state.iteration
            for cand in (state.u, u_sum / n):
                primal = primal_value(cand, dom, w, active)
                if primal < best_primal:
                    best_primal, best_u = primal, cand.copy()
            for cand in (state.Y, Y_sum / n):
                dual = dual_value(cand, dom, G, lower, upper)
                if dual > best_dual:
                    best_dual, best_Y = dual, cand.copy()
            gap = relative_gap(best_primal, best_dual)
            state.gap_history.append((state.iteration, gap))
            converged = gap <= p['gap_tol']
            if state.iteration % (100 * p['check_every']) == 0:
                logger.debug('iteration %d: primal %.10g dual %.10g gap %.3e',
                             state.iteration, best_primal, best_dual, gap)

    certificate = {'primal': best_primal, 'dual': best_dual, 'gap': gap,
                   'iterations': state.iteration, 'converged': bool(converged),
                   'feasibility_violation': max(0.0, float(np.max(
                       np.sqrt(np.sum(best_Y ** 2, axis=-1)) - w.cell)))}
    if converged:
        logger.info('primal-dual converged after %d iterations, gap %.3e', state.iteration, gap)
    else:
        logger.warning('primal-dual stopped at %d iterations with gap %.3e > %.1e',
                       state.iteration, gap, p['gap_tol'])
        if strict:
            raise NonConvergence('duality gap {:.3e} above tolerance after {} iterations'
                                 .format(gap, state.iteration))
    result = ScalarField(dom, best_u)
    certificate['dual_field'] = DiscreteVectorField(dom, best_Y)
    return result, certificate


def objective_primal(u, dom, w, st):
    """
    Cut-metric variation of ``u`` over the closure of the interior; edges
    between interior and collar carry the boundary mismatch.
    """
    return alpha_total_variation(u, dom.interior, w, st, closure=True)


def compare_solutions(u1, u2, region=None):
    """
    Discrete norms of ``u1 - u2`` over a region (interior by default).

    Returns:
        dict: L1, L2, Linf, the cell where the largest difference occurs and
        the two values there
    """
    require_same_domain(u1, u2)
    dom = u1.domain
    region = dom.interior if region is None else np.asarray(
        getattr(region, 'values', region), dtype=bool)
    diff = np.abs(u1.values - u2.values)
    diff = np.where(region, diff, 0.0)
    vol = dom.h ** dom.ndim
    cell = int(np.argmax(diff))
    return {'L1': float(np.sum(diff) * vol),
            'L2': float(np.sqrt(np.sum(diff ** 2) * vol)),
            'Linf': float(diff.ravel()[cell]),
            'argmax_cell': cell,
            'argmax_levels': [float(u1.values.ravel()[cell]), float(u2.values.ravel()[cell])]}
