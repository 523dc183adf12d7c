"""
The inhomogeneous weighted minimal surface equation on graph patches

    -div(a(x, u) grad u / sqrt(1 + |grad u|^2)) + d_s a(x, u) sqrt(1 + |grad u|^2) = 0

discretized with staggered fluxes on a node grid over an interval (graphs in
the plane) or a rectangle (graphs in space). Boundary nodes carry Dirichlet
data; interior nodes are the unknowns.
"""

import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from ..errors import (HypothesisViolated, NonConvergence, SingularJacobian,
                      TestFunctionNotCompactlySupported)

logger = logging.getLogger(__name__)

DEFAULT_PARAMS = {'tol': 1e-10, 'max_iter': 50, 'max_halvings': 30}
_GAUSS_POINTS = 8


@dataclass(frozen=True)
class MSEWeight:
    """
    Weight a(x', s) with its first and second s-derivatives.

    Missing derivatives are replaced by central differences with step
    ``step``. ``x`` has the base coordinates on its last axis.
    """
    func: Callable
    ds: Optional[Callable] = None
    dss: Optional[Callable] = None
    alpha: Optional[float] = None
    step: float = 1e-5

    def value(self, x, s):
        return np.broadcast_to(np.asarray(self.func(x, s), dtype=float), np.shape(s))

    def d1(self, x, s):
        if self.ds is not None:
            return np.broadcast_to(np.asarray(self.ds(x, s), dtype=float), np.shape(s))
        e = self.step
        return (self.value(x, s + e) - self.value(x, s - e)) / (2.0 * e)

    def d2(self, x, s):
        if self.dss is not None:
            return np.broadcast_to(np.asarray(self.dss(x, s), dtype=float), np.shape(s))
        e = self.step
        return (self.value(x, s + e) - 2.0 * self.value(x, s) + self.value(x, s - e)) / (e * e)


@dataclass(frozen=True, eq=False)
class GraphPatch:
    """
    Height field over a regular node grid spanning [lower, upper].

    ``u`` has one entry per node, boundary nodes included. ``info`` carries
    solver diagnostics when the patch comes out of
    :func:`solve_mse_dirichlet`.
    """
    lower: tuple
    upper: tuple
    u: np.ndarray
    weight: MSEWeight
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim not in (1, 2) or len(self.lower) != u.ndim or len(self.upper) != u.ndim:
            raise ValueError('patches are intervals or rectangles matching the node array')
        if min(u.shape) < 3:
            raise ValueError('patch needs at least one interior node per axis')
        if not np.all(np.isfinite(u)):
            raise ValueError('height field must be finite')
        u.setflags(write=False)
        object.__setattr__(self, 'u', u)
        if self.weight.alpha is not None:
            low = float(np.min(self.weight.value(self.coordinates(), u)))
            if low < self.weight.alpha:
                raise ValueError('weight {} below its lower bound {}'.format(low, self.weight.alpha))

    @property
    def base_dim(self):
        return self.u.ndim

    @property
    def spacing(self):
        return tuple((hi - lo) / (n - 1) for lo, hi, n in zip(self.lower, self.upper, self.u.shape))

    @property
    def geometry(self):
        return (tuple(float(v) for v in self.lower), tuple(float(v) for v in self.upper), self.u.shape)

    def coordinates(self):
        axes = [np.linspace(lo, hi, n) for lo, hi, n in zip(self.lower, self.upper, self.u.shape)]
        return np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)

    def interior(self):
        mask = np.zeros(self.u.shape, dtype=bool)
        mask[tuple(slice(1, -1) for _ in range(self.u.ndim))] = True
        return mask

    def with_values(self, u, info=None):
        return GraphPatch(self.lower, self.upper, u, self.weight, dict(info or {}))


@dataclass(frozen=True, eq=False)
class LinearizedCoefficients:
    """
    Homotopy-averaged coefficients of the linearized operator
    ``L w = div(A grad w + b w) + c . grad w + d w`` at interior nodes.
    ``grad_sup`` bounds |grad u^t| over the homotopy.
    """
    aij: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    grad_sup: float


@dataclass(frozen=True)
class _Operators:
    shape: tuple
    interior: np.ndarray
    grads: tuple
    averages: tuple
    divergences: tuple
    face_points: tuple
    central: tuple
    select: object
    volume: float


def _matrix(rows, cols, vals, shape):
    return sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=shape).tocsr()


@lru_cache(maxsize=32)
def _operators(lower, upper, shape):
    """Sparse difference operators of a node grid."""
    m = len(shape)
    h = tuple((hi - lo) / (n - 1) for lo, hi, n in zip(lower, upper, shape))
    n_nodes = int(np.prod(shape))
    flat = np.arange(n_nodes).reshape(shape)
    inner = tuple(slice(1, n - 1) for n in shape)
    interior = flat[inner].ravel()
    row_of = np.full(n_nodes, -1)
    row_of[interior] = np.arange(interior.size)
    axes = [np.linspace(lo, hi, n) for lo, hi, n in zip(lower, upper, shape)]
    coords = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)

    def shift(idx, axis, step):
        out = list(idx)
        out[axis] = slice(idx[axis].start + step, idx[axis].stop + step)
        return tuple(out)

    grads, averages, divergences, points = [], [], [], []
    for k in range(m):
        # faces between q and q + e_k; tangential axes restricted to interior rows
        base = tuple(slice(0, shape[j] - 1) if j == k else slice(1, shape[j] - 1) for j in range(m))
        lo_nodes = flat[base].ravel()
        hi_nodes = flat[shift(base, k, 1)].ravel()
        nf = lo_nodes.size
        faces = np.arange(nf)
        comps = []
        for j in range(m):
            if j == k:
                comps.append(_matrix([faces, faces], [lo_nodes, hi_nodes],
                                     [np.full(nf, -1.0 / h[k]), np.full(nf, 1.0 / h[k])], (nf, n_nodes)))
            else:
                up = shift(base, j, 1)
                down = shift(base, j, -1)
                cols = [flat[up].ravel(), flat[down].ravel(),
                        flat[shift(up, k, 1)].ravel(), flat[shift(down, k, 1)].ravel()]
                vals = [np.full(nf, s / (4.0 * h[j])) for s in (1.0, -1.0, 1.0, -1.0)]
                comps.append(_matrix([faces] * 4, cols, vals, (nf, n_nodes)))
        grads.append(tuple(comps))
        averages.append(_matrix([faces, faces], [lo_nodes, hi_nodes],
                                [np.full(nf, 0.5), np.full(nf, 0.5)], (nf, n_nodes)))
        rows, cols, vals = [], [], []
        for nodes, sign in ((lo_nodes, -1.0), (hi_nodes, 1.0)):
            keep = row_of[nodes] >= 0
            rows.append(row_of[nodes][keep])
            cols.append(faces[keep])
            vals.append(np.full(int(keep.sum()), sign / h[k]))
        divergences.append(_matrix(rows, cols, vals, (interior.size, nf)))
        points.append(0.5 * (coords.reshape(-1, m)[lo_nodes] + coords.reshape(-1, m)[hi_nodes]))

    central = []
    rows = np.arange(interior.size)
    for j in range(m):
        up = flat[shift(inner, j, 1)].ravel()
        down = flat[shift(inner, j, -1)].ravel()
        central.append(_matrix([rows, rows], [up, down],
                               [np.full(rows.size, 0.5 / h[j]), np.full(rows.size, -0.5 / h[j])],
                               (interior.size, n_nodes)))
    select = _matrix([rows], [interior], [np.ones(rows.size)], (interior.size, n_nodes))
    return _Operators(shape=shape, interior=interior, grads=tuple(grads), averages=tuple(averages),
                      divergences=tuple(divergences), face_points=tuple(points),
                      central=tuple(central), select=select, volume=float(np.prod(h)))


def _ops(patch):
    return _operators(*patch.geometry)


def _face_state(ops, k, u):
    s = ops.averages[k] @ u
    p = np.stack([g @ u for g in ops.grads[k]], axis=-1)
    return ops.face_points[k], s, p


def _node_state(ops, patch, u):
    x = patch.coordinates().reshape(-1, patch.base_dim)[ops.interior]
    p = np.stack([c @ u for c in ops.central], axis=-1)
    return x, u[ops.interior], p


def _fluxes(weight, ops, u):
    out = []
    for k in range(len(ops.shape)):
        x, s, p = _face_state(ops, k, u)
        out.append(weight.value(x, s) * p[:, k] / np.sqrt(1.0 + np.sum(p ** 2, axis=-1)))
    return out


def _source(weight, ops, patch, u):
    x, s, p = _node_state(ops, patch, u)
    return weight.d1(x, s) * np.sqrt(1.0 + np.sum(p ** 2, axis=-1))


def _residual_flat(patch, u):
    ops = _ops(patch)
    fluxes = _fluxes(patch.weight, ops, u)
    return sum(D @ F for D, F in zip(ops.divergences, fluxes)) + _source(patch.weight, ops, patch, u)


def mse_residual(patch):
    """
    Residual of the weighted minimal surface equation at interior nodes.

    Returns:
        numpy.ndarray: shape of the interior node block
    """
    inner_shape = tuple(n - 2 for n in patch.u.shape)
    return _residual_flat(patch, patch.u.ravel()).reshape(inner_shape)


def weak_form(patch, phi):
    """
    Discrete weak form: sum over faces of flux times the normal difference
    of ``phi``, plus the source term paired with ``phi``, times the cell
    volume. Positive for strict supersolutions tested with phi >= 0.

    Raises:
        TestFunctionNotCompactlySupported: if phi is nonzero on the patch boundary
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != patch.u.shape:
        raise ValueError('test function must live on the patch nodes')
    boundary = ~patch.interior()
    if np.any(phi[boundary] != 0):
        raise TestFunctionNotCompactlySupported('test function is nonzero on {} boundary nodes'
                                                .format(int(np.count_nonzero(phi[boundary]))))
    ops = _ops(patch)
    u, f = patch.u.ravel(), phi.ravel()
    fluxes = _fluxes(patch.weight, ops, u)
    total = sum(float(np.sum(F * (ops.grads[k][k] @ f))) for k, F in enumerate(fluxes))
    total += float(np.sum(_source(patch.weight, ops, patch, u) * f[ops.interior]))
    return total * ops.volume


def _integrand(weight, x, s, p):
    q = 1.0 + np.sum(p ** 2, axis=-1)
    root = np.sqrt(q)
    m = p.shape[-1]
    a = weight.value(x, s)
    da = weight.d1(x, s)
    dda = weight.d2(x, s)
    outer = p[..., :, None] * p[..., None, :]
    aij = (a / q ** 1.5)[..., None, None] * (q[..., None, None] * np.eye(m) - outer)
    b = (da / root)[..., None] * p
    return aij, b, -b, -dda * root


def _homotopy(weight, x, s0, s1, p0, p1):
    nodes, weights = leggauss(_GAUSS_POINTS)
    ts, ws = 0.5 * (nodes + 1.0), 0.5 * weights
    acc = None
    for t, wt in zip(ts, ws):
        parts = _integrand(weight, x, s0 + t * (s1 - s0), p0 + t * (p1 - p0))
        acc = [wt * v for v in parts] if acc is None else [A + wt * v for A, v in zip(acc, parts)]
    return acc


def homotopy_coefficients(u0, u1):
    """
    Coefficients of the linear equation satisfied by ``u1 - u0``, averaged
    along ``u^t = u0 + t (u1 - u0)`` with 8-point Gauss-Legendre.

    Returns:
        LinearizedCoefficients at the interior nodes
    """
    if u0.geometry != u1.geometry:
        raise ValueError('patches must share their node grid')
    ops = _ops(u0)
    x, s0, p0 = _node_state(ops, u0, u0.u.ravel())
    _, s1, p1 = _node_state(ops, u1, u1.u.ravel())
    aij, b, c, d = _homotopy(u0.weight, x, s0, s1, p0, p1)
    sup = max(float(np.max(np.linalg.norm(p0, axis=-1), initial=0.0)),
              float(np.max(np.linalg.norm(p1, axis=-1), initial=0.0)))
    inner_shape = tuple(n - 2 for n in u0.u.shape)
    m = u0.base_dim
    return LinearizedCoefficients(aij=aij.reshape(inner_shape + (m, m)),
                                  b=b.reshape(inner_shape + (m,)),
                                  c=c.reshape(inner_shape + (m,)),
                                  d=d.reshape(inner_shape), grad_sup=sup)


def ellipticity_certificate(coeffs, alpha, K):
    """
    Check ``A xi . xi >= alpha |xi|^2 / (1 + K^2)^(3/2)`` at every node.

    Raises:
        ValueError: if K does not bound the gradients behind the coefficients
    """
    if K < coeffs.grad_sup:
        raise ValueError('K={} is below the gradient bound {}'.format(K, coeffs.grad_sup))
    sym = 0.5 * (coeffs.aij + np.swapaxes(coeffs.aij, -1, -2))
    lowest = float(np.min(np.linalg.eigvalsh(sym)))
    bound = alpha / (1.0 + K * K) ** 1.5
    return {'passed': lowest >= bound - 1e-10, 'min_eigenvalue': lowest,
            'bound': bound, 'margin': lowest - bound,
            'symmetry_defect': float(np.max(np.abs(coeffs.aij - np.swapaxes(coeffs.aij, -1, -2))))}


def _jacobian_flat(patch, u):
    ops = _ops(patch)
    w = patch.weight
    J = None
    for k in range(len(ops.shape)):
        x, s, p = _face_state(ops, k, u)
        aij, b, _, _ = _integrand(w, x, s, p)
        dF = sum(sparse.diags(aij[:, k, j]) @ ops.grads[k][j] for j in range(len(ops.shape)))
        dF = dF + sparse.diags(b[:, k]) @ ops.averages[k]
        term = ops.divergences[k] @ dF
        J = term if J is None else J + term
    x, s, p = _node_state(ops, patch, u)
    _, _, c, d = _integrand(w, x, s, p)
    J = J - sparse.diags(d) @ ops.select
    for j, C in enumerate(ops.central):
        J = J - sparse.diags(c[:, j]) @ C
    return J.tocsr()[:, ops.interior]


def jacobian(patch):
    """
    Derivative of the interior residual with respect to the interior nodes,
    i.e. minus the linearized operator assembled from the pointwise
    coefficients at the faces (A, b) and at the nodes (c, d).
    """
    return _jacobian_flat(patch, patch.u.ravel())


def jacobian_fd_error(patch, eps=1e-6):
    """Largest entry of (assembled - finite-difference Jacobian), relative to the largest entry."""
    ops = _ops(patch)
    u = patch.u.ravel().copy()
    J = jacobian(patch).toarray()
    fd = np.zeros_like(J)
    for col, node in enumerate(ops.interior):
        up, down = u.copy(), u.copy()
        up[node] += eps
        down[node] -= eps
        fd[:, col] = (_residual_flat(patch, up) - _residual_flat(patch, down)) / (2.0 * eps)
    return float(np.max(np.abs(J - fd)) / max(np.max(np.abs(J)), 1e-300))


def patch_energy(patch):
    """Discrete weighted graph area: face samples of a(x, u) sqrt(1 + |grad u|^2)."""
    ops = _ops(patch)
    u = patch.u.ravel()
    total = 0.0
    for k in range(len(ops.shape)):
        x, s, p = _face_state(ops, k, u)
        total += float(np.sum(patch.weight.value(x, s) * np.sqrt(1.0 + np.sum(p ** 2, axis=-1))))
    return total * ops.volume / len(ops.shape)


def _boundary_nodes(lower, upper, cells, boundary):
    shape = tuple(int(c) + 1 for c in cells)
    template = GraphPatch(tuple(lower), tuple(upper), np.zeros(shape), MSEWeight(lambda x, s: 1.0 + 0 * s))
    if callable(boundary):
        values = np.asarray(boundary(template.coordinates()), dtype=float)
    else:
        values = np.asarray(boundary, dtype=float)
    if values.shape != shape:
        raise ValueError('boundary values must cover the node grid {}'.format(shape))
    if not np.all(np.isfinite(values[~template.interior()])):
        raise ValueError('boundary values must be finite')
    return values, template


def _harmonic_guess(template, values):
    ops = _ops(template)
    lap = sum(D @ g[k] for k, (D, g) in enumerate(zip(ops.divergences, ops.grads)))
    u = np.where(template.interior(), 0.0, values).ravel()
    rhs = -(lap @ u)
    u[ops.interior] = np.atleast_1d(spsolve(lap[:, ops.interior].tocsc(), rhs))
    return u


def solve_mse_dirichlet(lower, upper, cells, weight, boundary, params=None, strict=False):
    """
    Solve the Dirichlet problem by damped Newton iteration.

    The initial guess interpolates the boundary data harmonically (linearly
    on an interval). Each step is halved up to ``max_halvings`` times until
    the residual max-norm decreases. Iteration continues down to ``tol`` or
    until no step lowers the residual; the solve counts as converged when
    the residual, or the residual weighted by the node volume, is within
    ``tol``.

    Args:
        lower, upper: Corners of the base interval or rectangle
        cells: Number of cells per axis
        weight: MSEWeight
        boundary: Callable of node coordinates or an array over the nodes
            (only boundary entries are used)
        params: Overrides of :data:`DEFAULT_PARAMS`
        strict: Raise NonConvergence instead of flagging it in ``info``

    Returns:
        GraphPatch with ``info`` = {converged, iterations, residual,
        weak_residual}

    Raises:
        SingularJacobian: if a Newton system cannot be solved
    """
    p = dict(DEFAULT_PARAMS)
    p.update(params or {})
    values, template = _boundary_nodes(lower, upper, cells, boundary)
    patch = GraphPatch(template.lower, template.upper, np.where(template.interior(), 0.0, values), weight)
    ops = _ops(patch)
    u = _harmonic_guess(template, values)

    R = _residual_flat(patch, u)
    norm = float(np.max(np.abs(R)))
    iterations = 0
    while norm > p['tol'] and iterations < p['max_iter']:
        iterations += 1
        J = _jacobian_flat(patch, u)
        with warnings.catch_warnings():
            warnings.simplefilter('error', MatrixRankWarning)
            try:
                delta = np.atleast_1d(spsolve(J.tocsc(), -R))
            except (MatrixRankWarning, RuntimeError) as exc:
                raise SingularJacobian('Newton system is singular at iteration {}: {}'
                                       .format(iterations, exc))
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian('Newton step is not finite at iteration {}'.format(iterations))

        step, accepted = 1.0, False
        for _ in range(p['max_halvings'] + 1):
            trial = u.copy()
            trial[ops.interior] += step * delta
            R_trial = _residual_flat(patch, trial)
            trial_norm = float(np.max(np.abs(R_trial)))
            if trial_norm < norm:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            logger.debug('Newton stalled at residual %.3e', norm)
            break
        u, R, norm = trial, R_trial, trial_norm
        logger.debug('Newton iteration %d: residual %.3e, step %g', iterations, norm, step)

    # round-off in the strong residual grows like 1/h; its weighted form does not
    weak = norm * ops.volume
    converged = min(norm, weak) <= p['tol']
    info = {'converged': converged, 'iterations': iterations, 'residual': norm,
            'weak_residual': weak}
    if not converged:
        logger.warning('Newton stopped with residual %.3e after %d iterations', norm, iterations)
        if strict:
            raise NonConvergence('residual {:.3e} (weighted {:.3e}) above {:.1e}'
                                 .format(norm, weak, p['tol']))
    return patch.with_values(u.reshape(patch.u.shape), info)


def comparison_test(u_super, u_sub, tol=1e-8, agreement_tol=1e-6):
    """
    Discrete comparison and strict maximum principle for two patches.

    Both patches are certified (residual >= -tol for the supersolution,
    <= tol for the subsolution, ordered boundary data), re-solved with
    their own boundary values, and checked for ordering. Where the solved
    graphs touch, they must agree on the surrounding 3x3 block (3 nodes on
    an interval) to ``agreement_tol``.

    Returns:
        dict: passed, ordered, min_gap, touching nodes, agreement

    Raises:
        HypothesisViolated: if the certification fails
    """
    if u_super.geometry != u_sub.geometry:
        raise HypothesisViolated('patches live on different node grids')
    r_super, r_sub = mse_residual(u_super), mse_residual(u_sub)
    if np.min(r_super) < -tol:
        raise HypothesisViolated('upper patch is not a supersolution (residual {:.3e})'
                                 .format(float(np.min(r_super))))
    if np.max(r_sub) > tol:
        raise HypothesisViolated('lower patch is not a subsolution (residual {:.3e})'
                                 .format(float(np.max(r_sub))))
    boundary = ~u_super.interior()
    if np.any(u_sub.u[boundary] > u_super.u[boundary] + tol):
        raise HypothesisViolated('boundary data are not ordered')

    lower, upper, shape = u_super.geometry
    cells = tuple(n - 1 for n in shape)
    top = solve_mse_dirichlet(lower, upper, cells, u_super.weight, u_super.u)
    bottom = solve_mse_dirichlet(lower, upper, cells, u_sub.weight, u_sub.u)

    inner = u_super.interior()
    gap = top.u - bottom.u
    min_gap = float(np.min(gap[inner]))
    ordered = min_gap >= -tol
    touching = np.argwhere(inner & (np.abs(gap) <= tol))
    worst = 0.0
    for node in touching:
        block = tuple(slice(max(i - 1, 0), i + 2) for i in node)
        worst = max(worst, float(np.max(np.abs(gap[block]))))
    agreement = worst <= agreement_tol
    return {'passed': bool(ordered and agreement), 'ordered': bool(ordered), 'min_gap': min_gap,
            'touching': [list(map(int, t)) for t in touching[:20]],
            'touching_count': int(len(touching)), 'neighborhood_deviation': worst,
            'neighborhood': '3x3' if u_super.base_dim == 2 else '3-point'}


def first_integral_profile(a, c, x, u0=0.0):
    """
    Graph with constant flux ``a u' / sqrt(1 + u'^2) = c`` for a weight of
    the base coordinate only, so ``u' = c / sqrt(a^2 - c^2)``.

    Args:
        a: Callable of the base coordinate
        c: Flux constant, |c| < min a
        x: Increasing sample points
        u0: Value at ``x[0]``

    Returns:
        numpy.ndarray: u at ``x``
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(c) >= np.asarray(a(x), dtype=float)):
        raise ValueError('flux constant {} must stay below the weight'.format(c))
    sol = solve_ivp(lambda t, y: [c / np.sqrt(float(a(t)) ** 2 - c * c)], (x[0], x[-1]), [u0],
                    t_eval=x, rtol=1e-12, atol=1e-14, method='DOP853')
    if not sol.success:
        raise NonConvergence('profile integration failed: {}'.format(sol.message))
    return sol.y[0]
