"""
Exact weighted-perimeter minimization with fixed exterior by max-flow/min-cut,
an exhaustive oracle for tiny instances, the local minimality check and the
barrier condition.

Capacities are quantized to integers once per problem so that the flow
solver, the oracle and every objective comparison use the same exact units.
"""

import logging
from dataclasses import dataclass

import maxflow
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import (BallCoversDomain, BallTooSmall, CapacityOverflow, LeastGradError,
                      TooLarge)
from ..fields import IndicatorSet
from ..geometry.perimeter import cut_edges
from ..utils.grid_utils import dilate

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE = 20
_CHUNK = 1 << 14
_UNIT_RANGE = 2.0 ** 40
# total capacity stays exactly representable in a double
_TOTAL_RANGE = 2.0 ** 52
BARRIER_SHELL_CELLS = 8


@dataclass(frozen=True, eq=False)
class CutProblem:
    """
    Graph form of the constrained perimeter problem.

    Graph nodes are the free cells (first ``n_free`` entries of ``nodes``,
    flat box indices in C order) followed by the pinned cells touching them.
    ``tails``/``heads``/``units`` list the undirected stencil edges with at
    least one free endpoint, with integer capacities ``round(c * scale)``.
    Pinned cells are tied to the source (inside) or the sink (outside) by
    arcs of capacity :attr:`pin_units`, which exceeds every finite cut.
    """
    domain: object
    free: np.ndarray
    pinned: np.ndarray
    nodes: np.ndarray
    n_free: int
    tails: np.ndarray
    heads: np.ndarray
    units: np.ndarray
    scale: float

    @property
    def pin_units(self):
        return int(self.units.sum()) + 1

    @property
    def source(self):
        return len(self.nodes)

    @property
    def sink(self):
        return len(self.nodes) + 1

    def pinned_inside(self):
        """Membership of the pinned graph nodes."""
        return self.pinned.ravel()[self.nodes[self.n_free:]]

    def value_units(self, members):
        """Integer cut value of a set (boolean box mask or IndicatorSet)."""
        vals = members.values if isinstance(members, IndicatorSet) else np.asarray(members, bool)
        x = vals.ravel()[self.nodes]
        return int(np.sum(self.units[x[self.tails] != x[self.heads]]))

    def compose(self, free_bits):
        """Box mask with the pinned memberships and the given free-cell bits."""
        out = np.array(self.pinned, dtype=bool)
        out[self.free] = False
        out.ravel()[self.nodes[:self.n_free]] = np.asarray(free_bits, dtype=bool)
        return out


@dataclass(frozen=True, eq=False)
class MinimizerPair:
    """Smallest and largest optimal sets of one cut problem."""
    E_min: IndicatorSet
    E_max: IndicatorSet
    value: float
    units: int


def _window_edges(dom, fam, lo, hi):
    """Flat endpoints and capacities of the edges of ``fam`` inside a window."""
    starts, stops, cap_index = [], [], []
    for a, b, o in zip(lo, hi, fam.offset):
        s, e = max(a, a - o), min(b, b - o)
        e = max(e, s)
        base = max(0, -o)
        starts.append(s)
        stops.append(e)
        cap_index.append(slice(s - base, e - base))
    if any(e <= s for s, e in zip(starts, stops)):
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    grids = np.meshgrid(*[np.arange(s, e) for s, e in zip(starts, stops)], indexing='ij')
    p = np.ravel_multi_index(tuple(grids), dom.shape).ravel()
    q = np.ravel_multi_index(tuple(g + o for g, o in zip(grids, fam.offset)), dom.shape).ravel()
    return p, q, fam.capacity[tuple(cap_index)].ravel()


def build_cut_problem(dom, w, st, free, pinned, window=None):
    """
    Assemble a :class:`CutProblem`.

    Args:
        dom: DiscreteDomain
        w: WeightField
        st: CutStencil
        free: Boolean box mask of the cells to optimize
        pinned: Boolean box mask giving the membership of every other cell
        window: Optional (lower, upper) index corners of a sub-box that
            contains the free cells and their stencil halo

    Returns:
        CutProblem

    Raises:
        CapacityOverflow: if a capacity is not finite or does not survive
            integer quantization
    """
    free = np.asarray(free, dtype=bool)
    pinned = np.asarray(pinned, dtype=bool) & ~free
    if window is None:
        lo, hi = (0,) * dom.ndim, dom.shape
    else:
        lo = tuple(max(0, int(v)) for v in window[0])
        hi = tuple(min(n, int(v)) for n, v in zip(dom.shape, window[1]))

    flat_free = free.ravel()
    tails, heads, caps = [], [], []
    for fam in cut_edges(dom, w, st):
        p, q, c = _window_edges(dom, fam, lo, hi)
        keep = flat_free[p] | flat_free[q]
        tails.append(p[keep])
        heads.append(q[keep])
        caps.append(c[keep])
    tails = np.concatenate(tails) if tails else np.zeros(0, dtype=np.int64)
    heads = np.concatenate(heads) if heads else np.zeros(0, dtype=np.int64)
    caps = np.concatenate(caps) if caps else np.zeros(0)

    if not np.all(np.isfinite(caps)):
        raise CapacityOverflow('non-finite edge capacity')
    cmax = float(caps.max()) if caps.size else 1.0
    if cmax <= 0:
        raise CapacityOverflow('edge capacities must be positive')
    scale = min(_UNIT_RANGE, _TOTAL_RANGE / (caps.size + 1)) / cmax
    units = np.rint(caps * scale).astype(np.int64)
    if np.any(units <= 0):
        raise CapacityOverflow('capacity ratio {:.3g} exceeds the integer range'
                               .format(cmax / float(caps.min())))

    free_nodes = np.flatnonzero(flat_free)
    touched = np.union1d(tails, heads)
    halo = np.setdiff1d(touched, free_nodes, assume_unique=True)
    nodes = np.concatenate([free_nodes, halo]).astype(np.int64)
    order = np.argsort(nodes, kind='stable')

    def lookup(idx):
        return order[np.searchsorted(nodes[order], idx)]

    return CutProblem(domain=dom, free=free, pinned=pinned, nodes=nodes,
                      n_free=int(free_nodes.size), tails=lookup(tails), heads=lookup(heads),
                      units=units, scale=scale)


def _pair_from_bits(problem, min_bits, max_bits, units):
    dom = problem.domain
    return MinimizerPair(E_min=IndicatorSet(dom, problem.compose(min_bits)),
                         E_max=IndicatorSet(dom, problem.compose(max_bits)),
                         value=units / problem.scale, units=int(units))


def _terminal_caps(problem, inside_is_source):
    """
    Free-free arcs and the terminal capacities of the free nodes.

    Edges to pinned cells are folded into terminal arcs of their free
    endpoint, so the graph holds the free cells only.
    """
    m = problem.n_free
    tails, heads, units = problem.tails, problem.heads, problem.units.astype(float)
    inner = (tails < m) & (heads < m)
    boundary = ~inner
    f = np.where(tails[boundary] < m, tails[boundary], heads[boundary])
    p = np.where(tails[boundary] < m, heads[boundary], tails[boundary])
    inside = np.zeros(len(problem.nodes), dtype=bool)
    inside[m:] = problem.pinned_inside()
    to_inside = inside[p]
    in_cap = np.zeros(m)
    out_cap = np.zeros(m)
    np.add.at(in_cap, f[to_inside], units[boundary][to_inside])
    np.add.at(out_cap, f[~to_inside], units[boundary][~to_inside])
    if inside_is_source:
        return tails[inner], heads[inner], units[inner], in_cap, out_cap
    return tails[inner], heads[inner], units[inner], out_cap, in_cap


def _sink_segment(problem, inside_is_source):
    """
    One max-flow run; returns (flow, free nodes in the sink segment).

    Nodes that neither search tree reaches are reported on the source side.
    """
    m = problem.n_free
    tails, heads, caps, source_caps, sink_caps = _terminal_caps(problem, inside_is_source)
    g = maxflow.Graph[float](m, len(caps))
    # a fresh graph numbers its nodes from zero
    g.add_nodes(m)
    for a, b, c in zip(tails.tolist(), heads.tolist(), caps.tolist()):
        g.add_edge(a, b, c, c)
    for k in np.flatnonzero((source_caps > 0) | (sink_caps > 0)).tolist():
        g.add_tedge(k, float(source_caps[k]), float(sink_caps[k]))
    flow = g.maxflow()
    return flow, np.asarray(g.get_grid_segments(np.arange(m)), dtype=bool)


def solve_problem(problem):
    """
    Minimal and maximal minimum cuts of a :class:`CutProblem` by max-flow.

    With the inside tied to the source, the cells left on the source side
    form the maximal set: only cells that still reach the sink in the
    residual graph are cut away. Swapping the terminals gives the minimal
    set as the sink side of the second run.
    """
    m = problem.n_free
    if m == 0:
        bits = np.zeros(0, dtype=bool)
        units = problem.value_units(problem.compose(bits))
        return _pair_from_bits(problem, bits, bits, units)

    flow_max, sink_side = _sink_segment(problem, inside_is_source=True)
    flow_min, min_bits = _sink_segment(problem, inside_is_source=False)
    max_bits = ~sink_side
    units = int(round(flow_max))
    if int(round(flow_min)) != units:
        raise LeastGradError('flow values {} and {} disagree'.format(flow_max, flow_min))
    pair = _pair_from_bits(problem, min_bits, max_bits, units)
    for E in (pair.E_min, pair.E_max):
        if problem.value_units(E) != pair.units:
            raise LeastGradError('cut value {} disagrees with flow value {}'
                                 .format(problem.value_units(E), pair.units))
    return pair


def solve_star(dom, w, st, L_t):
    """
    Minimize the weighted perimeter over sets agreeing with ``L_t`` outside
    the interior.

    Args:
        dom: DiscreteDomain
        w: WeightField
        st: CutStencil
        L_t: IndicatorSet; only its collar cells are used

    Returns:
        MinimizerPair: ``E_max`` is the inclusion-maximal minimizer
    """
    pinned = np.asarray(L_t.values, dtype=bool) & dom.collar
    problem = build_cut_problem(dom, w, st, dom.interior, pinned)
    pair = solve_problem(problem)
    logger.debug('cut solved: %d free cells, value %.10g, |E_max|=%d',
                 problem.n_free, pair.value, pair.E_max.count())
    return pair


def enumerate_optima(problem):
    """
    All optimal free-cell assignments of a tiny problem.

    Returns:
        tuple: (optimal integer value, sorted int64 array of bit codes, bit
        ``k`` of a code being the membership of free cell ``k``)

    Raises:
        TooLarge: if the problem has more than ``MAX_EXHAUSTIVE`` free cells
    """
    m = problem.n_free
    if m > MAX_EXHAUSTIVE:
        raise TooLarge('{} free cells exceed the exhaustive limit of {}'.format(m, MAX_EXHAUSTIVE))
    fixed = problem.pinned_inside()
    shifts = np.arange(m, dtype=np.int64)
    best, found = None, []
    for start in range(0, 1 << m, _CHUNK):
        codes = np.arange(start, min(1 << m, start + _CHUNK), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(bool)
        X = np.concatenate([bits, np.broadcast_to(fixed, (codes.size, fixed.size))], axis=1)
        cut = X[:, problem.tails] != X[:, problem.heads]
        values = cut.astype(np.int64) @ problem.units
        low = int(values.min())
        if best is None or low < best:
            best, found = low, [codes[values == low]]
        elif low == best:
            found.append(codes[values == low])
    return best, np.sort(np.concatenate(found))


def lattice_closed(codes):
    """True when unions and intersections of optimal codes are optimal again."""
    pool = set(int(c) for c in codes)
    items = sorted(pool)
    return all((a | b) in pool and (a & b) in pool
               for i, a in enumerate(items) for b in items[i + 1:])


def _bits(code, m):
    return ((int(code) >> np.arange(m)) & 1).astype(bool)


def exhaustive_solve(problem):
    """Brute-force counterpart of :func:`solve_problem`."""
    best, codes = enumerate_optima(problem)
    m = problem.n_free
    popcount = np.array([bin(int(c)).count('1') for c in codes])
    low = int(codes[np.argmin(popcount)])
    high = int(codes[np.argmax(popcount)])
    if low != int(np.bitwise_and.reduce(codes)) or high != int(np.bitwise_or.reduce(codes)):
        raise LeastGradError('optimal sets are not nested around the extreme solutions')
    return _pair_from_bits(problem, _bits(low, m), _bits(high, m), best)


def exhaustive_min(dom, w, st, L_t):
    """
    Enumerate every set with the exterior of ``L_t``; at most
    ``MAX_EXHAUSTIVE`` interior cells.
    """
    pinned = np.asarray(L_t.values, dtype=bool) & dom.collar
    problem = build_cut_problem(dom, w, st, dom.interior, pinned)
    return exhaustive_solve(problem)


def local_minimality_check(E, U, w, st, radius=3):
    """
    Check that no change of ``E`` inside a small block lowers its perimeter.

    Blocks are ``radius`` cells wide along every axis and must lie in ``U``
    together with their stencil halo. Blocks of at most ``MAX_EXHAUSTIVE``
    cells are solved by enumeration, larger ones by min-cut with the rest of
    the grid pinned to ``E``. Blocks on which ``E`` is constant (halo
    included) cannot improve and are skipped.

    Args:
        E: IndicatorSet
        U: Boolean mask or IndicatorSet inside the interior
        w: WeightField
        st: CutStencil
        radius: Block width in cells

    Returns:
        dict: passed, checked, skipped and the failing blocks with their
        current and improved values
    """
    dom = E.domain
    U = U.values if isinstance(U, IndicatorSet) else np.asarray(U, dtype=bool)
    if np.any(U & ~dom.interior):
        raise ValueError('the test region must lie inside the interior')
    rho = st.radius
    r = int(radius)
    n = dom.ndim
    axes = tuple(range(n, 2 * n))

    inner = U & ~dilate(~U, full=True, iterations=rho)
    fits = sliding_window_view(inner, (r,) * n).all(axis=axes)
    win = r + 2 * rho
    some = sliding_window_view(E.values, (win,) * n).any(axis=axes)
    every = sliding_window_view(E.values, (win,) * n).all(axis=axes)

    checked, skipped, failures = 0, 0, []
    for corner in map(tuple, np.argwhere(fits)):
        halo_corner = tuple(c - rho for c in corner)
        if min(halo_corner) < 0 or every[halo_corner] or not some[halo_corner]:
            skipped += 1
            continue
        block = np.zeros(dom.shape, dtype=bool)
        block[tuple(slice(c, c + r) for c in corner)] = True
        problem = build_cut_problem(dom, w, st, block, E.values,
                                    window=(halo_corner, tuple(c + r + rho for c in corner)))
        current = problem.value_units(E)
        if problem.n_free <= MAX_EXHAUSTIVE:
            best, _ = enumerate_optima(problem)
        else:
            best = solve_problem(problem).units
        checked += 1
        if best < current:
            failures.append({'corner': [int(c) for c in corner],
                             'current': current / problem.scale,
                             'improved': best / problem.scale})
    passed = not failures
    logger.info('local minimality: %d blocks checked, %d skipped, %d failing',
                checked, skipped, len(failures))
    return {'passed': passed, 'checked': checked, 'skipped': skipped,
            'failures': failures[:20], 'radius': r}


def barrier_margin(dom, eps):
    """Default shell next to the sphere left out of the verdict."""
    return min(BARRIER_SHELL_CELLS * dom.h, 0.5 * eps)


def barrier_check(dom, w, st, x0, eps, margin=None, select='minimal'):
    """
    Evaluate the barrier condition at a boundary cell.

    Cells of the interior outside the ball of radius ``eps`` around ``x0``
    are pinned inside, the exterior is pinned outside, and the constrained
    minimizer ``V_*`` is computed. The check passes when no boundary-layer
    cell of ``V_*`` (every such cell faces the exterior) lies within
    ``eps - margin`` of ``x0``.

    The cut metric is crystalline: along boundary stretches whose tangents
    share one facet of its unit ball, the boundary arc and the chord have
    equal length. The smallest minimizer then takes the chord while the
    largest keeps the arc, so ``select='minimal'`` asks whether some
    minimizer leaves the boundary and ``select='maximal'`` whether all do.

    Args:
        dom: DiscreteDomain
        w: WeightField
        st: CutStencil
        x0: Flat index of a boundary cell
        eps: Ball radius (> 2h)
        margin: Shell next to the sphere where the cut rejoins the
            boundary; defaults to :func:`barrier_margin`
        select: 'minimal' or 'maximal' minimizer

    Returns:
        tuple: (verdict dict, V_star IndicatorSet)

    Raises:
        BallTooSmall, BallCoversDomain
    """
    x0 = int(x0)
    if not dom.boundary.ravel()[x0]:
        raise ValueError('cell {} is not a boundary cell'.format(x0))
    if select not in ('minimal', 'maximal'):
        raise ValueError('select must be "minimal" or "maximal", got {!r}'.format(select))
    if eps <= 2 * dom.h:
        raise BallTooSmall('eps={} must exceed 2h={}'.format(eps, 2 * dom.h))
    margin = barrier_margin(dom, eps) if margin is None else float(margin)
    if not 0.0 <= margin < eps:
        raise ValueError('margin must lie in [0, eps), got {}'.format(margin))

    ball = dom.ball(x0, eps)
    free = ball & dom.interior
    outside = dom.interior & ~ball
    if not outside.any():
        raise BallCoversDomain('ball of radius {} around cell {} covers the interior'.format(eps, x0))

    idx = np.argwhere(free)
    window = (idx.min(axis=0) - st.radius, idx.max(axis=0) + 1 + st.radius)
    problem = build_cut_problem(dom, w, st, free, outside, window=window)
    pair = solve_problem(problem)

    core = dom.ball(x0, eps - margin) & dom.boundary

    def contacts(V):
        return np.flatnonzero((V.values & core).ravel())

    V_star = pair.E_min if select == 'minimal' else pair.E_max
    witnesses = contacts(V_star)
    verdict = {'passed': witnesses.size == 0, 'x0': x0, 'eps': float(eps),
               'margin': margin, 'select': select,
               'witness_cells': witnesses[:20].tolist(),
               'removed_cells': int(free.sum() - (V_star.values & free).sum()),
               'contacts_minimal': int(contacts(pair.E_min).size),
               'contacts_maximal': int(contacts(pair.E_max).size)}
    logger.debug('barrier at cell %d, eps=%g: %s (%d/%d contacts)', x0, eps,
                 'pass' if verdict['passed'] else 'fail',
                 verdict['contacts_minimal'], verdict['contacts_maximal'])
    return verdict, V_star
