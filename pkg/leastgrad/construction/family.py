"""
Level-by-level construction: one maximal minimizer per level, stacked into
a nested family and assembled into a grid field.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..domain.boundary import superlevel_exterior
from ..errors import NestednessViolation
from ..fields import ScalarField
from ..geometry.perimeter import alpha_perimeter, cut_edges
from ..solvers.cuts import solve_star

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LevelSetFamily:
    """
    Sorted levels with their minimizer pairs; ``sets[k]`` is the maximal
    minimizer chosen for ``levels[k]``.
    """
    domain: object
    boundary: object
    levels: tuple
    pairs: tuple

    @property
    def sets(self):
        return tuple(p.E_max for p in self.pairs)

    def closure_part(self, k):
        """Cells of the chosen set at level ``k`` inside the interior and its boundary layer."""
        return self.sets[k].values & self.domain.interior

    @property
    def step(self):
        if len(self.levels) < 2:
            return 0.0
        return float(self.levels[1] - self.levels[0])


def level_grid(lower, upper, K):
    """K + 1 uniform levels on [lower, upper]; a single level for constant data."""
    if K < 1:
        raise ValueError('level count K must be at least 1, got {}'.format(K))
    if lower == upper:
        return (float(lower),)
    return tuple(float(lower + k * (upper - lower) / K) for k in range(K + 1))


def first_nesting_violation(sets):
    """Index k of the first pair with sets[k+1] not inside sets[k], or None."""
    for k in range(len(sets) - 1):
        if np.any(sets[k + 1].values & ~sets[k].values):
            return k
    return None


def build_family(dom, w, st, bd, K=64, threads=1):
    """
    Solve the constrained perimeter problem at every level.

    Args:
        dom: DiscreteDomain
        w: WeightField
        st: CutStencil
        bd: BoundaryData
        K: Number of level intervals
        threads: Worker threads for the per-level solves

    Returns:
        LevelSetFamily

    Raises:
        NestednessViolation: if the maximal minimizers are not decreasing
    """
    levels = level_grid(bd.lower, bd.upper, K)
    cut_edges(dom, w, st)

    def solve(t):
        return solve_star(dom, w, st, superlevel_exterior(bd, t))

    if threads > 1 and len(levels) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = tuple(pool.map(solve, levels))
    else:
        pairs = tuple(solve(t) for t in levels)

    for t, pair in zip(levels, pairs):
        constraint = superlevel_exterior(bd, t).values
        if not np.array_equal(pair.E_max.values & dom.collar, constraint):
            raise NestednessViolation('level {} does not match its exterior constraint'.format(t))

    family = LevelSetFamily(domain=dom, boundary=bd, levels=levels, pairs=pairs)
    bad = first_nesting_violation(family.sets)
    if bad is not None:
        raise NestednessViolation('set at level {} is not contained in the set at level {}'
                                  .format(levels[bad + 1], levels[bad]))
    logger.info('built %d nested levels on [%g, %g]', len(levels), levels[0], levels[-1])
    return family


def assemble_solution(fam):
    """
    Field whose value at an interior cell is the largest level whose set
    contains it (the lowest level when none does); the collar carries G.

    Raises:
        NestednessViolation: if the family is not nested
    """
    bad = first_nesting_violation(fam.sets)
    if bad is not None:
        raise NestednessViolation('family is not nested at level index {}'.format(bad))
    dom = fam.domain
    u = np.full(dom.shape, fam.levels[0])
    for k, t in enumerate(fam.levels):
        u[fam.closure_part(k)] = t
    u = np.where(dom.interior, u, fam.boundary.G)
    return ScalarField(dom, u)


def level_table(fam, w, st):
    """Rows (k, t_k, perimeter in the closure of the interior, interior cell count)."""
    rows = []
    for k, (t, E) in enumerate(zip(fam.levels, fam.sets)):
        rows.append((k, t, alpha_perimeter(E, fam.domain.interior, w, st, closure=True),
                     int(fam.closure_part(k).sum())))
    return rows
