"""
Boundary data g on the boundary layer, its nearest-point extension G to the
collar, and the exterior superlevel sets {G >= t}.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..fields import IndicatorSet
from ..utils.grid_utils import face_offsets, pair_slices, shifted

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """
    Boundary values and their exterior extension.

    ``g`` is NaN off the boundary layer, ``G`` is NaN off the collar and
    ``nearest`` maps every collar cell to the flat index of the boundary cell
    it copies (-1 elsewhere). ``lower``/``upper`` are min g and max g.
    """
    domain: object
    g: np.ndarray
    G: np.ndarray
    nearest: np.ndarray
    lower: float
    upper: float

    @property
    def is_constant(self):
        return self.lower == self.upper

    def values(self):
        """g on the boundary layer merged with G on the collar."""
        return np.where(self.domain.collar, self.G, self.g)


def _sample_boundary(dom, g):
    out = np.full(dom.shape, np.nan)
    mask = dom.boundary
    if callable(g):
        out[mask] = np.asarray(g(dom.centers()[mask]), dtype=float)
    elif isinstance(g, dict):
        flat = out.reshape(-1)
        for index, value in g.items():
            flat[int(index)] = float(value)
        out[~mask] = np.nan
    elif np.isscalar(g):
        out[mask] = float(g)
    else:
        arr = np.asarray(g, dtype=float)
        out[mask] = arr[mask]
    if not np.all(np.isfinite(out[mask])):
        missing = np.flatnonzero(mask.ravel() & ~np.isfinite(out.ravel()))
        raise ValueError('boundary data missing or non-finite at cells {}'
                         .format(missing[:10].tolist()))
    return out


def nearest_boundary_index(dom, targets):
    """
    Flat index of the nearest boundary cell for each target cell.

    Distances are compared exactly in squared cell units; ties go to the
    lowest flat index.

    Args:
        dom: DiscreteDomain
        targets: Boolean mask of the cells to assign

    Returns:
        numpy.ndarray: Array over the box, -1 outside ``targets``
    """
    b_index = np.flatnonzero(dom.boundary.ravel())
    b_points = np.argwhere(dom.boundary)
    t_index = np.flatnonzero(np.asarray(targets).ravel())
    t_points = np.argwhere(targets)
    result = np.full(dom.size, -1, dtype=np.int64)
    if t_index.size == 0:
        return result.reshape(dom.shape)

    tree = cKDTree(b_points)
    pending = np.arange(t_index.size)
    k = min(16, b_index.size)
    while pending.size:
        _, nn = tree.query(t_points[pending], k=k)
        nn = np.asarray(nn).reshape(pending.size, -1)
        diff = b_points[nn] - t_points[pending][:, None, :]
        d2 = np.sum(diff * diff, axis=-1)
        best = d2.min(axis=1)
        tied = d2 == best[:, None]
        choice = np.where(tied, b_index[nn], np.iinfo(np.int64).max).min(axis=1)
        # a tie may continue past the k-th neighbour
        unsure = tied.all(axis=1) & (k < b_index.size)
        result[t_index[pending[~unsure]]] = choice[~unsure]
        pending = pending[unsure]
        k = min(2 * k, b_index.size)
    return result.reshape(dom.shape)


def extend_boundary_data(dom, g):
    """
    Build :class:`BoundaryData` from values on the boundary layer.

    Args:
        dom: DiscreteDomain
        g: Callable of cell centers, dict {flat cell index: value}, scalar, or
            array over the box (read on boundary cells)

    Returns:
        BoundaryData
    """
    g_arr = _sample_boundary(dom, g)
    nearest = nearest_boundary_index(dom, dom.collar)
    G = np.full(dom.shape, np.nan)
    collar = dom.collar
    G[collar] = g_arr.ravel()[nearest[collar]]

    for arr in (g_arr, G, nearest):
        arr.setflags(write=False)
    lower = float(np.nanmin(g_arr))
    upper = float(np.nanmax(g_arr))
    logger.debug('boundary data range [%g, %g]', lower, upper)
    return BoundaryData(domain=dom, g=g_arr, G=G, nearest=nearest, lower=lower, upper=upper)


def nearest_extension(bd, cells):
    """Nearest-boundary values of g on an arbitrary set of cells."""
    idx = nearest_boundary_index(bd.domain, cells)
    out = np.full(bd.domain.shape, np.nan)
    out[cells] = bd.g.ravel()[idx[cells]]
    return out


def superlevel_exterior(bd, t):
    """
    Exterior superlevel set {collar cells : G >= t}.

    Args:
        bd: BoundaryData
        t: Finite level

    Returns:
        IndicatorSet: supported on the collar
    """
    if not np.isfinite(t):
        raise ValueError('level must be finite, got {}'.format(t))
    dom = bd.domain
    with np.errstate(invalid='ignore'):
        members = dom.collar & (bd.G >= t)
    return IndicatorSet(dom, members)


def extension_mismatch(bd):
    """
    Largest |G(c) - g(b)| over collar cells c face-adjacent to a boundary
    cell b.
    """
    dom = bd.domain
    worst = 0.0
    for off in face_offsets(dom.ndim):
        nbr_is_boundary = shifted(dom.boundary, off, False)
        nbr_g = shifted(bd.g, off, np.nan)
        sel = dom.collar & nbr_is_boundary
        if sel.any():
            worst = max(worst, float(np.max(np.abs(bd.G[sel] - nbr_g[sel]))))
    return worst


def modulus_of_continuity(bd, radius):
    """
    Largest |g(p) - g(q)| over boundary cells whose centers are closer than
    ``radius``.
    """
    dom = bd.domain
    points = dom.centers()[dom.boundary]
    values = bd.g[dom.boundary]
    tree = cKDTree(points)
    worst = 0.0
    for i, j in tree.query_pairs(radius):
        worst = max(worst, abs(values[i] - values[j]))
    return worst


def collar_variation(bd):
    """Discrete variation of G over face pairs inside the collar (times h**(n-1))."""
    dom = bd.domain
    total = 0.0
    for axis in range(dom.ndim):
        off = tuple(1 if k == axis else 0 for k in range(dom.ndim))
        src, dst = pair_slices(dom.shape, off)
        both = dom.collar[src] & dom.collar[dst]
        total += float(np.abs(bd.G[src][both] - bd.G[dst][both]).sum())
    return total * dom.h ** (dom.ndim - 1)
