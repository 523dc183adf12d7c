"""
The weighted cut metric shared by the perimeter, the total variation and the
min-cut solver, together with the layer-cake and submodularity checks built
on it.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DomainMismatch
from ..fields import IndicatorSet, require_same_domain
from ..utils.grid_utils import pair_slices
from .stencil import make_stencil


@dataclass(frozen=True, eq=False)
class EdgeFamily:
    """All edges (p, p + offset) of one stencil direction with their capacities."""
    offset: tuple
    src: tuple
    dst: tuple
    capacity: np.ndarray


def stencil_for(dom, neighborhood=None):
    """Cut stencil matching the spacing of ``dom``."""
    return make_stencil(dom.ndim, neighborhood, dom.h)


@lru_cache(maxsize=16)
def cut_edges(dom, w, st):
    """
    Edge families of the cut metric: capacity ``a_f * crofton_weight`` for
    every pair of box cells joined by a stencil offset.

    Args:
        dom: DiscreteDomain
        w: WeightField sampled on ``dom``
        st: CutStencil with the spacing of ``dom``

    Returns:
        tuple: EdgeFamily per undirected offset
    """
    if st.ndim != dom.ndim or not np.isclose(st.h, dom.h, rtol=1e-12, atol=0):
        raise DomainMismatch('stencil (n={}, h={}) does not fit grid (n={}, h={})'
                             .format(st.ndim, st.h, dom.ndim, dom.h))
    if w.cell.shape != dom.shape:
        raise DomainMismatch('weight samples do not cover the grid')
    families = []
    for off, weight in zip(st.offsets, st.weights):
        src, dst = pair_slices(dom.shape, off)
        cap = w.edge_values(dom, off).reshape(dom.interior[src].shape) * weight
        cap.setflags(write=False)
        families.append(EdgeFamily(offset=off, src=src, dst=dst, capacity=cap))
    return tuple(families)


def _region_mask(dom, region):
    if region is None:
        return None
    values = region.values if isinstance(region, IndicatorSet) else np.asarray(region, dtype=bool)
    if values.shape != dom.shape:
        raise DomainMismatch('region shape {} does not match grid {}'.format(values.shape, dom.shape))
    return values


def _edge_factor(mask, fam, closure):
    """Share of each edge counted inside the region."""
    if mask is None:
        return 1.0
    a, b = mask[fam.src], mask[fam.dst]
    if closure:
        return (a | b).astype(float)
    return 0.5 * (a.astype(float) + b.astype(float))


def alpha_perimeter(E, region, w, st, closure=False):
    """
    Weighted perimeter of a discrete set inside a region.

    Every stencil edge cut by ``E`` contributes its capacity. By default an
    edge counts in proportion to how many of its two endpoints lie in
    ``region``; with ``closure=True`` an edge counts fully as soon as one
    endpoint does, which measures the perimeter in the closure of the region.

    Args:
        E: IndicatorSet
        region: IndicatorSet, boolean mask, or None for the whole box
        w: WeightField
        st: CutStencil

    Returns:
        float
    """
    dom = E.domain
    mask = _region_mask(dom, region)
    total = 0.0
    for fam in cut_edges(dom, w, st):
        cut = E.values[fam.src] != E.values[fam.dst]
        contrib = fam.capacity * cut * _edge_factor(mask, fam, closure)
        total += float(np.sum(contrib))
    return total


def edge_variation_terms(u, region, w, st, closure=False):
    """Per-family arrays of ``capacity * share * |u_p - u_q|``."""
    dom = u.domain
    mask = _region_mask(dom, region)
    terms = []
    for fam in cut_edges(dom, w, st):
        factor = np.broadcast_to(_edge_factor(mask, fam, closure), fam.capacity.shape)
        counted = factor > 0
        jump = np.zeros(fam.capacity.shape)
        diff = u.values[fam.src][counted] - u.values[fam.dst][counted]
        if not np.all(np.isfinite(diff)):
            raise ValueError('field is not finite on the region and its stencil halo')
        jump[counted] = np.abs(diff)
        terms.append(fam.capacity * factor * jump)
    return terms


def alpha_total_variation(u, region, w, st, closure=False):
    """
    Weighted total variation of a grid field in the cut metric.

    Equals :func:`alpha_perimeter` when ``u`` is an indicator and is
    positively one-homogeneous in ``u``.

    Args:
        u: ScalarField
        region: IndicatorSet, boolean mask, or None for the whole box
        w: WeightField
        st: CutStencil

    Returns:
        float
    """
    return float(sum(np.sum(t) for t in edge_variation_terms(u, region, w, st, closure)))


def _halo_values(u, region, w, st, closure):
    """Values of ``u`` at the endpoints of every counted edge."""
    dom = u.domain
    mask = _region_mask(dom, region)
    used = np.zeros(dom.shape, dtype=bool)
    for fam in cut_edges(dom, w, st):
        factor = np.broadcast_to(_edge_factor(mask, fam, closure), fam.capacity.shape)
        counted = factor > 0
        used[fam.src] |= counted
        used[fam.dst] |= counted
    return u.values[used]


def coarea_quadrature(u, region, w, st, closure=False):
    """
    Compare the total variation with the exact layer-cake sum of the
    perimeters of the superlevel sets of ``u``.

    The thresholds are the midpoints between consecutive distinct values of
    ``u`` on the counted edges, each weighted by the gap it spans.

    Returns:
        tuple: (tv_value, coarea_value, levels_used)
    """
    tv_value = alpha_total_variation(u, region, w, st, closure)
    values = np.unique(_halo_values(u, region, w, st, closure))
    coarea_value = 0.0
    for lo, hi in zip(values[:-1], values[1:]):
        t = 0.5 * (lo + hi)
        coarea_value += (hi - lo) * alpha_perimeter(u.superlevel(t), region, w, st, closure)
    return tv_value, float(coarea_value), max(len(values) - 1, 0)


def submodularity_defect(E1, E2, region, w, st):
    """
    P(E1) + P(E2) - P(E1 | E2) - P(E1 & E2); never negative beyond rounding.
    """
    require_same_domain(E1, E2)
    return (alpha_perimeter(E1, region, w, st) + alpha_perimeter(E2, region, w, st)
            - alpha_perimeter(E1 | E2, region, w, st) - alpha_perimeter(E1 & E2, region, w, st))
