"""
Structural checks on a built level-set family and on assembled fields.

Every checker is pure and returns a plain report dict with at least
``passed`` and ``value``; failing reports carry a ``witness`` naming the
offending level indices and flat cell indices.
"""

import logging

import numpy as np
from scipy import ndimage

from ..fields import ScalarField
from ..geometry.perimeter import alpha_perimeter, alpha_total_variation
from ..utils.grid_utils import (contact_cells, dilate, face_offsets, inner_boundary,
                                label_components, pair_slices, shifted)
from .family import assemble_solution

logger = logging.getLogger(__name__)

PLATEAU_RUN = 3


def _first_cells(mask, limit=10):
    return np.flatnonzero(np.asarray(mask).ravel())[:limit].tolist()


def check_boundary_values(fam, bd, tol):
    """
    Largest |g - t| over boundary-layer cells on the discrete boundary of
    each chosen set.

    A boundary-layer cell is on the discrete boundary of E when some face
    neighbor (collar included) has the other membership.
    """
    dom = fam.domain
    per_level = []
    worst, witness = 0.0, None
    for k, (t, E) in enumerate(zip(fam.levels, fam.sets)):
        touched = contact_cells(E.values, dom.boundary)
        if not touched.any():
            per_level.append(0.0)
            continue
        dev = np.abs(bd.g[touched] - t)
        value = float(dev.max())
        per_level.append(value)
        if value > worst:
            cell = int(np.flatnonzero(touched.ravel())[int(np.argmax(dev))])
            worst, witness = value, {'level': k, 'cell': cell}
    passed = worst <= tol
    report = {'passed': bool(passed), 'value': worst, 'tolerance': float(tol),
              'per_level': per_level}
    if not passed:
        report['witness'] = witness
    return report


def plateau_values(bd, run=PLATEAU_RUN):
    """
    Values taken by g on at least ``run`` vertex-connected boundary cells.
    """
    dom = bd.domain
    found = set()
    values = bd.g[dom.boundary]
    for v in np.unique(values):
        labels, n = label_components(dom.boundary & (bd.g == v), full=True)
        if n and np.max(np.bincount(labels.ravel())[1:]) >= run:
            found.add(float(v))
    return sorted(found)


def check_separation(fam, plateaus=None):
    """
    Inner boundaries of the chosen sets must be pairwise disjoint inside the
    interior, except for pairs whose closed level range holds a plateau value
    of g, and pairs with equal levels or identical sets.

    Returns:
        dict: passed, the smallest distance between boundaries of adjacent
        levels, per-adjacent-pair distances and the exempted pairs
    """
    dom = fam.domain
    if plateaus is None:
        plateaus = plateau_values(fam.boundary)
    boundaries = [inner_boundary(E.values, dom.interior) for E in fam.sets]
    levels = fam.levels

    def exempt(i, j):
        s, t = levels[i], levels[j]
        if s == t or np.array_equal(fam.sets[i].values, fam.sets[j].values):
            return True
        return any(s <= v <= t for v in plateaus)

    exempted, shared = [], None
    for i in range(len(levels)):
        for j in range(i + 1, len(levels)):
            if exempt(i, j):
                exempted.append([i, j])
                continue
            common = boundaries[i] & boundaries[j]
            if shared is None and common.any():
                shared = {'levels': [i, j], 'cells': _first_cells(common)}

    adjacent = []
    for k in range(len(levels) - 1):
        a, b = boundaries[k], boundaries[k + 1]
        if not a.any() or not b.any():
            adjacent.append(None)
            continue
        dist = ndimage.distance_transform_edt(~a) * dom.h
        adjacent.append(float(dist[b].min()))
    observed = [d for d in adjacent if d is not None]
    report = {'passed': shared is None,
              'value': min(observed) if observed else None,
              'adjacent_distances': adjacent,
              'exempted_pairs': exempted,
              'plateaus': plateaus}
    if shared is not None:
        report['witness'] = shared
    return report


def check_component_reaches_boundary(E, dom):
    """
    Every vertex-connected component of the inner boundary of ``E`` must
    contain or touch a boundary-layer cell.

    The inner boundary of a slanted interface is a staircase whose cells
    meet at corners only, so components are taken with vertex adjacency.
    """
    ib = inner_boundary(E.values, dom.interior)
    labels, n = label_components(ib, full=True)
    near = dilate(dom.boundary, full=True)
    failing = []
    for label in range(1, n + 1):
        comp = labels == label
        if not np.any(comp & near):
            failing.append({'size': int(comp.sum()), 'cells': _first_cells(comp, 5)})
    report = {'passed': not failing, 'value': n, 'components': n, 'failing': len(failing)}
    if failing:
        report['witness'] = failing
    return report


def check_family_components(fam):
    """:func:`check_component_reaches_boundary` over every level."""
    bad = []
    total = 0
    for k, E in enumerate(fam.sets):
        rep = check_component_reaches_boundary(E, fam.domain)
        total += rep['components']
        if not rep['passed']:
            bad.append({'level': k, 'components': rep['witness']})
    report = {'passed': not bad, 'value': total}
    if bad:
        report['witness'] = bad[:5]
    return report


def check_trace_containment(fam, bd, tol):
    """
    Two-sided trace containment at every level:
    {g > t + tol} inside A_t on the boundary layer, and A_t there inside
    {g >= t - tol}.
    """
    dom = fam.domain
    witness = None
    worst = 0.0
    for k, t in enumerate(fam.levels):
        inside = fam.closure_part(k) & dom.boundary
        missing = dom.boundary & (bd.g > t + tol) & ~inside
        extra = inside & (bd.g < t - tol)
        for kind, cells in (('missing', missing), ('extra', extra)):
            if cells.any():
                excess = float(np.max(np.abs(bd.g[cells] - t)))
                if witness is None:
                    witness = {'level': k, 'kind': kind, 'cells': _first_cells(cells)}
                worst = max(worst, excess)
    report = {'passed': witness is None, 'value': worst, 'tolerance': float(tol)}
    if witness is not None:
        report['witness'] = witness
    return report


def extend_by_boundary(v, bd):
    """Competitor values inside the interior, G on the collar."""
    dom = bd.domain
    return ScalarField(dom, np.where(dom.interior, v.values, bd.G))


def check_competitor_inequality(fam, v, dom, w, st, rel_tol=1e-9):
    """
    Compare every chosen set with the same superlevel set of a competitor.

    The competitor is first extended by G, so its superlevel sets meet the
    same exterior constraints. Per level the chosen set must not have larger
    perimeter over the closure of the interior. The integrated variations
    of the assembled field and of the competitor are reported alongside.
    """
    v_bar = extend_by_boundary(v, fam.boundary)
    witness = None
    margins = []
    for k, (t, E) in enumerate(zip(fam.levels, fam.sets)):
        ours = alpha_perimeter(E, dom.interior, w, st, closure=True)
        theirs = alpha_perimeter(v_bar.superlevel(t), dom.interior, w, st, closure=True)
        margins.append(theirs - ours)
        if ours > theirs + rel_tol * max(1.0, theirs) and witness is None:
            witness = {'level': k, 'chosen': ours, 'competitor': theirs}
    u = assemble_solution(fam)
    report = {'passed': witness is None,
              'value': float(min(margins)),
              'tv_assembled': alpha_total_variation(u, dom.interior, w, st, closure=True),
              'tv_competitor': alpha_total_variation(v_bar, dom.interior, w, st, closure=True)}
    if witness is not None:
        report['witness'] = witness
    return report


def _gradient_norm(exact, points, step=1e-6):
    grad = np.zeros(points.shape)
    for axis in range(points.shape[-1]):
        e = np.zeros(points.shape[-1])
        e[axis] = step
        grad[..., axis] = (exact(points + e) - exact(points - e)) / (2 * step)
    return np.sqrt(np.sum(grad ** 2, axis=-1))


def interface_deviation(fam, exact):
    """
    Two-sided distance between each chosen boundary and the exact level set.

    From the chosen side it is ``|f - t| / |grad f|`` at inner boundary
    cells; from the exact side it is the distance from cells where ``f``
    crosses ``t`` between face neighbors to the nearest inner boundary cell.

    Args:
        fam: LevelSetFamily
        exact: Vectorized callable of points (coordinates on the last axis)

    Returns:
        dict: value (largest deviation over levels), per_level, worst level
    """
    dom = fam.domain
    centers = dom.centers()
    f = np.asarray(exact(centers), dtype=float)
    grad = _gradient_norm(exact, centers)
    per_level = []
    for k, (t, E) in enumerate(zip(fam.levels, fam.sets)):
        ib = inner_boundary(E.values, dom.interior)
        crossing = np.zeros(dom.shape, dtype=bool)
        above = dom.interior & (f >= t)
        for off in face_offsets(dom.ndim):
            nbr_in = shifted(dom.interior, off, False)
            nbr_f = shifted(f, off, np.nan)
            with np.errstate(invalid='ignore'):
                crossing |= above & nbr_in & (nbr_f < t)
        if not ib.any() and not crossing.any():
            per_level.append(0.0)
            continue
        if not ib.any() or not crossing.any():
            per_level.append(float('inf'))
            continue
        near = float(np.max(np.abs(f[ib] - t) / np.maximum(grad[ib], 1e-300)))
        dist = ndimage.distance_transform_edt(~ib) * dom.h
        far = float(dist[crossing].max())
        per_level.append(max(near, far))
    worst = int(np.argmax(per_level)) if per_level else 0
    return {'value': float(max(per_level)) if per_level else 0.0,
            'per_level': per_level, 'level': worst}


def continuity_modulus(u, dom):
    """Largest |u(p) - u(q)| over face-adjacent pairs of interior cells."""
    worst = 0.0
    for axis in range(dom.ndim):
        off = tuple(1 if k == axis else 0 for k in range(dom.ndim))
        src, dst = pair_slices(dom.shape, off)
        both = dom.interior[src] & dom.interior[dst]
        if both.any():
            worst = max(worst, float(np.max(np.abs(u.values[src] - u.values[dst])[both])))
    return worst


def superlevel_recovery(fam, u):
    """
    Compare {u >= t_k} with the chosen sets on the interior, level by level.
    """
    dom = fam.domain
    witness = None
    mismatched = 0
    for k, t in enumerate(fam.levels):
        diff = ((u.values >= t) & dom.interior) ^ fam.closure_part(k)
        count = int(diff.sum())
        mismatched += count
        if count and witness is None:
            witness = {'level': k, 'cells': _first_cells(diff)}
    report = {'passed': mismatched == 0, 'value': mismatched}
    if witness is not None:
        report['witness'] = witness
    return report


def boundary_trace_error(u, bd):
    """Largest |u - g| over boundary-layer cells, with the cell where it occurs."""
    dom = bd.domain
    err = np.where(dom.boundary, np.abs(u.values - np.nan_to_num(bd.g)), 0.0)
    cell = int(np.argmax(err))
    return float(err.ravel()[cell]), cell


def check_nestedness(fam):
    """Report form of the nesting invariant."""
    for k in range(len(fam.sets) - 1):
        extra = fam.sets[k + 1].values & ~fam.sets[k].values
        if extra.any():
            return {'passed': False, 'value': int(extra.sum()),
                    'witness': {'levels': [k, k + 1], 'cells': _first_cells(extra)}}
    return {'passed': True, 'value': 0}
