"""
Weight field samples a(x) with a certified positive lower bound.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..utils.grid_utils import pair_slices

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WeightField:
    """
    Samples of the weight at cell centers and at axis face midpoints.

    ``faces[k]`` holds the samples on the faces between cells ``p`` and
    ``p + e_k``; its shape is the grid shape with axis ``k`` shortened by one.
    ``func`` is the analytic weight when one was given.
    """
    cell: np.ndarray
    faces: tuple
    alpha: float
    func: Optional[Callable] = None

    def edge_values(self, dom, offset):
        """
        Weight sampled at the midpoints of all pairs (p, p + offset).

        Returns a flat array in the C order of :func:`pair_slices`.
        """
        src, dst = pair_slices(dom.shape, offset)
        if self.func is not None:
            centers = dom.centers()
            mid = 0.5 * (centers[src] + centers[dst])
            return np.asarray(self.func(mid), dtype=float).ravel()
        return (0.5 * (self.cell[src] + self.cell[dst])).ravel()


def build_weight(dom, weight, alpha=None):
    """
    Sample a weight on a domain.

    Args:
        dom: DiscreteDomain
        weight: Callable ``a(points)`` vectorized over the last axis, a scalar,
            or an array of cell samples covering the whole box
        alpha: Claimed lower bound; defaults to the minimum over all samples

    Returns:
        WeightField

    Raises:
        ValueError: if a sample is non-finite or below ``alpha``, or if the
            lower bound is not positive
    """
    func = None
    if callable(weight):
        func = weight
        centers = dom.centers()
        cell = np.array(func(centers), dtype=float)
    elif np.isscalar(weight):
        value = float(weight)
        func = lambda pts: np.full(pts.shape[:-1], value)
        cell = np.full(dom.shape, value)
    else:
        cell = np.array(weight, dtype=float)
        if cell.shape != dom.shape:
            raise ValueError('weight samples have shape {}, domain box is {}'
                             .format(cell.shape, dom.shape))

    faces = []
    for axis in range(dom.ndim):
        off = tuple(1 if k == axis else 0 for k in range(dom.ndim))
        src, _ = pair_slices(dom.shape, off)
        faces.append(WeightField(cell, (), 0.0, func).edge_values(dom, off)
                     .reshape(cell[src].shape))

    samples_min = min(float(cell.min()), *(float(f.min()) for f in faces))
    if not np.all(np.isfinite(cell)) or not all(np.all(np.isfinite(f)) for f in faces):
        raise ValueError('weight samples must be finite')
    if alpha is None:
        alpha = samples_min
    if alpha <= 0:
        raise ValueError('weight lower bound must be positive, got {}'.format(alpha))
    if samples_min < alpha:
        raise ValueError('weight sample {} is below the lower bound {}'
                         .format(samples_min, alpha))

    for arr in [cell] + faces:
        arr.setflags(write=False)
    logger.debug('weight range [%g, %g], alpha=%g', samples_min, float(cell.max()), alpha)
    return WeightField(cell=cell, faces=tuple(faces), alpha=float(alpha), func=func)
