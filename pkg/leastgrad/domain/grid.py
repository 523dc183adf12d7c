"""
The discrete domain: a regular grid carrying the interior mask, its
boundary layer and the exterior collar.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DisconnectedBoundary, DisconnectedInterior, EmptyInterior
from ..utils.grid_utils import face_boundary, label_components

logger = logging.getLogger(__name__)


def _frozen(arr, dtype=bool):
    arr = np.ascontiguousarray(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteDomain:
    """
    Regular grid of spacing ``h`` over a bounding box.

    The box holds the interior cells and a collar of at least
    ``collar_width`` cells on every side; every box cell outside the
    interior belongs to the collar. Cells are ordered in C order of the
    box array.
    """
    h: float
    origin: tuple
    collar_width: int
    interior: np.ndarray
    boundary: np.ndarray

    @property
    def ndim(self):
        return self.interior.ndim

    @property
    def shape(self):
        return self.interior.shape

    @property
    def size(self):
        return self.interior.size

    @property
    def collar(self):
        return ~self.interior

    @property
    def fingerprint(self):
        return (self.shape, float(self.h), tuple(float(o) for o in self.origin))

    def same_as(self, other):
        return self is other or self.fingerprint == other.fingerprint

    def centers(self):
        """Cell centers as an array of shape ``shape + (ndim,)``."""
        axes = [self.origin[k] + (np.arange(n) + 0.5) * self.h
                for k, n in enumerate(self.shape)]
        grids = np.meshgrid(*axes, indexing='ij')
        return np.stack(grids, axis=-1)

    def center_of(self, index):
        """Center of the cell with flat index ``index``."""
        multi = np.unravel_index(index, self.shape)
        return np.array([self.origin[k] + (multi[k] + 0.5) * self.h
                         for k in range(self.ndim)])

    def ball(self, index, radius):
        """Cells whose centers lie in the open ball around cell ``index``."""
        d = self.centers() - self.center_of(index)
        return np.einsum('...i,...i->...', d, d) < radius ** 2

    def volume(self):
        """Measure of the interior (cell count times h**n)."""
        return float(self.interior.sum()) * self.h ** self.ndim


def _validate(interior):
    if not interior.any():
        raise EmptyInterior('no cell center lies inside the shape')

    _, n_parts = label_components(interior)
    if n_parts != 1:
        raise DisconnectedInterior(
            'interior has {} face-connected components'.format(n_parts))

    boundary = face_boundary(interior)
    _, n_loops = label_components(boundary, full=True)
    if n_loops != 1:
        raise DisconnectedBoundary(
            'boundary layer has {} connected components'.format(n_loops))
    return boundary


def build_domain(shape_spec, h, collar_width=4):
    """
    Rasterize a shape into a :class:`DiscreteDomain`.

    Args:
        shape_spec: Analytic shape (see :mod:`leastgrad.domain.shapes`) or a
            boolean raster mask with one pixel per cell
        h: Grid spacing
        collar_width: Number of exterior cells padded on every side (>= 3)

    Returns:
        DiscreteDomain

    Raises:
        EmptyInterior, DisconnectedInterior, DisconnectedBoundary
    """
    if h <= 0:
        raise ValueError('grid spacing must be positive, got {}'.format(h))
    if collar_width < 3:
        raise ValueError('collar width must be at least 3, got {}'.format(collar_width))
    W = int(collar_width)

    if isinstance(shape_spec, np.ndarray):
        mask = np.asarray(shape_spec, dtype=bool)
        if mask.ndim not in (2, 3):
            raise ValueError('raster masks must be 2D or 3D')
        interior = np.pad(mask, W, mode='constant', constant_values=False)
        origin = tuple(-W * h for _ in range(mask.ndim))
    else:
        if shape_spec.ndim not in (2, 3):
            raise ValueError('only dimensions 2 and 3 are supported')
        lo, hi = shape_spec.bounds
        counts = np.ceil((np.asarray(hi) - np.asarray(lo)) / h - 1e-9).astype(int)
        shape = tuple(int(c) + 2 * W for c in counts)
        origin = tuple(float(v) for v in np.asarray(lo) - W * h)
        axes = [origin[k] + (np.arange(n) + 0.5) * h for k, n in enumerate(shape)]
        points = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1)
        interior = shape_spec.contains(points)

    boundary = _validate(interior)
    dom = DiscreteDomain(h=float(h), origin=tuple(origin), collar_width=W,
                         interior=_frozen(interior), boundary=_frozen(boundary))
    logger.info('domain %s: %d interior cells, %d boundary cells, h=%g',
                dom.shape, int(interior.sum()), int(boundary.sum()), h)
    return dom
