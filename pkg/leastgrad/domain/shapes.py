"""
Analytic shape descriptions used to rasterize the interior mask.

A shape exposes ``ndim``, ``bounds`` (lower and upper corner of a box that
contains it) and ``contains(points)`` for an array of points with the
coordinates on the last axis. Cells are interior when their center lies
strictly inside the shape.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Ball:
    """Open Euclidean ball (disk in 2D)."""
    center: tuple
    radius: float

    @property
    def ndim(self):
        return len(self.center)

    @property
    def bounds(self):
        c = np.asarray(self.center, dtype=float)
        return c - self.radius, c + self.radius

    def contains(self, points):
        d = points - np.asarray(self.center, dtype=float)
        return np.einsum('...i,...i->...', d, d) < self.radius ** 2

    def distance_to_boundary(self, points):
        d = points - np.asarray(self.center, dtype=float)
        return np.abs(self.radius - np.sqrt(np.einsum('...i,...i->...', d, d)))


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box (square or rectangle in 2D, cube in 3D)."""
    lower: tuple
    upper: tuple

    @property
    def ndim(self):
        return len(self.lower)

    @property
    def bounds(self):
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)

    def contains(self, points):
        lo, hi = self.bounds
        return np.all((points > lo) & (points < hi), axis=-1)

    def distance_to_boundary(self, points):
        lo, hi = self.bounds
        return np.min(np.minimum(np.abs(points - lo), np.abs(hi - points)), axis=-1)


@dataclass(frozen=True)
class Union:
    """Union of shapes of equal dimension."""
    parts: tuple

    @property
    def ndim(self):
        return self.parts[0].ndim

    @property
    def bounds(self):
        los, his = zip(*(p.bounds for p in self.parts))
        return np.min(los, axis=0), np.max(his, axis=0)

    def contains(self, points):
        out = np.zeros(points.shape[:-1], dtype=bool)
        for part in self.parts:
            out |= part.contains(points)
        return out
