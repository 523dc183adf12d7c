"""
Cut stencils: neighborhood offsets with Cauchy-Crofton edge weights, so that
counting weighted cut edges approximates Euclidean (n-1)-dimensional area.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

NEIGHBORHOODS = {2: (4, 8, 16), 3: (6, 18, 26)}

# sample count for the solid-angle partition of the sphere
_SPHERE_SAMPLES = 200000


def _canonical(off):
    """Representative of {off, -off} whose first nonzero entry is positive."""
    for v in off:
        if v != 0:
            return tuple(off) if v > 0 else tuple(-x for x in off)
    return tuple(off)


def _offsets(ndim, neighborhood):
    if neighborhood not in NEIGHBORHOODS.get(ndim, ()):
        raise ValueError('unsupported neighborhood {} in dimension {}'.format(neighborhood, ndim))
    if ndim == 2:
        reach = 2 if neighborhood == 16 else 1
        raw = [o for o in product(range(-reach, reach + 1), repeat=2)
               if o != (0, 0) and gcd(abs(o[0]), abs(o[1])) == 1]
        if neighborhood == 4:
            raw = [o for o in raw if sum(map(abs, o)) == 1]
    else:
        raw = [o for o in product((-1, 0, 1), repeat=3) if o != (0, 0, 0)]
        max_nonzero = {6: 1, 18: 2, 26: 3}[neighborhood]
        raw = [o for o in raw if sum(1 for v in o if v) <= max_nonzero]
    return sorted({_canonical(o) for o in raw})


def _angular_share_2d(offsets):
    angles = np.array([np.arctan2(o[1], o[0]) % np.pi for o in offsets])
    order = np.argsort(angles)
    sorted_angles = angles[order]
    gaps = np.diff(np.concatenate([sorted_angles, [sorted_angles[0] + np.pi]]))
    share_sorted = 0.5 * (gaps + np.roll(gaps, 1))
    share = np.empty_like(share_sorted)
    share[order] = share_sorted
    return share


@lru_cache(maxsize=None)
def _solid_angle_share_3d(offsets):
    units = np.array(offsets, dtype=float)
    units /= np.linalg.norm(units, axis=1)[:, None]
    k = np.arange(_SPHERE_SAMPLES) + 0.5
    z = 1.0 - 2.0 * k / _SPHERE_SAMPLES
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * k
    points = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    owner = np.argmax(np.abs(points @ units.T), axis=1)
    counts = np.bincount(owner, minlength=len(offsets))
    # each undirected direction owns two antipodal caps; shares sum to 2*pi
    return 2.0 * np.pi * counts / _SPHERE_SAMPLES


@dataclass(frozen=True)
class CutStencil:
    """
    Undirected neighborhood offsets and their edge weights.

    ``weights[k]`` is in units of length (2D) or area (3D) and already
    includes the grid spacing.
    """
    ndim: int
    neighborhood: int
    h: float
    offsets: tuple
    weights: tuple

    @property
    def radius(self):
        """Largest offset component, i.e. the halo width the stencil needs."""
        return max(max(abs(v) for v in o) for o in self.offsets)

    def directed(self):
        """Both orientations of every offset with their weight."""
        out = []
        for off, wt in zip(self.offsets, self.weights):
            out.append((off, wt))
            out.append((tuple(-v for v in off), wt))
        return out


def make_stencil(ndim, neighborhood=None, h=1.0):
    """
    Build a cut stencil.

    The face neighborhoods (4 in 2D, 6 in 3D) count every face with its
    exact area h**(n-1). Larger neighborhoods use Cauchy-Crofton weights:
    in 2D ``w = dphi * h / (2 |v|)`` with ``dphi`` the angular share of the
    direction, in 3D ``w = dOmega * h**2 / (pi |v|)`` with ``dOmega`` its
    share of the hemisphere.

    Args:
        ndim: 2 or 3
        neighborhood: Neighbor count; defaults to 16 in 2D and 26 in 3D
        h: Grid spacing

    Returns:
        CutStencil
    """
    if neighborhood is None:
        neighborhood = 16 if ndim == 2 else 26
    offsets = _offsets(ndim, neighborhood)
    lengths = np.array([np.linalg.norm(o) for o in offsets])
    if neighborhood in (4, 6):
        weights = np.full(len(offsets), h ** (ndim - 1))
    elif ndim == 2:
        weights = 0.5 * _angular_share_2d(offsets) * h / lengths
    else:
        weights = _solid_angle_share_3d(tuple(offsets)) * h ** 2 / (np.pi * lengths)
    return CutStencil(ndim=ndim, neighborhood=neighborhood, h=float(h),
                      offsets=tuple(offsets), weights=tuple(float(x) for x in weights))
