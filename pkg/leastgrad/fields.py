"""
Grid-valued objects shared by all modules: binary sets, scalar fields and
cell-wise vector fields. Each one carries the domain it lives on.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatch


def _readonly(arr, dtype):
    arr = np.array(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


def require_same_domain(*objects):
    """Raise DomainMismatch unless every object lives on the same domain."""
    doms = [o.domain for o in objects]
    for d in doms[1:]:
        if not doms[0].same_as(d):
            raise DomainMismatch('objects live on different grids: {} vs {}'
                                 .format(doms[0].fingerprint, d.fingerprint))


@dataclass(frozen=True, eq=False)
class IndicatorSet:
    """Binary membership per grid cell (a discrete set of finite perimeter)."""
    domain: object
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(self.values, bool)
        if vals.shape != self.domain.shape:
            raise DomainMismatch('mask shape {} does not match grid {}'
                                 .format(vals.shape, self.domain.shape))
        object.__setattr__(self, 'values', vals)

    def __eq__(self, other):
        if not isinstance(other, IndicatorSet):
            return NotImplemented
        return self.domain.same_as(other.domain) and np.array_equal(self.values, other.values)

    __hash__ = None

    def __or__(self, other):
        require_same_domain(self, other)
        return IndicatorSet(self.domain, self.values | other.values)

    def __and__(self, other):
        require_same_domain(self, other)
        return IndicatorSet(self.domain, self.values & other.values)

    def issubset(self, other):
        require_same_domain(self, other)
        return not np.any(self.values & ~other.values)

    def count(self):
        return int(self.values.sum())

    def as_field(self):
        return ScalarField(self.domain, self.values.astype(float))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real value per grid cell (over the interior and the collar)."""
    domain: object
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(self.values, float)
        if vals.shape != self.domain.shape:
            raise DomainMismatch('field shape {} does not match grid {}'
                                 .format(vals.shape, self.domain.shape))
        object.__setattr__(self, 'values', vals)

    def superlevel(self, t):
        return IndicatorSet(self.domain, self.values >= t)

    def scaled(self, factor):
        return ScalarField(self.domain, self.values * factor)


@dataclass(frozen=True, eq=False)
class DiscreteVectorField:
    """One vector per cell; ``values`` has shape ``grid shape + (ndim,)``."""
    domain: object
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(self.values, float)
        if vals.shape != self.domain.shape + (self.domain.ndim,):
            raise DomainMismatch('vector field shape {} does not match grid {}'
                                 .format(vals.shape, self.domain.shape))
        if not np.all(np.isfinite(vals)):
            raise ValueError('vector field components must be finite')
        object.__setattr__(self, 'values', vals)

    def norms(self):
        return np.sqrt(np.sum(self.values ** 2, axis=-1))
