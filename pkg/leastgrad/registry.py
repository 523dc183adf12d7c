"""
Named analytic forms that experiment configs refer to: shapes, weights,
boundary data and exact solutions.

Each factory takes the keyword parameters of its config table and returns
either a shape object or a callable vectorized over points whose
coordinates run along the last axis.
"""

import numpy as np

from .domain.shapes import Ball, Box, Union
from .errors import ConfigError


def _disk(center=None, radius=1.0, dim=2):
    if center is None:
        center = (0.0,) * int(dim)
    return Ball(tuple(float(c) for c in center), float(radius))


def _box(lower=None, upper=None, dim=2):
    if lower is None:
        lower = (-1.0,) * int(dim)
    if upper is None:
        upper = (1.0,) * len(lower)
    if len(lower) != len(upper):
        raise ConfigError('box corners have different dimensions')
    return Box(tuple(float(c) for c in lower), tuple(float(c) for c in upper))


def _union(parts=()):
    if not parts:
        raise ConfigError('union needs at least one part')
    return Union(tuple(resolve_shape(p) for p in parts))


SHAPES = {
    'disk': _disk,
    'ball': lambda **kw: _disk(**dict({'dim': 3}, **kw)),
    'square': _box,
    'box': _box,
    'rectangle': _box,
    'cube': lambda **kw: _box(**dict({'dim': 3}, **kw)),
    'union': _union,
}


def _norm(points):
    return np.sqrt(np.sum(np.asarray(points) ** 2, axis=-1))


def _constant(value=1.0):
    value = float(value)
    return lambda pts: np.full(np.shape(pts)[:-1], value)


def _radial_quadratic(scale=1.0, base=1.0):
    return lambda pts: float(base) + float(scale) * _norm(pts) ** 2


def _inward_growth(slope=5.0, radius=1.0):
    """1 + slope * (distance inside the centered ball of the given radius)."""
    return lambda pts: 1.0 + float(slope) * np.maximum(float(radius) - _norm(pts), 0.0)


def _sine(base=2.0, frequency=1.0, axis=0):
    return lambda pts: float(base) + np.sin(float(frequency) * np.asarray(pts)[..., int(axis)])


WEIGHTS = {
    'constant': _constant,
    'radial_quadratic': _radial_quadratic,
    'inward_growth': _inward_growth,
    'sine': _sine,
}


def _cos_theta():
    def g(pts):
        pts = np.asarray(pts, dtype=float)
        return pts[..., 0] / np.maximum(_norm(pts), 1e-300)
    return g


def _coordinate(axis=0, scale=1.0):
    return lambda pts: float(scale) * np.asarray(pts, dtype=float)[..., int(axis)]


def _side_values(left=0.0, right=1.0, bottom=0.0, top=0.0):
    """
    Piecewise constant data on a centered square: each point takes the value
    of the side its dominant coordinate points to.
    """
    def g(pts):
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        horizontal = np.abs(x) >= np.abs(y)
        return np.where(horizontal, np.where(x < 0, float(left), float(right)),
                        np.where(y < 0, float(bottom), float(top)))
    return g


BOUNDARY = {
    'cos_theta': _cos_theta,
    'x1': _coordinate,
    'coordinate': _coordinate,
    'side_values': _side_values,
    'constant': _constant,
}

EXACT = {
    'x1': _coordinate,
    'coordinate': _coordinate,
    'constant': _constant,
}


def _split(spec, kind):
    if isinstance(spec, str):
        return spec, {}
    if not isinstance(spec, dict) or 'name' not in spec:
        raise ConfigError('{} entry must be a name or a table with a "name" key'.format(kind))
    params = {k: v for k, v in spec.items() if k != 'name'}
    return spec['name'], params


def _resolve(table, spec, kind):
    name, params = _split(spec, kind)
    try:
        factory = table[name]
    except KeyError:
        raise ConfigError('unknown {} "{}" (known: {})'
                          .format(kind, name, ', '.join(sorted(table))))
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError('bad parameters for {} "{}": {}'.format(kind, name, exc))


def resolve_shape(spec):
    return _resolve(SHAPES, spec, 'shape')


def resolve_weight(spec):
    return _resolve(WEIGHTS, spec, 'weight')


def resolve_boundary(spec):
    return _resolve(BOUNDARY, spec, 'boundary data')


def resolve_exact(spec):
    return _resolve(EXACT, spec, 'exact solution')
