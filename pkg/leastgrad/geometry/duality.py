"""
Forward-difference gradient, its exact negative adjoint, and the dual
pairing of a scalar field with a bounded vector field.
"""

import numpy as np

from ..fields import DiscreteVectorField, require_same_domain


def discrete_gradient(values, h):
    """
    Forward differences along every axis, zero on the last slab of each axis.

    Args:
        values: Array over the box
        h: Grid spacing

    Returns:
        numpy.ndarray: shape ``values.shape + (ndim,)``
    """
    values = np.asarray(values, dtype=float)
    grad = np.zeros(values.shape + (values.ndim,))
    for axis in range(values.ndim):
        lead = [slice(None)] * values.ndim
        lead[axis] = slice(0, -1)
        grad[tuple(lead) + (axis,)] = np.diff(values, axis=axis) / h
    return grad


def discrete_divergence(Y, h):
    """
    Negative adjoint of :func:`discrete_gradient`:
    ``sum(grad(u) * Y) == -sum(u * div(Y))`` for every u and Y.
    """
    Y = np.asarray(Y, dtype=float)
    ndim = Y.ndim - 1
    div = np.zeros(Y.shape[:-1])
    for axis in range(ndim):
        comp = np.moveaxis(Y[..., axis], axis, 0)
        out = np.moveaxis(div, axis, 0)
        out[:-1] += comp[:-1]
        out[1:] -= comp[:-1]
    return div / h


def isotropic_total_variation(u, w, region=None):
    """
    Two-point isotropic weighted variation ``h**n * sum a_i |grad u_i|``.

    Args:
        u: ScalarField
        w: WeightField
        region: Boolean mask of the cells to sum over (whole box when None)

    Returns:
        float
    """
    dom = u.domain
    grad = discrete_gradient(u.values, dom.h)
    density = w.cell * np.sqrt(np.sum(grad ** 2, axis=-1))
    if region is not None:
        density = density[np.asarray(region, dtype=bool)]
    return float(np.sum(density) * dom.h ** dom.ndim)


def dual_pairing_and_gap(u, Y, w):
    """
    Pair a field with a candidate dual vector field.

    Args:
        u: ScalarField, finite on the whole box
        Y: DiscreteVectorField vanishing on the outermost layer of the box
        w: WeightField

    Returns:
        tuple: (pairing, feasibility_violation) where the pairing is
        ``h**n * sum u * div Y`` and the violation is ``max(0, max |Y| - a)``

    Raises:
        ValueError: if Y touches the outer box boundary
    """
    if not isinstance(Y, DiscreteVectorField):
        Y = DiscreteVectorField(u.domain, Y)
    require_same_domain(u, Y)
    dom = u.domain
    outer = np.ones(dom.shape, dtype=bool)
    outer[tuple(slice(1, -1) for _ in range(dom.ndim))] = False
    norms = Y.norms()
    if np.any(norms[outer] != 0):
        raise ValueError('dual field must vanish on the outer layer of the box')

    div = discrete_divergence(Y.values, dom.h)
    pairing = float(np.sum(u.values * div) * dom.h ** dom.ndim)
    violation = max(0.0, float(np.max(norms - w.cell)))
    return pairing, violation
