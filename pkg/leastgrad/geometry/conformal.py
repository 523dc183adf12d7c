"""
Surface quadrature for the identity between the weighted (n-1)-area and the
Riemannian area in the conformal metric a**sigma times the identity.

Surfaces are polylines in the plane or triangle meshes in space. Flat
elements can optionally be mapped onto an analytic circle or sphere through
a radial projection, in which case both integrals are computed on the exact
curved surface.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import DegenerateElement

logger = logging.getLogger(__name__)

# 7-point degree-5 rule on the reference triangle, barycentric points
_TRI_WEIGHTS = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_TRI_POINTS = np.array([
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])


def radial_projection(center, radius):
    """
    Map onto the sphere ``|x - center| = radius``.

    Returns a callable taking points of shape (..., n) and returning the
    mapped points and the Jacobians of shape (..., n, n).
    """
    c = np.asarray(center, dtype=float)

    def project(points):
        y = points - c
        r = np.linalg.norm(y, axis=-1)
        if np.any(r == 0):
            raise DegenerateElement('cannot project the center point')
        yhat = y / r[..., None]
        n = points.shape[-1]
        eye = np.broadcast_to(np.eye(n), points.shape + (n,))
        jac = (radius / r)[..., None, None] * (eye - yhat[..., :, None] * yhat[..., None, :])
        return c + radius * yhat, jac

    return project


@dataclass(frozen=True, eq=False)
class Polyline:
    """Planar polyline through ``points`` (m, 2); closed joins the last point to the first."""
    points: np.ndarray
    closed: bool = True
    projection: Optional[Callable] = None

    def segments(self):
        pts = np.asarray(self.points, dtype=float)
        ends = np.roll(pts, -1, axis=0) if self.closed else pts[1:]
        starts = pts if self.closed else pts[:-1]
        return starts, ends


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Triangle mesh in space; ``faces`` index rows of ``vertices``."""
    vertices: np.ndarray
    faces: np.ndarray
    projection: Optional[Callable] = None

    def corners(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=int)
        return v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]


def polyline_circle(center, radius, segments, project=True):
    """Closed regular polygon inscribed in a circle, optionally projected onto it."""
    theta = 2.0 * np.pi * np.arange(segments) / segments
    pts = np.asarray(center, dtype=float) + radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    proj = radial_projection(center, radius) if project else None
    return Polyline(points=pts, closed=True, projection=proj)


def icosphere(center=(0.0, 0.0, 0.0), radius=1.0, subdivisions=4, project=True):
    """
    Sphere mesh from a subdivided icosahedron with all vertices on the sphere.
    """
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]

    for _ in range(subdivisions):
        midpoint = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined

    vertices = np.asarray(center, dtype=float) + radius * np.array(verts)
    proj = radial_projection(center, radius) if project else None
    return TriangleMesh(vertices=vertices, faces=np.array(faces, dtype=int), projection=proj)


def _polyline_samples(surface, order):
    starts, ends = surface.segments()
    edges = ends - starts
    lengths = np.linalg.norm(edges, axis=1)
    if np.any(lengths <= 0):
        raise DegenerateElement('polyline has {} zero-length segments'.format(int(np.sum(lengths <= 0))))
    nodes, weights = leggauss(order)
    s = 0.5 * (nodes + 1.0)
    points = starts[:, None, :] + s[None, :, None] * edges[:, None, :]
    tangents = np.broadcast_to(edges[:, None, :, None], points.shape + (1,))
    if surface.projection is not None:
        points, jac = surface.projection(points)
        tangents = jac @ tangents
    return points, tangents, 0.5 * weights[None, :]


def _mesh_samples(surface):
    p0, p1, p2 = surface.corners()
    e1, e2 = p1 - p0, p2 - p0
    flat_area = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)
    if np.any(flat_area <= 0):
        raise DegenerateElement('mesh has {} zero-area triangles'.format(int(np.sum(flat_area <= 0))))
    lam = _TRI_POINTS
    points = (lam[None, :, 0, None] * p0[:, None, :] + lam[None, :, 1, None] * p1[:, None, :]
              + lam[None, :, 2, None] * p2[:, None, :])
    frame = np.stack([e1, e2], axis=-1)
    tangents = np.broadcast_to(frame[:, None, :, :], points.shape + (2,))
    if surface.projection is not None:
        points, jac = surface.projection(points)
        tangents = jac @ tangents
    # reference triangle has area 1/2
    return points, tangents, 0.5 * _TRI_WEIGHTS[None, :]


def _element_measure(tangents):
    if tangents.shape[-1] == 1:
        return np.linalg.norm(tangents[..., 0], axis=-1)
    return np.linalg.norm(np.cross(tangents[..., 0], tangents[..., 1]), axis=-1)


def conformal_mass(surface, a, n, sigma, order=4):
    """
    Weighted area and conformal Riemannian area of a surface.

    ``weighted_area`` integrates ``a**((n-1)*sigma/2)`` against the Euclidean
    (n-1)-area; ``riemannian_area`` integrates the Gram determinant of the
    tangent frame in the metric ``a**sigma * I``.

    Args:
        surface: Polyline (n=2) or TriangleMesh (n=3)
        a: Weight callable on points of shape (..., n)
        n: Ambient dimension
        sigma: Conformal exponent (nonzero)
        order: Gauss-Legendre points per polyline segment

    Returns:
        tuple: (weighted_area, riemannian_area)

    Raises:
        DegenerateElement: if an element has zero size
    """
    if sigma == 0:
        raise ValueError('conformal exponent must be nonzero')
    if isinstance(surface, Polyline):
        if n != 2:
            raise ValueError('polylines live in dimension 2')
        points, tangents, weights = _polyline_samples(surface, order)
    elif isinstance(surface, TriangleMesh):
        if n != 3:
            raise ValueError('triangle meshes live in dimension 3')
        points, tangents, weights = _mesh_samples(surface)
    else:
        raise TypeError('unsupported surface type {}'.format(type(surface).__name__))

    a_vals = np.asarray(a(points), dtype=float)
    weighted = np.sum(weights * a_vals ** ((n - 1) * sigma / 2.0) * _element_measure(tangents))

    metric = a_vals[..., None, None] ** sigma * np.eye(n)
    gram = np.swapaxes(tangents, -1, -2) @ metric @ tangents
    riemannian = np.sum(weights * np.sqrt(np.linalg.det(gram)))
    logger.debug('conformal mass: weighted=%.12g riemannian=%.12g', weighted, riemannian)
    return float(weighted), float(riemannian)
