"""
Parsers for surfaces used by the conformal mass check: polylines as CSV
point lists and triangle meshes in OFF format.
"""

import numpy as np

from ..geometry.conformal import Polyline, TriangleMesh


def read_polyline_csv(path, closed=True, projection=None):
    """
    Read a planar polyline, one ``x,y`` point per line (header optional).

    Returns:
        Polyline
    """
    with open(path, 'r', encoding='utf-8') as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith('#')]
    rows = []
    for ln in lines:
        try:
            rows.append([float(v) for v in ln.split(',')])
        except ValueError:
            if rows:
                raise ValueError('{}: bad polyline row {!r}'.format(path, ln))
            # header line
    pts = np.array(rows, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError('{}: a polyline needs at least two 2D points'.format(path))
    return Polyline(points=pts, closed=closed, projection=projection)


def read_off(path, projection=None):
    """
    Read a triangle mesh from an OFF file. Polygonal faces are fanned into
    triangles.

    Returns:
        TriangleMesh
    """
    with open(path, 'r', encoding='utf-8') as fh:
        words = []
        for ln in fh:
            ln = ln.split('#', 1)[0]
            words.extend(ln.split())
    if not words or words[0] != 'OFF':
        raise ValueError('{}: missing OFF header'.format(path))
    n_vertices, n_faces = int(words[1]), int(words[2])
    pos = 4
    vertices = np.array(words[pos:pos + 3 * n_vertices], dtype=float).reshape(n_vertices, 3)
    pos += 3 * n_vertices
    faces = []
    for _ in range(n_faces):
        count = int(words[pos])
        idx = [int(v) for v in words[pos + 1:pos + 1 + count]]
        pos += 1 + count
        if count < 3:
            raise ValueError('{}: face with {} vertices'.format(path, count))
        faces.extend((idx[0], idx[k], idx[k + 1]) for k in range(1, count - 1))
    faces = np.array(faces, dtype=int)
    if faces.size and (faces.min() < 0 or faces.max() >= n_vertices):
        raise ValueError('{}: face index out of range'.format(path))
    return TriangleMesh(vertices=vertices, faces=faces, projection=projection)
