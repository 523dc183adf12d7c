"""
Parsers for CSV inputs: boundary values and grid fields written by
:mod:`leastgrad.converters.field_converter`.
"""

import json
import logging
import os

import numpy as np

from ..fields import ScalarField

logger = logging.getLogger(__name__)


def _rows(path, columns):
    try:
        table = np.loadtxt(path, delimiter=',', comments='#', skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ValueError('{}: {}'.format(path, exc))
    if table.shape[1] != columns:
        raise ValueError('{}: expected {} columns, found {}'.format(path, columns, table.shape[1]))
    return table


def _flat_indices(dom, table):
    idx = table[:, :dom.ndim]
    if np.any(idx != np.rint(idx)):
        raise ValueError('cell indices must be integers')
    idx = idx.astype(np.int64)
    if np.any(idx < 0) or np.any(idx >= np.asarray(dom.shape)):
        raise ValueError('cell index outside the grid {}'.format(dom.shape))
    return np.ravel_multi_index(tuple(idx.T), dom.shape)


def read_boundary_csv(path, dom):
    """
    Boundary values keyed by cell.

    The file has a header line and one row per boundary cell: the box index
    along every axis followed by the value.

    Returns:
        dict: {flat cell index: value}, suitable for ``extend_boundary_data``
    """
    table = _rows(path, dom.ndim + 1)
    flat = _flat_indices(dom, table)
    return {int(i): float(v) for i, v in zip(flat, table[:, -1])}


def read_field_csv(path, dom):
    """
    Read a field back from its CSV form; every cell of the box must appear.

    Returns:
        ScalarField
    """
    table = _rows(path, dom.ndim + 1)
    flat = _flat_indices(dom, table)
    values = np.full(dom.size, np.nan)
    values[flat] = table[:, -1]
    if np.isnan(values).any():
        raise ValueError('{}: {} cells have no value'.format(path, int(np.isnan(values).sum())))
    return ScalarField(dom, values.reshape(dom.shape))


def read_sidecar(path):
    """
    Scaling sidecar of a 16-bit field image; an absent file means the
    default range [0, 1].
    """
    if not os.path.exists(path):
        logger.debug('no sidecar at %s, assuming range [0, 1]', path)
        return {'min': 0.0, 'max': 1.0, 'constant': False}
    with open(path, 'r', encoding='utf-8') as fh:
        return json.load(fh)
