"""
Convert grid fields and masks to CSV and PGM files.
"""

import json
import os
import logging

import numpy as np

from ..utils.file_utils import ensure_dir
from ..utils.grid_utils import array_to_image

logger = logging.getLogger(__name__)

MAXVAL = 65535


def _write_pgm(path, image, maxval):
    image = np.asarray(image)
    height, width = image.shape
    dtype = '>u2' if maxval > 255 else 'u1'
    with open(path, 'wb') as fh:
        fh.write('P5\n{} {}\n{}\n'.format(width, height, maxval).encode('ascii'))
        fh.write(image.astype(dtype).tobytes())


def field_scaling(values):
    """Sidecar dict {min, max, constant, shape} for a field's finite values."""
    finite = values[np.isfinite(values)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 0.0
    return {'min': lo, 'max': hi, 'constant': lo == hi, 'shape': list(values.shape)}


def quantize(values, scaling):
    """Gray levels in [0, 65535]; constant fields map to 0."""
    if scaling['constant']:
        return np.zeros(values.shape, dtype=np.int64)
    span = scaling['max'] - scaling['min']
    q = np.rint((np.nan_to_num(values, nan=scaling['min']) - scaling['min']) / span * MAXVAL)
    return np.clip(q, 0, MAXVAL).astype(np.int64)


def emit_field(field, basename, write_pgm=True):
    """
    Write a scalar field as ``<basename>.csv`` (box index per axis, value),
    a 16-bit ``<basename>.pgm`` and its ``<basename>.json`` scaling sidecar.

    Args:
        field: ScalarField
        basename: Output path without extension
        write_pgm: Also write the image and the sidecar

    Returns:
        list: Paths written
    """
    values = np.asarray(field.values, dtype=float)
    dom = field.domain
    idx = np.indices(dom.shape).reshape(dom.ndim, -1).T
    header = ','.join(['i{}'.format(k) for k in range(dom.ndim)] + ['value'])
    table = np.column_stack([idx, values.reshape(-1)])
    fmt = ['%d'] * dom.ndim + ['%.17g']
    written = [basename + '.csv']
    np.savetxt(written[0], table, delimiter=',', header=header, comments='', fmt=fmt)

    if write_pgm:
        scaling = field_scaling(values)
        _write_pgm(basename + '.pgm', array_to_image(quantize(values, scaling)), MAXVAL)
        with open(basename + '.json', 'w', encoding='utf-8') as fh:
            json.dump(scaling, fh, sort_keys=True, indent=2)
            fh.write('\n')
        written += [basename + '.pgm', basename + '.json']
    logger.debug('wrote field %s', basename)
    return written


def emit_mask(mask, path):
    """8-bit PGM of a boolean grid mask (inside = 255)."""
    values = np.asarray(getattr(mask, 'values', mask), dtype=bool)
    _write_pgm(path, array_to_image(values.astype(np.int64) * 255), 255)
    return path


def emit_family(fam, directory, rows):
    """
    Dump a level-set family: ``levels.csv`` with (k, t_k, perimeter, cell
    count) rows and one mask image per level.
    """
    ensure_dir(directory)
    with open(os.path.join(directory, 'levels.csv'), 'w', encoding='utf-8') as fh:
        fh.write('k,t,perimeter,cells\n')
        for k, t, perimeter, cells in rows:
            fh.write('{},{!r},{!r},{}\n'.format(k, float(t), float(perimeter), cells))
    width = len(str(len(fam.levels) - 1))
    for k, E in enumerate(fam.sets):
        emit_mask(E, os.path.join(directory, 'level_{:0{}d}.pgm'.format(k, width)))
    return directory
