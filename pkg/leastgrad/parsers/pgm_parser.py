"""
Parser for PGM rasters (plain P2 and binary P5, 8 or 16 bit).
"""

import numpy as np

from ..utils.grid_utils import image_to_array
from .csv_parser import read_sidecar


def _tokens(data):
    """Header tokens with comments removed, and the offset after the last one."""
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] not in (b'\n', b'\r'):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError('truncated PGM header')
        tokens.append(data[start:pos])
    return tokens, pos + 1


def parse_pgm(path):
    """
    Read a PGM image.

    Args:
        path: File path

    Returns:
        tuple: (image rows as an integer array, maxval)

    Raises:
        ValueError: on a malformed file
    """
    with open(path, 'rb') as fh:
        data = fh.read()
    tokens, offset = _tokens(data)
    magic = tokens[0]
    if magic not in (b'P2', b'P5'):
        raise ValueError('{}: not a PGM file (magic {!r})'.format(path, magic))
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ValueError('{}: malformed PGM header'.format(path))
    if not 0 < maxval < 65536:
        raise ValueError('{}: maxval {} out of range'.format(path, maxval))

    count = width * height
    if magic == b'P2':
        values = np.array(data[offset:].split(), dtype=np.int64)
    else:
        dtype = np.dtype('>u2') if maxval > 255 else np.dtype('u1')
        values = np.frombuffer(data, dtype=dtype, count=count, offset=offset).astype(np.int64)
    if values.size < count:
        raise ValueError('{}: expected {} samples, found {}'.format(path, count, values.size))
    return values[:count].reshape(height, width), maxval


def read_mask(path, threshold=0.5):
    """
    Boolean grid mask from a PGM, one pixel per cell, image top = largest x2.
    Pixels brighter than ``threshold * maxval`` are inside.
    """
    img, maxval = parse_pgm(path)
    return image_to_array(img > threshold * maxval)


def read_raster(path, lower=0.0, upper=1.0):
    """Grid samples mapped affinely from [0, maxval] to [lower, upper]."""
    img, maxval = parse_pgm(path)
    return image_to_array(lower + (upper - lower) * img / float(maxval))


def read_field_pgm(path, sidecar=None):
    """
    Grid values from a 16-bit field image and its scaling sidecar
    (``<stem>.json`` next to the image by default).
    """
    if sidecar is None:
        sidecar = path[:-4] + '.json' if path.endswith('.pgm') else path + '.json'
    scaling = read_sidecar(sidecar)
    img, maxval = parse_pgm(path)
    arr = image_to_array(img).astype(float)
    if scaling.get('constant'):
        return np.full(arr.shape, float(scaling['min']))
    return scaling['min'] + (scaling['max'] - scaling['min']) * arr / float(maxval)
