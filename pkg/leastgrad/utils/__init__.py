"""Utility functions for leastgrad."""

from .grid_utils import (face_offsets, pair_slices, shifted, face_boundary,
                         inner_boundary, contact_cells, label_components, dilate)
from .log_utils import setup_logging

__all__ = ['face_offsets', 'pair_slices', 'shifted', 'face_boundary',
           'inner_boundary', 'contact_cells', 'label_components', 'dilate',
           'setup_logging']
