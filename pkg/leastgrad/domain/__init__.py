"""Discrete domain, weight and boundary data."""

from .shapes import Ball, Box, Union
from .grid import DiscreteDomain, build_domain
from .weights import WeightField, build_weight
from .boundary import (BoundaryData, extend_boundary_data, superlevel_exterior,
                       nearest_boundary_index, nearest_extension, extension_mismatch,
                       modulus_of_continuity, collar_variation)

__all__ = ['Ball', 'Box', 'Union', 'DiscreteDomain', 'build_domain', 'WeightField',
           'build_weight', 'BoundaryData', 'extend_boundary_data', 'superlevel_exterior',
           'nearest_boundary_index', 'nearest_extension', 'extension_mismatch',
           'modulus_of_continuity', 'collar_variation']
