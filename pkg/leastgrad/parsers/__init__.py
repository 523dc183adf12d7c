"""Parsers for configs, rasters, CSV fields and surfaces."""

from .config_parser import (ExperimentConfig, load_config, config_from_dict, ALL_CHECKS,
                            DEFAULT_TOLERANCES, DEFAULT_CHECK_PARAMS, SCHEMA_VERSION)
from .pgm_parser import parse_pgm, read_mask, read_raster, read_field_pgm
from .csv_parser import read_boundary_csv, read_field_csv, read_sidecar
from .surface_parser import read_polyline_csv, read_off

__all__ = ['ExperimentConfig', 'load_config', 'config_from_dict', 'ALL_CHECKS',
           'DEFAULT_TOLERANCES', 'DEFAULT_CHECK_PARAMS', 'SCHEMA_VERSION', 'parse_pgm',
           'read_mask', 'read_raster', 'read_field_pgm', 'read_boundary_csv', 'read_field_csv', 'read_sidecar',
           'read_polyline_csv', 'read_off']
