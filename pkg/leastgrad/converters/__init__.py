"""Converters from results to output files."""

from .field_converter import emit_field, emit_mask, emit_family, field_scaling, quantize, MAXVAL
from .report_converter import CheckResult, RunReport, emit_report, report_to_dict, plain
from .dimacs_converter import dimacs_lines, dump_dimacs

__all__ = ['emit_field', 'emit_mask', 'emit_family', 'field_scaling', 'quantize', 'MAXVAL',
           'CheckResult', 'RunReport', 'emit_report', 'report_to_dict', 'plain',
           'dimacs_lines', 'dump_dimacs']
