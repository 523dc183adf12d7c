"""Level-set family construction, assembly and structural checks."""

from .family import (LevelSetFamily, level_grid, build_family, assemble_solution,
                     level_table, first_nesting_violation)
from .checks import (check_boundary_values, check_separation, check_component_reaches_boundary,
                     check_family_components, check_trace_containment,
                     check_competitor_inequality, interface_deviation, continuity_modulus,
                     superlevel_recovery, boundary_trace_error, check_nestedness,
                     plateau_values, extend_by_boundary)

__all__ = ['LevelSetFamily', 'level_grid', 'build_family', 'assemble_solution', 'level_table',
           'first_nesting_violation', 'check_boundary_values', 'check_separation',
           'check_component_reaches_boundary', 'check_family_components',
           'check_trace_containment', 'check_competitor_inequality', 'interface_deviation',
           'continuity_modulus', 'superlevel_recovery', 'boundary_trace_error',
           'check_nestedness', 'plateau_values', 'extend_by_boundary']
