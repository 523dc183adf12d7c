"""Weighted perimeter, total variation, duality and conformal area."""

from .stencil import CutStencil, make_stencil, NEIGHBORHOODS
from .perimeter import (EdgeFamily, cut_edges, stencil_for, alpha_perimeter,
                        alpha_total_variation, coarea_quadrature, submodularity_defect)
from .duality import (discrete_gradient, discrete_divergence, isotropic_total_variation,
                      dual_pairing_and_gap)
from .conformal import (Polyline, TriangleMesh, polyline_circle, icosphere,
                        radial_projection, conformal_mass)

__all__ = ['CutStencil', 'make_stencil', 'NEIGHBORHOODS', 'EdgeFamily', 'cut_edges',
           'stencil_for', 'alpha_perimeter', 'alpha_total_variation', 'coarea_quadrature',
           'submodularity_defect', 'discrete_gradient', 'discrete_divergence',
           'isotropic_total_variation', 'dual_pairing_and_gap', 'Polyline', 'TriangleMesh',
           'polyline_circle', 'icosphere', 'radial_projection', 'conformal_mass']
