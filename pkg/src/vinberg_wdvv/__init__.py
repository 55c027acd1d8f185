"""Symmetric cones, their Hessian geometry, and numerical checks of the
WDVV/Frobenius axioms on maximal flats."""

__version__ = "0.1.0"

from .division import DivisionScalar, cd_mul, conj, norm_sq, real_part
from .jordan import (JordanAlgebra, JordanElement, determinant, direct_sum, identity,
                     jordan_product, make_algebra, parse_family, power, trace_form)
from .cone import (ConePoint, PotentialSpec, contains, kv_integral_mc, kv_potential,
                   potential_spec, sample_interior, self_duality_sample)
from .derivatives import (Chart, ambient_chart, c_tensor, chart_geometry, directional_jet,
                          logdet_oracle, make_chart, metric, monge_ampere_invariant, q_tensor)
from .flats import (FlatDescriptor, cartan_flat, curvature_triple, flat_chart, flat_point,
                    lie_bracket, lie_triple_residual, weyl_chamber_contains)
from .frobenius import (ResidualReport, StructureConstants, circ, frobenius_compat_residual,
                        pencil_curvature_residual, structure_constants, trace_assoc_residual,
                        unit_residual, wdvv_residual)
