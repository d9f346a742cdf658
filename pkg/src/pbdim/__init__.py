"""Construction, verification and dimension computation for pairwise balanced designs."""

from .algebra import (AffineSpaceSpec, FiniteField, affine_space, field_arith, field_make, field_of_order,
                      projective_plane, steiner_triple_system, transversal_design)
from .closure import (DimensionCertificate, dimension, dimension_at_least, span, strong_dimension,
                      strong_dimension_at_least, strong_span)
from .constructions import WeightAssignment, add_point_fill, break_blocks, delete_point, truncate, wfc
from .designs import (DesignParams, GroupDesign, PBDesign, VerificationReport, admissible, params,
                      pbd_as_gdd, solve_overlap, verify, verify_gdd, verify_pbd)
from .errors import *  # noqa: F401,F403
from .fileformat import parse_design, read_design, serialize_design, write_design
from .ingredients import (GDDRequest, IngredientProvider, PBDRequest, Registry, registry_get,
                          registry_put)
from .pipeline import PipelinePlan, SearchLimits, StageTrace, execute, mini_chain, plan, weak_plan

__version__ = "0.1.0"
