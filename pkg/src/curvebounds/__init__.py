"""Length, width, inradius and horizon of curves in the plane and in space."""

from .constructions import (baseball_curve, bound_table, d_of_h, gamma_h, gamma_h_length, l5_curve,
                            l5_length, l5_width_upper_bound, solve_h0)
from .curves import (Arc, Helix, Line, ParamPoint, PiecewiseCurve, PolyCurve, arclength_reparam, dumps,
                     length, loads, project, sample)
from .errors import (DegenerateCurveError, DegenerateHullError, DomainError, InternalInconsistencyError,
                     InvalidArgumentError, NonTerminationError)
from .horizon import (HorizonEstimate, horizon, horizon_by_counting, inner_integral_I, is_efficient_inspection,
                      make_efficient, verify_horizon_bounds)
from .hull import ConvexHull3, hull
from .integral import (barbier_check, crofton_length_2d, decompose_length, min_max_norm_bound,
                       spherical_crofton_length)
from .metrics import (MetricReport, SlabWitness, inradius, inspects_sphere, nth_hull_membership, verify_bounds,
                      wienholtz_witness, width2d, width3d)

__version__ = "0.1.0"
