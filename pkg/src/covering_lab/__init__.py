"""Covering constants, Stein-Stromberg ball selection and maximal-function
bounds on finite metric measure spaces."""

__version__ = "0.1.0"

from .builders import (SpaceSpec, build_space, from_distance_matrix, from_points, grid_zd,
                       lshape_net, ngon_chordal, parse_space_spec, three_point_delta)
from .constants import (ConstantsReport, ExtendedConstant, constants_report, doubling,
                        local_comparability, microblossom, microdoubling, mri,
                        relative_increment, sup_mri)
from .covering import (BallFamily, RadiiSet, ScaleDiagnostic, SelectionOutcome,
                       VerificationReport, bounded_outcome, density_sum, disjointify,
                       full_select, make_lacunary, report_for, scale_sequence, sparse_select,
                       verify_covering_bounds)
from .maximal import (BoundsReport, WeakTypeProfile, empirical_weak_norm, maximal_function,
                      theoretical_bounds, weak_type_profile)
from .pointset import PointSet
from .space import (Ball, MetricError, Space, ball, blossom, critical_radii, measure,
                    midpoint_defect, radius_intervals, uncentered_blossom)
