"""Rank-one geometry of 2x2 matrices: lamination hull iterates, T4
configurations, laminate measures, Hausdorff distances, and polyconvex
hulls of determinant-nonnegative sets."""

from .core import (
    DiagPt,
    GeometryError,
    Mat2,
    SubspaceError,
    SymPt,
    TriPt,
    crossing_parameter,
    det,
    project_diag,
    project_sym,
    project_tri,
    rank2x2,
    rank_one_connected,
)
from .hulls import (
    LaminateSet,
    RankOneSegment,
    SeparatorWitness,
    directed_dist_sq,
    directed_distance,
    hausdorff,
    hausdorff_sq,
    l2_hull,
    lamination_step,
    point_to_set_dist_sq,
    point_to_set_distance,
    separator_check,
)
from .scalar import EXACT, FLOAT, MixedModeError, Scalar
from .t4 import (
    DiscreteLaminate,
    T4Report,
    T4Witness,
    check_t4_witness,
    detect_t4,
    laminate_unroll,
    solve_t4_ordering,
)

__all__ = [
    "DiagPt", "DiscreteLaminate", "EXACT", "FLOAT", "GeometryError",
    "LaminateSet", "Mat2", "MixedModeError", "RankOneSegment", "Scalar",
    "SeparatorWitness", "SubspaceError", "SymPt", "T4Report", "T4Witness",
    "TriPt", "check_t4_witness", "crossing_parameter", "det",
    "detect_t4", "directed_dist_sq", "directed_distance", "hausdorff",
    "hausdorff_sq", "l2_hull", "lamination_step", "laminate_unroll",
    "point_to_set_dist_sq", "point_to_set_distance", "project_diag",
    "project_sym", "project_tri", "rank2x2", "rank_one_connected",
    "separator_check", "solve_t4_ordering",
]

__version__ = "0.1.0"
