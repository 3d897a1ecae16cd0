from .skew import SkewMatrix, log_pfaffian, pfaffian_reference, log_abs_det_lu
from .fkt import ExpandedGraph, build_fkt, fkt_log_z, graph_to_dot
from .reeval import BoundaryCache, boundary_reeval, mi_nested, NestedEstimator

__all__ = [
    "SkewMatrix",
    "log_pfaffian",
    "pfaffian_reference",
    "log_abs_det_lu",
    "ExpandedGraph",
    "build_fkt",
    "fkt_log_z",
    "graph_to_dot",
    "BoundaryCache",
    "boundary_reeval",
    "mi_nested",
    "NestedEstimator",
]
