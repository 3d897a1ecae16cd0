from .factorize import BondFactorization, factorize_bond
from .transfer import DenseStripOps, dense_dominant, mi_finite_strip_exact
from .mpo import TransferOperator, full_lattice_log_z
from .boundary import BoundaryState, dominant_boundary
from .strip import mi_strip_exact, partial_partition, weight_and_logterm, StripEstimator

__all__ = [
    "BondFactorization",
    "factorize_bond",
    "DenseStripOps",
    "dense_dominant",
    "mi_finite_strip_exact",
    "TransferOperator",
    "full_lattice_log_z",
    "BoundaryState",
    "dominant_boundary",
    "mi_strip_exact",
    "partial_partition",
    "weight_and_logterm",
    "StripEstimator",
]
