from .blocks import (CollectiveModelSpec, MultiplicityTable, BlockSpectrum,
                     multiplicities, build_block, block_spectrum,
                     partition_and_observables, ground_state_order_parameter,
                     spin_matrices, mn_constant)
from .meanfield import (lmg_mean_field, mn_mean_field, lmg_critical_temperature,
                        phase_boundary, classify_transition)
from .classical import classical_limit, classical_mi_infinite, critical_mi_law

__all__ = [
    "CollectiveModelSpec", "MultiplicityTable", "BlockSpectrum",
    "multiplicities", "build_block", "block_spectrum",
    "partition_and_observables", "ground_state_order_parameter",
    "spin_matrices", "mn_constant",
    "lmg_mean_field", "mn_mean_field", "lmg_critical_temperature",
    "phase_boundary", "classify_transition",
    "classical_limit", "classical_mi_infinite", "critical_mi_law",
]
