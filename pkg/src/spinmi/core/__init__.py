from .logweight import LogWeight
from .entropy import shannon_entropy, mutual_information_from_entropies
from .models import LatticeModelSpec, bond_energy, ising_critical_coupling, potts_critical_coupling
from .geometry import Bipartition, BoundaryConfig, lattice_bonds, half_cut, nested_cut
from .brute import brute_force_mi, enumerate_log_z, BruteForceTooLarge

__all__ = [
    "LogWeight",
    "shannon_entropy",
    "mutual_information_from_entropies",
    "LatticeModelSpec",
    "bond_energy",
    "ising_critical_coupling",
    "potts_critical_coupling",
    "Bipartition",
    "BoundaryConfig",
    "lattice_bonds",
    "half_cut",
    "nested_cut",
    "brute_force_mi",
    "enumerate_log_z",
    "BruteForceTooLarge",
]
