"""spinmi: mutual information in interacting spin systems.

Classical lattice models (Ising, Potts, clock) are handled by four
cross-validating engines (brute-force enumeration, boundary-MPS transfer
operators, fermionic Gaussian matchgates, FKT Pfaffians) plus a
Swendsen-Wang cluster probe.  Fully-connected spin-1/2 models (LMG and
m,n families) are handled by total-spin block diagonalization with
Clebsch-Gordan recoupling for subsystem entropies, mean-field phase
boundaries, and closed-form classical-limit asymptotics.
"""

__version__ = "0.1.0"
