"""Lattice model definitions: Ising, Potts and clock spins on a square grid.

The dimensionless coupling K absorbs the thermal beta; Boltzmann factors
are exp(-bond_energy) with no further temperature factor.  math.inf is a
reserved sentinel for boundary-fixing bonds and must only reach engines
through tanh(K) -> 1 or renormalized gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

INFINITE_BOND = math.inf

_KINDS = ("ising", "potts", "clock")


@dataclass(frozen=True)
class LatticeModelSpec:
    """A classical spin model on a rows x cols square lattice.

    cols=None marks the infinitely long strip/cylinder limit.  The
    energy_offset shifts every bond energy by a constant; it moves the
    zero of energy and must not change any mutual information.
    """

    kind: str
    rows: int
    cols: int | None = None
    q: int = 2
    coupling: float = 0.0
    vertical_bc: str = "open"
    energy_offset: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if self.kind == "ising" and self.q != 2:
            raise ValueError("ising requires q=2")
        if self.rows < 1:
            raise ValueError("rows must be >= 1")
        if self.vertical_bc not in ("open", "periodic"):
            raise ValueError(f"unknown vertical_bc {self.vertical_bc!r}")
        if not (math.isfinite(self.coupling) or self.coupling == INFINITE_BOND):
            raise ValueError("coupling must be finite or the +inf sentinel")


def bond_energy(model: LatticeModelSpec, s_i: int, s_j: int, coupling: float | None = None) -> float:
    """Energy of one bond for site states s_i, s_j in [0, q).

    Ising: -K sigma_i sigma_j with sigma = +1 for state 0, -1 for state 1.
    Potts: -K delta(s_i, s_j).  Clock: -K cos(2 pi (s_i - s_j)/q).
    """
    q = model.q
    if not (0 <= s_i < q and 0 <= s_j < q):
        raise ValueError(f"states ({s_i},{s_j}) out of range [0,{q})")
    k = model.coupling if coupling is None else coupling
    if model.kind == "ising":
        sigma_i = 1 - 2 * s_i
        sigma_j = 1 - 2 * s_j
        e = -k * sigma_i * sigma_j
    elif model.kind == "potts":
        e = -k if s_i == s_j else 0.0
    elif model.kind == "clock":
        e = -k * math.cos(2.0 * math.pi * (s_i - s_j) / q)
    else:  # pragma: no cover - guarded in __post_init__
        raise ValueError(f"unknown model kind {model.kind!r}")
    return e + model.energy_offset


def bond_weight_matrix(model: LatticeModelSpec, coupling: float | None = None):
    """q x q matrix of Boltzmann factors exp(-bond_energy) for one bond."""
    import numpy as np

    q = model.q
    w = np.empty((q, q))
    for a in range(q):
        for b in range(q):
            w[a, b] = math.exp(-bond_energy(model, a, b, coupling))
    return w


def ising_critical_coupling() -> float:
    """K_c = ln(1+sqrt(2))/2 = arcsinh(1)/2 of the square-lattice Ising model."""
    return 0.5 * math.log(1.0 + math.sqrt(2.0))


def potts_critical_coupling(q: int) -> float:
    """Critical coupling K_c(q) = ln(1+sqrt(q)) of the square-lattice Potts model."""
    return math.log(1.0 + math.sqrt(q))
