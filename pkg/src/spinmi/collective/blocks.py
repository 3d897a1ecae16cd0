"""Total-spin block treatment of fully connected spin-1/2 models.

The Hamiltonians commute with S^2, so the 2^N-dimensional problem reduces
to (2s+1)-dimensional blocks with multiplicities d_s^N generated by a
stable two-neighbour recursion.  Spin quantum numbers are handled doubled
(integers) internally; public observables follow the convention
m_x = 2 sqrt(<S_x^2>)/N to stay blind to symmetry breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def mn_constant(m: int, n: int) -> float:
    """Interaction-strength normalization of the m,n family: chosen so the
    zero-temperature transition always sits at omega = pi/4."""
    if m < n:
        m, n = n, m
    if (m, n) == (2, 1):
        return 2.0
    if n == 1 and m > 2:
        return m ** (m / 2) * (m - 2) ** (m / 2 - 1) * (m - 1) ** (1 - m)
    if m >= 2 and n >= 2:
        return 1.0
    raise ValueError(f"unsupported interaction orders ({m},{n})")


@dataclass(frozen=True)
class CollectiveModelSpec:
    """LMG: H = -(Sx^2 + gamma Sy^2)/N + h Sz.
    MN:  H = -N (cos(omega) (2Sx/N)^m + K_mn sin(omega) (2Sz/N)^n)."""

    n_spins: int
    family: str = "lmg"            # "lmg" | "mn"
    gamma: float = 0.0
    h: float = 0.0
    m_order: int = 2
    n_order: int = 1
    omega: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("n_spins must be >= 1")
        if self.family not in ("lmg", "mn"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "mn":
            mn_constant(self.m_order, self.n_order)

    def spin2_values(self) -> list[int]:
        """Doubled total spins 2s, from N mod 2 up to N."""
        return list(range(self.n_spins % 2, self.n_spins + 1, 2))


@dataclass
class MultiplicityTable:
    """d_s^N as exact integers plus log values, keyed by doubled spin."""

    n_spins: int
    counts: dict[int, int]

    def d(self, s2: int) -> int:
        return self.counts.get(s2, 0)

    def log_d(self, s2: int) -> float:
        c = self.counts.get(s2, 0)
        if c == 0:
            return -math.inf
        return math.log(c)  # math.log takes exact big ints

    def sum_rule_exact(self) -> bool:
        total = sum((s2 + 1) * d for s2, d in self.counts.items())
        return total == 2 ** self.n_spins


def multiplicities(n_spins: int) -> MultiplicityTable:
    """Row n_spins of the recursion: each entry is the sum of its left and
    right neighbours in the previous row (exact integer arithmetic)."""
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    row = {1: 1}  # N=1: d_{1/2} = 1
    for _ in range(n_spins - 1):
        new = {}
        for s2 in range(0 if len(row) else 0, max(row) + 2):
            v = row.get(s2 - 1, 0) + row.get(s2 + 1, 0)
            if v:
                new[s2] = v
        row = new
    return MultiplicityTable(n_spins=n_spins, counts=row)


def binomial_multiplicity(n_spins: int, s2: int) -> int:
    """Closed form d_s^N = C(N, N/2-s) - C(N, N/2-s-1) (cross-check path)."""
    half = (n_spins - s2) // 2
    if (n_spins - s2) % 2 or half < 0:
        return 0
    return math.comb(n_spins, half) - (math.comb(n_spins, half - 1) if half >= 1 else 0)


def spin_matrices(s2: int) -> dict[str, np.ndarray]:
    """Dense S_x, S_y^2-friendly ladder matrices for total spin s = s2/2.

    Basis ordered m = -s ... s.  Returns real S_x, S_z, and the real
    matrices S_x^2 and S_y^2."""
    s = s2 / 2.0
    dim = s2 + 1
    mvals = np.array([-s + k for k in range(dim)])
    sz = np.diag(mvals)
    cplus = np.sqrt(s * (s + 1) - mvals[:-1] * (mvals[:-1] + 1))
    sp = np.zeros((dim, dim))
    sp[np.arange(1, dim), np.arange(dim - 1)] = cplus
    sm = sp.T
    sx = 0.5 * (sp + sm)
    sx2 = sx @ sx
    sy2 = -0.25 * ((sp - sm) @ (sp - sm))
    return {"sx": sx, "sz": sz, "sx2": sx2, "sy2": sy2}


def build_block(spec: CollectiveModelSpec, s2: int) -> np.ndarray:
    """(2s+1)^2 Hamiltonian block from the standard ladder matrix elements."""
    if s2 > spec.n_spins or (s2 - spec.n_spins) % 2:
        raise ValueError("inadmissible total spin for this N")
    ops = spin_matrices(s2)
    n = spec.n_spins
    if spec.family == "lmg":
        return (-(ops["sx2"] + spec.gamma * ops["sy2"]) / n + spec.h * ops["sz"])
    k = mn_constant(spec.m_order, spec.n_order)
    x = np.linalg.matrix_power(2.0 * ops["sx"] / n, spec.m_order)
    z = np.linalg.matrix_power(np.diag(2.0 * np.diag(ops["sz"]) / n), spec.n_order)
    return -n * (math.cos(spec.omega) * x + k * math.sin(spec.omega) * z)


@dataclass
class BlockSpectrum:
    """Eigen-decomposition of every admissible total-spin block."""

    spec: CollectiveModelSpec
    s2_list: list[int]
    energies: dict[int, np.ndarray]
    vectors: dict[int, np.ndarray]     # columns are eigenvectors a_{alpha; m}
    mult: MultiplicityTable

    @property
    def e_min(self) -> float:
        return min(e.min() for e in self.energies.values())


def block_spectrum(spec: CollectiveModelSpec) -> BlockSpectrum:
    mult = multiplicities(spec.n_spins)
    s2_list = sorted(mult.counts)
    energies = {}
    vectors = {}
    for s2 in s2_list:
        w, v = np.linalg.eigh(build_block(spec, s2))
        energies[s2] = w
        vectors[s2] = v
    return BlockSpectrum(spec=spec, s2_list=s2_list, energies=energies,
                         vectors=vectors, mult=mult)


def partition_and_observables(spec: CollectiveModelSpec,
                              spectrum: BlockSpectrum | None = None) -> dict:
    """Z (as log), internal energy, heat capacity and both order parameters.

    C_v comes from energy fluctuations beta^2 (<H^2>-<H>^2); order
    parameters from second moments of S_x and S_z."""
    sp = spectrum or block_spectrum(spec)
    beta = spec.beta
    n = spec.n_spins
    e0 = sp.e_min
    z = 0.0
    e_sum = 0.0
    e2_sum = 0.0
    sx2_sum = 0.0
    sz2_sum = 0.0
    for s2 in sp.s2_list:
        d = float(sp.mult.d(s2))
        en = sp.energies[s2]
        w = np.exp(-beta * (en - e0))
        z += d * w.sum()
        e_sum += d * (w * en).sum()
        e2_sum += d * (w * en ** 2).sum()
        ops = spin_matrices(s2)
        v = sp.vectors[s2]
        sx2_diag = np.einsum("ma,mk,ka->a", v, ops["sx2"], v, optimize=True)
        sz2_diag = np.einsum("ma,mk,ka->a", v, np.diag(np.diag(ops["sz"]) ** 2), v, optimize=True)
        sx2_sum += d * (w * sx2_diag).sum()
        sz2_sum += d * (w * sz2_diag).sum()
    u = e_sum / z
    cv = beta ** 2 * (e2_sum / z - u ** 2)
    return {
        "log_z": math.log(z) - beta * e0,
        "energy": u,
        "heat_capacity": cv,
        "m_x": 2.0 * math.sqrt(max(sx2_sum / z, 0.0)) / n,
        "m_z": 2.0 * math.sqrt(max(sz2_sum / z, 0.0)) / n,
    }


def ground_state_order_parameter(n_spins: int, gamma: float, h: float) -> float:
    """m_x of the LMG ground state (maximum-spin block), banded solver.

    The block couples m to m+-2 only, so the two m-parity sectors are
    tridiagonal; solve each for its lowest state and take the lower one.
    """
    from scipy.linalg import eigh_tridiagonal

    s2 = n_spins
    s = s2 / 2.0
    n = n_spins
    mvals = np.arange(-s, s + 1)
    diag_h = -((1 + gamma) * (s * (s + 1) - mvals ** 2) / 2.0) / n + h * mvals
    cp = np.sqrt(s * (s + 1) - mvals[:-1] * (mvals[:-1] + 1))
    off2 = -((1 - gamma) / 4.0) * cp[:-1] * cp[1:] / n  # couples m, m+2
    best = None
    for start in (0, 1):
        idx = np.arange(start, s2 + 1, 2)
        if idx.size == 0:
            continue
        d = diag_h[idx]
        e = off2[idx[:-1]] if idx.size > 1 else np.empty(0)
        w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
        if best is None or w[0] < best[0]:
            vec = np.zeros(s2 + 1)
            vec[idx] = v[:, 0]
            best = (w[0], vec)
    vec = best[1]
    sx2_diag = (s * (s + 1) - mvals ** 2) / 2.0
    val = float(vec @ (sx2_diag * vec))
    cpp = cp[:-1] * cp[1:] / 4.0
    val += 2.0 * float(vec[:-2] @ (cpp * vec[2:]))
    return 2.0 * math.sqrt(max(val, 0.0)) / n
