"""Exhaustive-enumeration oracles.

brute_force_mi is the ground truth every other engine is tested against:
it forms every joint Boltzmann weight explicitly and takes marginals by
explicit partial sums.  enumerate_log_z does the same for partition
functions with arbitrary fixed spins and bond subsets.
"""

from __future__ import annotations

import math

import numpy as np

from .entropy import LN2
from .geometry import Bipartition, lattice_bonds
from .logweight import LogWeight
from .models import INFINITE_BOND, LatticeModelSpec, bond_energy

ENUMERATION_LIMIT = 2 ** 24
_CHUNK = 1 << 14


class BruteForceTooLarge(ValueError):
    pass


def _digits(configs: np.ndarray, n_sites: int, q: int) -> np.ndarray:
    """(len(configs), n_sites) array of base-q digits, site 0 least significant."""
    out = np.empty((configs.size, n_sites), dtype=np.int8)
    rem = configs.copy()
    for k in range(n_sites):
        out[:, k] = rem % q
        rem //= q
    return out


def _bond_energy_table(model: LatticeModelSpec, coupling: float | None = None) -> np.ndarray:
    q = model.q
    tab = np.empty((q, q))
    for a in range(q):
        for b in range(q):
            tab[a, b] = bond_energy(model, a, b, coupling)
    return tab


def _part_energies(model: LatticeModelSpec, sites: tuple[int, ...], bonds, tab) -> np.ndarray:
    """-log Boltzmann weights of all q^len(sites) configs of one part."""
    q = model.q
    pos = {s: k for k, s in enumerate(sites)}
    n = len(sites)
    total = q ** n
    energies = np.zeros(total)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        dig = _digits(idx, n, q)
        e = np.zeros(idx.size)
        for i, j in bonds:
            e += tab[dig[:, pos[i]], dig[:, pos[j]]]
        energies[idx] = e
    return energies


def brute_force_mi(model: LatticeModelSpec, part: Bipartition) -> float:
    """Exact mutual information in bits by full enumeration of Boltzmann weights."""
    q = model.q
    n_sites = part.rows * part.cols
    if q ** n_sites > ENUMERATION_LIMIT:
        raise BruteForceTooLarge(f"{q}^{n_sites} states exceed the enumeration bound")

    sites_a = part.sites_A
    sites_b = part.sites_B
    set_a = set(sites_a)
    tab = _bond_energy_table(model)
    bonds_a, bonds_b, bonds_x = [], [], []
    for i, j in lattice_bonds(part.rows, part.cols, part.vertical_bc):
        if i in set_a and j in set_a:
            bonds_a.append((i, j))
        elif i not in set_a and j not in set_a:
            bonds_b.append((i, j))
        else:
            bonds_x.append((i, j) if i in set_a else (j, i))

    e_a = _part_energies(model, sites_a, bonds_a, tab)
    e_b = _part_energies(model, sites_b, bonds_b, tab)

    pos_a = {s: k for k, s in enumerate(sites_a)}
    pos_b = {s: k for k, s in enumerate(sites_b)}
    na, nb = len(sites_a), len(sites_b)
    dig_b = _digits(np.arange(q ** nb), nb, q)

    def chunk_logw(a_lo: int, a_hi: int) -> np.ndarray:
        idx = np.arange(a_lo, a_hi)
        dig_a = _digits(idx, na, q)
        logw = -e_a[a_lo:a_hi, None] - e_b[None, :]
        for i, j in bonds_x:
            logw -= tab[dig_a[:, pos_a[i]], :][:, dig_b[:, pos_b[j]]]
        return logw

    n_a_conf = q ** na
    row_chunk = max(1, (1 << 22) // (q ** nb))
    m = -np.inf
    for lo in range(0, n_a_conf, row_chunk):
        m = max(m, chunk_logw(lo, min(lo + row_chunk, n_a_conf)).max())

    z = 0.0
    wlogw = 0.0
    p_a = np.zeros(n_a_conf)
    p_b = np.zeros(q ** nb)
    for lo in range(0, n_a_conf, row_chunk):
        hi = min(lo + row_chunk, n_a_conf)
        logw = chunk_logw(lo, hi)
        w = np.exp(logw - m)
        z += w.sum()
        wlogw += (w * logw).sum()
        p_a[lo:hi] = w.sum(axis=1)
        p_b += w.sum(axis=0)

    # S_AB = -(sum w*logw / Z - m - log Z) in nats, converted to bits
    s_ab = -(wlogw / z - m - math.log(z)) / LN2
    p_a /= z
    p_b /= z
    s_a = -np.sum(p_a[p_a > 0] * np.log(p_a[p_a > 0])) / LN2
    s_b = -np.sum(p_b[p_b > 0] * np.log(p_b[p_b > 0])) / LN2
    return float(s_a + s_b - s_ab)


def enumerate_log_z(model: LatticeModelSpec,
                    bonds: list[tuple[int, int]],
                    sites: set[int],
                    fixed: dict[int, int] | None = None,
                    couplings: dict[tuple[int, int], float] | None = None) -> LogWeight:
    """log of the Boltzmann sum over `sites` \\ fixed, with `fixed` spins pinned.

    `bonds` lists the included bonds; `couplings` overrides the model
    coupling per bond.  Bonds carrying the +-inf sentinel are treated as
    hard relative-orientation constraints with unit weight (their
    divergent prefactor is the caller's bookkeeping).
    """
    fixed = fixed or {}
    q = model.q
    free = sorted(s for s in sites if s not in fixed)
    n = len(free)
    if q ** n > ENUMERATION_LIMIT:
        raise BruteForceTooLarge(f"{q}^{n} states exceed the enumeration bound")
    pos = {s: k for k, s in enumerate(free)}

    tabs = {}

    def tab_for(k: float) -> np.ndarray:
        if k not in tabs:
            if math.isinf(k):
                # renormalized constraint factor (1 + sign * s s') for ising
                if model.kind != "ising":
                    raise ValueError("infinite bonds only supported for ising")
                sign = 1.0 if k > 0 else -1.0
                sig = np.array([1.0, -1.0])
                tabs[k] = -np.log(np.maximum(1.0 + sign * np.outer(sig, sig), 1e-300))
            else:
                tabs[k] = _bond_energy_table(model, k)
        return tabs[k]

    total = q ** n
    out = LogWeight.ZERO
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        dig = _digits(idx, n, q)
        e = np.zeros(idx.size)
        for i, j in bonds:
            k = model.coupling if couplings is None else couplings.get((i, j), model.coupling)
            tab = tab_for(k)
            si = dig[:, pos[i]] if i in pos else np.full(idx.size, fixed[i], dtype=np.int8)
            sj = dig[:, pos[j]] if j in pos else np.full(idx.size, fixed[j], dtype=np.int8)
            e += tab[si, sj]
        mx = (-e).max()
        chunk = LogWeight(mx + math.log(np.exp(-e - mx).sum()), 1)
        out = out + chunk
    return out


def golden_csv_row(model_name: str, params: dict, mi_bits: float) -> str:
    """One golden-file CSV row, 17 significant digits on the MI value."""
    cols = ",".join(f"{k}={v}" for k, v in params.items())
    return f"{model_name},{cols},{mi_bits:.17g}"
