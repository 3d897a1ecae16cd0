"""Exact Ising partition functions via non-unitary matchgates on a fermionic
Gaussian state.

The tensor network of the partition function is contracted as a circuit of
quadratic gates acting on rows+cols fermionic modes that run diagonally
across the lattice: each site applies an entangling two-mode gate, each
bond a single-mode bond-strength gate H(K) = exp(-K) a a^+ + sinh(K).  The
gates are non-unitary, so the state is tracked as a covariance matrix of
all quadratic expectation values plus an accumulated scalar log-weight;
every update closes after the Wick 4-point rule
<abcd> = <ab><cd> - <ac><bd> + <ad><bc>.

Fixed boundaries enter through infinite-strength bonds that pin relative
orientations (renormalized to (1 +- s s'), never through diverging
exponentials), with the global-flip factor 1/2 applied at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core.geometry import lattice_bonds, site_index
from .core.logweight import LogWeight
from .core.models import INFINITE_BOND, LatticeModelSpec

LN2 = math.log(2.0)
_SQ2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Matchgate:
    """O = x*I + y*(b^+ b) with b = sum_k u_k a_k + v_k a_k^+ (b^2 = 0).

    kinds: 'entangle' (two-mode site gate), 'bond' (finite K), 'constraint'
    (infinite antiferromagnetic bond), 'project' (vacuum projector).
    """

    kind: str
    modes: tuple[int, ...]
    x: float
    y: float
    u: tuple[float, ...]
    v: tuple[float, ...]

    @classmethod
    def entangle(cls, p: int, m: int) -> "Matchgate":
        return cls("entangle", (p, m), 0.0, 2.0, (_SQ2, _SQ2), (-_SQ2, _SQ2))

    @classmethod
    def bond_strength(cls, mode: int, coupling: float) -> "Matchgate":
        """H(K) = exp(-K) a a^+ + sinh(K) I on the bond's outgoing mode.

        Infinite couplings are renormalized: +inf is the identity (dropped
        by the caller), -inf becomes the parity gate diag(1, -1)."""
        if math.isinf(coupling):
            if coupling > 0:
                return cls("constraint", (mode,), 1.0, 0.0, (0.0,), (1.0,))
            return cls("constraint", (mode,), -1.0, 2.0, (0.0,), (1.0,))
        return cls("bond", (mode,), math.sinh(coupling), math.exp(-coupling), (0.0,), (1.0,))

    @classmethod
    def vacuum_project(cls, mode: int) -> "Matchgate":
        return cls("project", (mode,), 0.0, 1.0, (0.0,), (1.0,))


@dataclass
class GaussianFermionState:
    """Ordered two-point table gamma[i,j] = <c_i c_j> with operator order
    c = (a_1..a_n, a_1^+..a_n^+), plus the accumulated scalar log-weight."""

    n_modes: int
    gamma: np.ndarray = field(default=None)
    log_weight: float = 0.0
    dead: bool = False

    def __post_init__(self):
        if self.gamma is None:
            g = np.zeros((2 * self.n_modes, 2 * self.n_modes))
            g[: self.n_modes, self.n_modes:] = np.eye(self.n_modes)
            self.gamma = g

    def four_point(self, i: int, j: int, k: int, l: int) -> float:
        """<c_i c_j c_k c_l> by the Wick 4-point expansion."""
        g = self.gamma
        return g[i, j] * g[k, l] - g[i, k] * g[j, l] + g[i, l] * g[j, k]

    def four_point_pfaffian(self, i: int, j: int, k: int, l: int) -> float:
        """Same 4-point function via the Pfaffian of the restricted
        ordered-pair matrix (cross-validation route)."""
        from .pfaffian.skew import log_pfaffian

        idx = (i, j, k, l)
        m = np.zeros((4, 4))
        for a in range(4):
            for b in range(a + 1, 4):
                m[a, b] = self.gamma[idx[a], idx[b]]
                m[b, a] = -m[a, b]
        return log_pfaffian(m).to_float()


def apply_gate(state: GaussianFermionState, gate: Matchgate) -> GaussianFermionState:
    """<O c_i c_j O>/<O O> update of every covariance entry, log-weight
    accumulating the normalization <O O>.

    A vanished normalization marks the state as projected out (exact-zero
    weight), not an error."""
    if state.dead:
        return state
    n = state.n_modes
    g = state.gamma
    u = np.zeros(n)
    v = np.zeros(n)
    for mode, uk, vk in zip(gate.modes, gate.u, gate.v):
        u[mode] = uk
        v[mode] = vk
    x, y = gate.x, gate.y

    w = np.concatenate([u, v])       # b = w . c
    wd = np.concatenate([v, u])      # b^+ = wd . c
    mu = float(u @ u + v @ v)
    anti_b = np.concatenate([v, u])   # {b, c_i}
    anti_bd = np.concatenate([u, v])  # {b^+, c_i}

    bc = g.T @ w      # <b c_i>
    cb = g @ w        # <c_i b>
    cbd = g @ wd      # <c_i b^+>
    bdc = g.T @ wd    # <b^+ c_i>
    p0 = float(wd @ (g @ w))          # <b^+ b>

    nu2 = x * x + 2.0 * x * y * p0 + y * y * mu * p0
    if nu2 <= 0.0:
        state.dead = True
        state.log_weight = -math.inf
        return state

    pcc = p0 * g - np.outer(bdc, bc) + np.outer(bc, bdc)
    ccp = p0 * g - np.outer(cbd, cb) + np.outer(cb, cbd)
    pccp = (mu * ccp - mu * np.outer(cb, anti_bd) + mu * np.outer(anti_bd, cb)
            + p0 * (np.outer(anti_b, anti_bd) - np.outer(anti_bd, anti_b)))
    state.gamma = (x * x * g + x * y * (pcc + ccp) + y * y * pccp) / nu2
    state.log_weight += 0.5 * math.log(nu2)
    return state


@dataclass(frozen=True)
class ModeLayout:
    """rows + cols fermionic modes running diagonally across the lattice.

    Row wires carry the horizontal-bond indices, column wires the vertical
    ones.  Along the anti-diagonal sweep the wires form a weave: the row-r
    and column-c wires cross exactly at site (r,c), where the entangling
    gate acts, so every gate hits two *neighbouring* wire positions and no
    Jordan-Wigner strings ever appear.  Fermionic mode labels are wire
    positions; the wire->position map is updated by a swap at each crossing.
    """

    rows: int
    cols: int

    @property
    def n_modes(self) -> int:
        return self.rows + self.cols

    def initial_positions(self) -> dict[str, list[int]]:
        """pos_h[r], pos_v[c] just before the sweep starts: the front reads
        h(rows-1) ... h(0) v(0) ... v(cols-1) from left to right."""
        pos_h = [self.rows - 1 - r for r in range(self.rows)]
        pos_v = [self.rows + c for c in range(self.cols)]
        return {"h": pos_h, "v": pos_v}


def circuit_for_region(layout: ModeLayout, sites: set[int],
                       couplings: dict[tuple[int, int], float]) -> list[Matchgate]:
    """Gate sequence contracting the Boltzmann sum over `sites` with the
    given bonds (absent bonds force the corresponding wire to vacuum).

    All lattice points are swept in anti-diagonal order; absent sites still
    swap their (vacuum) wires so the weave bookkeeping stays consistent.
    """
    rows, cols = layout.rows, layout.cols
    pos = layout.initial_positions()
    pos_h, pos_v = pos["h"], pos["v"]
    gates: list[Matchgate] = []
    for d in range(rows + cols - 1):
        for r in range(min(d, rows - 1), -1, -1):
            c = d - r
            if c < 0 or c >= cols:
                continue
            ph, pv = pos_h[r], pos_v[c]
            if pv != ph + 1:
                raise AssertionError("wire weave out of order")  # invariant
            s = site_index(r, c, cols)
            present = s in sites
            if present:
                gates.append(Matchgate.entangle(ph, pv))
            # wires cross at the site: the row wire continues to the right
            pos_h[r], pos_v[c] = pv, ph
            if not present:
                continue
            if c + 1 < cols:
                k = couplings.get((s, site_index(r, c + 1, cols)))
                if k is None:
                    gates.append(Matchgate.vacuum_project(pos_h[r]))
                elif not (math.isinf(k) and k > 0):
                    gates.append(Matchgate.bond_strength(pos_h[r], k))
            if r + 1 < rows:
                k = couplings.get((s, site_index(r + 1, c, cols)))
                if k is None:
                    gates.append(Matchgate.vacuum_project(pos_v[c]))
                elif not (math.isinf(k) and k > 0):
                    gates.append(Matchgate.bond_strength(pos_v[c], k))
    return gates


def run_circuit(layout: ModeLayout, gates: list[Matchgate]) -> LogWeight:
    """<vac| gates |vac> magnitude: apply all gates, then project every mode
    back onto the vacuum.  Partition sums are positive, so the sign is +1."""
    state = GaussianFermionState(layout.n_modes)
    for gate in gates:
        apply_gate(state, gate)
        if state.dead:
            return LogWeight.ZERO
    for mode in range(layout.n_modes):
        apply_gate(state, Matchgate.vacuum_project(mode))
        if state.dead:
            return LogWeight.ZERO
    return LogWeight(state.log_weight, 1)


def region_log_z(model: LatticeModelSpec, sites: set[int],
                 couplings: dict[tuple[int, int], float],
                 n_constraints: int = 0) -> LogWeight:
    """log of the Boltzmann sum over `sites` with per-bond couplings.

    Bonds with +-inf coupling are the boundary-fixing constraints entering
    as renormalized (1 +- s s') factors; the caller passes their count so
    the 2^n_constraints * 2 (global flip) factor is removed here."""
    if model.kind != "ising":
        raise ValueError("matchgate engine supports the Ising model only")
    layout = ModeLayout(model.rows, model.cols)
    gates = circuit_for_region(layout, sites, couplings)
    raw = run_circuit(layout, gates)
    if raw.sign == 0:
        return raw
    shift = (n_constraints + 1) * LN2 if n_constraints else 0.0
    return LogWeight(raw.log_magnitude - shift, raw.sign)


def _chain_constraint_couplings(boundary_sites: list[int],
                                boundary_states: list[int],
                                couplings: dict[tuple[int, int], float],
                                cols: int) -> int:
    """Replace the bonds along a connected chain/ring of fixed sites by
    relative-orientation constraints.  Returns the constraint count."""
    m = len(boundary_sites)
    seen = set()
    for k in range(m if m > 2 else m - 1):
        s = boundary_sites[k]
        t = boundary_sites[(k + 1) % m]
        if k + 1 == m and not _adjacent(s, t, cols):
            continue  # open chain: no wrap-around bond
        if not _adjacent(s, t, cols):
            raise ValueError("fixed boundary sites must form a chain of neighbours")
        bond = (s, t) if s < t else (t, s)
        if bond in seen:
            continue
        seen.add(bond)
        same = boundary_states[k] == boundary_states[(k + 1) % m]
        couplings[bond] = INFINITE_BOND if same else -INFINITE_BOND
    return len(seen)


def _adjacent(s: int, t: int, cols: int) -> bool:
    rs, cs = divmod(s, cols)
    rt, ct = divmod(t, cols)
    return abs(rs - rt) + abs(cs - ct) == 1


def ising_partition(model: LatticeModelSpec,
                    boundary_sites: list[int] | None = None,
                    boundary_states: list[int] | None = None,
                    sites: set[int] | None = None) -> LogWeight:
    """log Z of the (open) lattice with an optional fixed border.

    The border must be an ordered chain (or closed ring) of adjacent sites;
    its internal bonds are excluded from the weight, as everywhere in the
    partial partition functions, and replaced by orientation constraints.
    boundary_states are in {0,1} with spin sigma = 1 - 2*state.
    """
    if model.vertical_bc != "open":
        raise ValueError("matchgate engine handles open boundaries")
    cols = model.cols
    all_sites = sites if sites is not None else set(range(model.rows * cols))
    bond_set = {}
    bset = set(boundary_sites or [])
    for i, j in lattice_bonds(model.rows, cols, "open"):
        if i in all_sites and j in all_sites:
            if i in bset and j in bset:
                continue  # border-internal bond: replaced by a constraint
            bond_set[(i, j)] = model.coupling
    n_con = 0
    if boundary_sites:
        n_con = _chain_constraint_couplings(list(boundary_sites),
                                            list(boundary_states), bond_set, cols)
    return region_log_z(model, all_sites, bond_set, n_con)
