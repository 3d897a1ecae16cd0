"""Swendsen-Wang simulation with Fortuin-Kasteleyn cluster cut statistics.

Bonds between aligned neighbours are activated with p = 1 - exp(-2K); the
resulting clusters flip independently.  For a cylinder cut between two
columns we record how many clusters live on both sides and into how many
pieces they disintegrate when the cut bonds are removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


@dataclass
class SpinField:
    """rows x cols array of +-1 spins on a cylinder (periodic vertical)."""

    spins: np.ndarray
    periodic_vertical: bool = True

    @property
    def rows(self) -> int:
        return self.spins.shape[0]

    @property
    def cols(self) -> int:
        return self.spins.shape[1]

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "SpinField":
        return cls(spins=rng.choice(np.array([-1, 1], dtype=np.int8), size=(rows, cols)))

    @classmethod
    def aligned(cls, rows: int, cols: int) -> "SpinField":
        return cls(spins=np.ones((rows, cols), dtype=np.int8))


@dataclass
class ClusterLabeling:
    """Per-site cluster ids plus the active-bond masks that generated them."""

    labels: np.ndarray             # rows x cols ints
    horiz_active: np.ndarray       # rows x (cols-1) bools, bond (r,c)-(r,c+1)
    vert_active: np.ndarray        # rows x cols bools, bond (r,c)-(r+1 mod rows,c)
    n_clusters: int


def _component_labels(rows: int, cols: int, horiz: np.ndarray,
                      vert: np.ndarray, periodic: bool) -> tuple[np.ndarray, int]:
    n = rows * cols
    idx = np.arange(n).reshape(rows, cols)
    src = []
    dst = []
    if cols > 1:
        src.append(idx[:, :-1][horiz])
        dst.append(idx[:, 1:][horiz])
    vr = vert if periodic and rows > 2 else vert[: rows - 1]
    up = idx
    down = np.roll(idx, -1, axis=0)
    src.append(up[: vr.shape[0]][vr])
    dst.append(down[: vr.shape[0]][vr])
    src = np.concatenate(src) if src else np.empty(0, dtype=int)
    dst = np.concatenate(dst) if dst else np.empty(0, dtype=int)
    adj = sp.coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    n_comp, labels = connected_components(adj, directed=False)
    return labels.reshape(rows, cols), n_comp


def sw_sweep(fld: SpinField, coupling: float, rng: np.random.Generator) -> tuple[SpinField, ClusterLabeling]:
    """One Swendsen-Wang update: activate aligned bonds with 1 - exp(-2K),
    label clusters, flip each with probability 1/2."""
    if coupling < 0:
        raise ValueError("ferromagnetic couplings only")
    s = fld.spins
    rows, cols = s.shape
    p = 1.0 - math.exp(-2.0 * coupling)
    aligned_h = s[:, :-1] == s[:, 1:]
    horiz = aligned_h & (rng.random(size=aligned_h.shape) < p)
    aligned_v = s == np.roll(s, -1, axis=0)
    vert = aligned_v & (rng.random(size=s.shape) < p)
    labels, n_comp = _component_labels(rows, cols, horiz, vert, fld.periodic_vertical)
    flips = rng.random(n_comp) < 0.5
    sign = np.where(flips[labels], -1, 1).astype(np.int8)
    return (SpinField(spins=s * sign, periodic_vertical=fld.periodic_vertical),
            ClusterLabeling(labels=labels, horiz_active=horiz, vert_active=vert,
                            n_clusters=n_comp))


def cut_statistics(labeling: ClusterLabeling, cut_col: int,
                   periodic: bool = True) -> tuple[int, int]:
    """(clusters_cut, pieces) for the cut between columns cut_col, cut_col+1.

    clusters_cut counts the cluster ids present on both sides; pieces the
    connected components those clusters fall apart into once the active
    bonds crossing the cut are removed.
    """
    labels = labeling.labels
    rows, cols = labels.shape
    if not 0 <= cut_col < cols - 1:
        raise ValueError("cut_col out of range")
    left_ids = np.unique(labels[:, : cut_col + 1])
    right_ids = np.unique(labels[:, cut_col + 1:])
    cut_ids = np.intersect1d(left_ids, right_ids, assume_unique=True)
    if cut_ids.size == 0:
        return 0, 0
    horiz = labeling.horiz_active.copy()
    horiz[:, cut_col] = False
    sub_labels, _ = _component_labels(rows, cols, horiz, labeling.vert_active, periodic)
    pieces = 0
    flat = labels.reshape(-1)
    sub = sub_labels.reshape(-1)
    for cid in cut_ids:
        pieces += int(np.unique(sub[flat == cid]).size)
    return int(cut_ids.size), pieces


@dataclass
class ClusterRunResult:
    coupling: float
    rows: int
    cols: int
    clusters_cut_mean: float
    clusters_cut_err: float
    pieces_mean: float
    pieces_err: float
    m_abs_mean: float

    def csv_row(self) -> str:
        return ",".join(f"{v:.10g}" for v in
                        (self.coupling, self.rows, self.cols,
                         self.clusters_cut_mean, self.clusters_cut_err,
                         self.pieces_mean, self.pieces_err, self.m_abs_mean))


CSV_HEADER = "K,rows,cols,clusters_cut_mean,clusters_cut_err,pieces_mean,pieces_err,m_abs_mean"


def run_cut_study(coupling: float, rows: int, cols: int | None = None,
                  n_sweeps: int = 2000, n_equil: int | None = None,
                  seed: int = 0) -> ClusterRunResult:
    """Elongated-cylinder cluster-cut study; the cut sits mid-cylinder."""
    from .sampler import bin_curve, plateau_error

    cols = 16 * rows if cols is None else cols
    n_equil = max(50, n_sweeps // 10) if n_equil is None else n_equil
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    fld = SpinField.random(rows, cols, rng)
    cut = cols // 2 - 1
    ncut = np.empty(n_sweeps)
    npieces = np.empty(n_sweeps)
    mabs = np.empty(n_sweeps)
    for k in range(n_equil + n_sweeps):
        fld, lab = sw_sweep(fld, coupling, rng)
        if k >= n_equil:
            c, p = cut_statistics(lab, cut, fld.periodic_vertical)
            ncut[k - n_equil] = c
            npieces[k - n_equil] = p
            mabs[k - n_equil] = abs(fld.spins.mean())
    err_c, _, _ = plateau_error(bin_curve(ncut))
    err_p, _, _ = plateau_error(bin_curve(npieces))
    return ClusterRunResult(coupling=coupling, rows=rows, cols=cols,
                            clusters_cut_mean=float(ncut.mean()), clusters_cut_err=err_c,
                            pieces_mean=float(npieces.mean()), pieces_err=err_p,
                            m_abs_mean=float(mabs.mean()))


def metropolis_reference(rows: int, cols: int, coupling: float, n_sweeps: int,
                         seed: int = 0, periodic_vertical: bool = True) -> float:
    """<|m|> from single-flip Metropolis (independent check of sw_sweep)."""
    rng = np.random.Generator(np.random.Philox(key=[seed, 1]))
    s = SpinField.random(rows, cols, rng).spins.astype(np.int64)
    n_equil = n_sweeps // 5
    total = 0.0
    count = 0
    for sweep in range(n_sweeps + n_equil):
        for _ in range(rows * cols):
            r = int(rng.integers(rows))
            c = int(rng.integers(cols))
            nb = 0
            if c > 0:
                nb += s[r, c - 1]
            if c < cols - 1:
                nb += s[r, c + 1]
            if rows > 1:
                if periodic_vertical and rows > 2:
                    nb += s[(r - 1) % rows, c] + s[(r + 1) % rows, c]
                else:
                    if r > 0:
                        nb += s[r - 1, c]
                    if r < rows - 1:
                        nb += s[r + 1, c]
            delta = 2.0 * coupling * s[r, c] * nb
            if delta <= 0 or rng.random() < math.exp(-delta):
                s[r, c] = -s[r, c]
        if sweep >= n_equil:
            total += abs(s.mean())
            count += 1
    return total / count
