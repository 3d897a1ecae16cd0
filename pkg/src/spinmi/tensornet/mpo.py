"""Matrix product operator form of the column transfer operator, plus the
small MPS toolbox (compression, addition, overlaps) used by the
power-iteration eigensolver.

MPS site tensors have indices (phys, left_bond, right_bond); the physical
index is the bond-factorization index, dimension r <= q.  Dense vectors over
configurations follow the row-0-least-significant digit convention of
spinmi.tensornet.transfer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.models import LatticeModelSpec
from .factorize import BondFactorization, factorize_bond


# ---------------------------------------------------------------- MPS utils

def mps_product_state(rows: int, r: int, component: int = 0) -> list[np.ndarray]:
    t = np.zeros((r, 1, 1))
    t[component, 0, 0] = 1.0
    return [t.copy() for _ in range(rows)]


def mps_dense(tensors: list[np.ndarray]) -> np.ndarray:
    """Contract to a dense vector, row 0 least significant."""
    cur = tensors[0][:, 0, :]  # (p, chi)
    for t in tensors[1:]:
        cur = np.einsum("ac,pcd->apd", cur, t)
        cur = cur.reshape(-1, cur.shape[-1])
    vec = cur[:, 0]
    # cur index is row-0-major; convert to row-0 least significant
    dims = tuple(t.shape[0] for t in tensors)
    return np.ascontiguousarray(vec.reshape(dims).transpose(tuple(range(len(dims) - 1, -1, -1)))).reshape(-1)


def mps_from_dense(vec: np.ndarray, dims: tuple[int, ...], max_bond: int | None = None):
    """SVD split of a dense vector (row 0 least significant) into an MPS.

    Returns (tensors, discarded_weight)."""
    n = len(dims)
    psi = vec.reshape(tuple(reversed(dims))).transpose(tuple(range(n - 1, -1, -1)))
    # psi now has axes (row0, row1, ..., row_{n-1})
    tensors = []
    discarded = 0.0
    chi = 1
    rest = psi.reshape(1, -1)
    for k in range(n - 1):
        m = rest.reshape(chi * dims[k], -1)
        u, s, vt = np.linalg.svd(m, full_matrices=False)
        keep = len(s)
        if max_bond is not None:
            keep = min(keep, max_bond)
        w = s ** 2
        total = w.sum()
        if total > 0:
            discarded += w[keep:].sum() / total
        u, s, vt = u[:, :keep], s[:keep], vt[:keep]
        tensors.append(np.ascontiguousarray(u.reshape(chi, dims[k], keep).transpose(1, 0, 2)))
        rest = s[:, None] * vt
        chi = keep
    tensors.append(np.ascontiguousarray(rest.reshape(chi, dims[-1], 1).transpose(1, 0, 2)))
    return tensors, discarded


def mps_inner(a: list[np.ndarray], b: list[np.ndarray]) -> float:
    env = np.ones((1, 1))
    for ta, tb in zip(a, b):
        env = np.einsum("ab,pac,pbd->cd", env, ta, tb, optimize=True)
    return float(env[0, 0])


def mps_norm(a: list[np.ndarray]) -> float:
    return math.sqrt(max(mps_inner(a, a), 0.0))


def mps_scale(a: list[np.ndarray], factor: float) -> list[np.ndarray]:
    out = [t.copy() for t in a]
    out[0] = out[0] * factor
    return out


def mps_add(a: list[np.ndarray], b: list[np.ndarray]) -> list[np.ndarray]:
    """Direct-sum addition of two open-chain MPSs."""
    n = len(a)
    out = []
    for k, (ta, tb) in enumerate(zip(a, b)):
        p = ta.shape[0]
        l = ta.shape[1] + tb.shape[1] if k > 0 else 1
        r = ta.shape[2] + tb.shape[2] if k < n - 1 else 1
        t = np.zeros((p, l, r))
        if k == 0:
            t[:, :, : ta.shape[2]] = ta
            t[:, :, ta.shape[2]:] = tb
        elif k == n - 1:
            t[:, : ta.shape[1], :] = ta
            t[:, ta.shape[1]:, :] = tb
        else:
            t[:, : ta.shape[1], : ta.shape[2]] = ta
            t[:, ta.shape[1]:, ta.shape[2]:] = tb
        out.append(t)
    return out


def mps_compress(tensors: list[np.ndarray], max_bond: int) -> tuple[list[np.ndarray], float, float]:
    """Left-to-right SVD truncation after a right-canonicalization sweep.

    Returns (tensors, log_norm, discarded_weight); the returned MPS has unit
    norm and log_norm holds the removed scale."""
    n = len(tensors)
    ts = [t.copy() for t in tensors]
    # right-canonicalize: sweep right to left with LQ
    for k in range(n - 1, 0, -1):
        p, l, r = ts[k].shape
        m = ts[k].transpose(1, 0, 2).reshape(l, p * r)
        q_, rfac = np.linalg.qr(m.T)
        newl = q_.shape[1]
        ts[k] = np.ascontiguousarray(q_.T.reshape(newl, p, r).transpose(1, 0, 2))
        ts[k - 1] = np.einsum("pab,bc->pac", ts[k - 1], rfac.T)
    # left-to-right truncation
    discarded = 0.0
    log_norm = 0.0
    for k in range(n):
        p, l, r = ts[k].shape
        m = ts[k].transpose(1, 0, 2).reshape(l * p, r)
        if k == n - 1:
            nrm = np.linalg.norm(m)
            if nrm > 0:
                ts[k] = ts[k] / nrm
                log_norm += math.log(nrm)
            break
        u, s, vt = np.linalg.svd(m, full_matrices=False)
        keep = min(len(s), max_bond)
        w = s ** 2
        total = w.sum()
        if total > 0:
            discarded += w[keep:].sum() / total
        u, s, vt = u[:, :keep], s[:keep], vt[:keep]
        snorm = np.linalg.norm(s)
        if snorm > 0:
            s = s / snorm
            log_norm += math.log(snorm)
        ts[k] = np.ascontiguousarray(u.reshape(l, p, keep).transpose(1, 0, 2))
        carry = (s[:, None] * vt)
        ts[k + 1] = np.einsum("ab,pbc->pac", carry, ts[k + 1])
    return ts, log_norm, discarded


# ---------------------------------------------------------------- MPO

@dataclass
class TransferOperator:
    """Per-row 4-index tensors (v_down, v_up, l_in, l_out) of one lattice column.

    Coupling weights h are attached to the outgoing horizontal leg and the
    upward vertical leg, so each lattice bond carries h exactly once.
    """

    tensors: list[np.ndarray]
    rows: int
    bc: str
    fac: BondFactorization

    @classmethod
    def build(cls, model: LatticeModelSpec, rows: int | None = None) -> "TransferOperator":
        rows = model.rows if rows is None else rows
        fac = factorize_bond(model)
        g, h = fac.g, fac.h
        periodic = model.vertical_bc == "periodic" and rows > 2
        bulk = np.einsum("ds,us,is,os->duio", g, g * h[:, None], g, g * h[:, None])
        tensors = []
        for i in range(rows):
            if periodic or (0 < i < rows - 1):
                tensors.append(bulk)
            elif rows == 1:
                t = np.einsum("is,os->io", g, g * h[:, None])[None, None, :, :]
                tensors.append(t)
            elif i == 0:
                t = np.einsum("us,is,os->uio", g * h[:, None], g, g * h[:, None])[None, :, :, :]
                tensors.append(t)
            else:  # top row, open: no upward bond
                t = np.einsum("ds,is,os->dio", g, g, g * h[:, None])[:, None, :, :]
                tensors.append(t)
        return cls(tensors=tensors, rows=rows, bc="periodic" if periodic else "open", fac=fac)

    def apply(self, mps: list[np.ndarray], max_bond: int) -> tuple[list[np.ndarray], float, float]:
        """compress(T |psi>): returns (mps, log_norm, discarded)."""
        raw: list[np.ndarray] = []
        for w, a in zip(self.tensors, mps):
            # (d,u,i,o) x (i,l,r) -> (o, d*l, u*r)
            t = np.einsum("duio,ilr->odlur", w, a, optimize=True)
            o, d, l, u, r = t.shape
            raw.append(t.reshape(o, d * l, u * r))
        if self.bc == "periodic":
            seam = self.tensors[0].shape[0]
            total: list[np.ndarray] | None = None
            d0 = raw[0].shape[1] // mps[0].shape[1]
            for b in range(seam):
                branch = [t.copy() for t in raw]
                l0 = mps[0].shape[1]
                branch[0] = raw[0][:, b * l0:(b + 1) * l0, :]
                rn = mps[-1].shape[2]
                branch[-1] = raw[-1][:, :, b * rn:(b + 1) * rn]
                total = branch if total is None else mps_add(total, branch)
            raw = total
        return mps_compress(raw, max_bond)

    def expectation(self, mps: list[np.ndarray]) -> float:
        """<psi| T |psi> for an open-chain |psi> (not necessarily unit norm)."""
        branches = range(self.tensors[0].shape[0]) if self.bc == "periodic" else (None,)
        acc = 0.0
        for b in branches:
            env = np.ones((1, 1, 1))  # (bra_bond, mpo_vertical, ket_bond)
            for k, (w, a) in enumerate(zip(self.tensors, mps)):
                wt = w
                if b is not None:
                    if k == 0:
                        wt = wt[b:b + 1]
                    if k == len(mps) - 1:
                        wt = wt[:, b:b + 1]
                env = np.einsum("xdy,oxa,duio,iyb->aub", env, a, wt, a, optimize=True)
            acc += float(env[0, 0, 0])
        return acc


def boundary_column_mps(model: LatticeModelSpec, rows: int | None = None,
                        incoming: bool = False) -> list[np.ndarray]:
    """The edge column of a finite lattice as an MPS over its horizontal leg.

    incoming=False gives the leftmost column (emits a horizontal leg with its
    h weight); incoming=True the rightmost (bare consuming leg).  The MPS
    bonds are the column's vertical legs.  Open vertical boundaries only.
    """
    rows = model.rows if rows is None else rows
    fac = factorize_bond(model)
    g, h = fac.g, fac.h
    gh = g * h[:, None]
    phys = g if incoming else gh
    out = []
    for i in range(rows):
        down = g if i > 0 else np.ones((1, g.shape[1]))
        up = gh if i < rows - 1 else np.ones((1, g.shape[1]))
        out.append(np.einsum("os,ds,us->odu", phys, down, up))
    return out


def full_lattice_log_z(model: LatticeModelSpec, cols: int, max_bond: int = 10 ** 9) -> float:
    """log Z of the finite rows x cols open lattice by repeated MPO application.

    With the default unbounded max_bond this is exact and serves as the
    small-instance audit of the MPO machinery against enumeration.
    """
    if model.vertical_bc != "open":
        raise ValueError("full_lattice_log_z audits the open-boundary lattice")
    if cols < 2:
        raise ValueError("need at least two columns")
    op = TransferOperator.build(model)
    psi = boundary_column_mps(model)
    log_norm = 0.0
    for _ in range(cols - 2):
        psi, ln, _ = op.apply(psi, max_bond)
        log_norm += ln
    cap = boundary_column_mps(model, incoming=True)
    val = mps_inner(cap, psi)
    return log_norm + math.log(abs(val)) if val != 0 else -math.inf
