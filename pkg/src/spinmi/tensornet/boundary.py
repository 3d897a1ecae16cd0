"""Dominant boundary eigenvector of the column transfer operator.

The state is stored as a unit-norm MPS over the factorization index with a
separate eigenvalue estimate and an overlap scale chosen so that the
column-weighted marginal sum_a q_a <state|a>^2 equals Lambda.  Two solvers
sit behind the same contract: exact dense diagonalization (rows*log2 q <= 20,
then truncated to the requested bond dimension) and MPO power iteration with
per-step SVD truncation for anything larger.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from ..core.geometry import BoundaryConfig
from ..core.logweight import LogWeight
from ..core.models import LatticeModelSpec, bond_weight_matrix
from .factorize import BondFactorization, factorize_bond
from .mpo import TransferOperator, mps_compress, mps_dense, mps_from_dense, mps_product_state
from .transfer import DENSE_LIMIT, DenseStripOps


class ConvergenceError(RuntimeError):
    pass


@dataclass
class BoundaryState:
    """Bounded-bond-dimension boundary eigenvector |Lambda> with eigenvalue Lambda."""

    tensors: list[np.ndarray]
    log_lambda: float
    log_scale: float
    model: LatticeModelSpec
    rows: int
    bond_dim: int
    discarded_weight: float
    fac: BondFactorization

    def site_matrices(self, alpha) -> list[np.ndarray]:
        g = self.fac.g
        return [np.tensordot(g[:, s], t, axes=([0], [0])) for s, t in zip(alpha, self.tensors)]

    def overlap(self, alpha) -> LogWeight:
        """u_alpha = scale * <state| (x)_i g(., alpha_i) as a signed log value."""
        if isinstance(alpha, BoundaryConfig):
            alpha = alpha.alpha
        mats = self.site_matrices(alpha)
        vec = mats[0][0]
        logshift = 0.0
        for m in mats[1:]:
            vec = vec @ m
            nrm = np.abs(vec).max()
            if nrm == 0.0:
                return LogWeight.ZERO
            vec /= nrm
            logshift += math.log(nrm)
        val = vec[0]
        if val == 0.0:
            return LogWeight.ZERO
        return LogWeight(self.log_scale + logshift + math.log(abs(val)), 1 if val > 0 else -1)

    def overlaps_dense(self) -> np.ndarray:
        """u values for every column configuration (q^rows <= 2^20)."""
        q = self.model.q
        if q ** self.rows > DENSE_LIMIT:
            raise ValueError("dense overlap table too large")
        psi = mps_dense(self.tensors)
        r = self.fac.rank
        t = psi.reshape((r,) * self.rows)
        gt = self.fac.g.T  # (q, r)
        for i in range(self.rows):
            axis = self.rows - 1 - i
            t = np.moveaxis(np.tensordot(gt, t, axes=([1], [axis])), 0, axis)
        return math.exp(self.log_scale) * np.ascontiguousarray(t).reshape(-1)

    # ------------------------------------------------------------- cache io

    _MAGIC = b"SPMIBST1"

    def save(self, path) -> None:
        """Versioned little-endian binary cache of the boundary state."""
        with open(path, "wb") as fh:
            fh.write(self._MAGIC)
            fh.write(struct.pack("<II", 1, self.rows))
            fh.write(struct.pack("<II", self.fac.rank, self.model.q))
            fh.write(struct.pack("<I", self.bond_dim))
            fh.write(struct.pack("<ddd", self.log_lambda, self.log_scale, self.discarded_weight))
            self.fac.g.astype("<f8").tofile(fh)
            self.fac.h.astype("<f8").tofile(fh)
            for t in self.tensors:
                fh.write(struct.pack("<III", *t.shape))
                t.astype("<f8").tofile(fh)

    @classmethod
    def load(cls, path, model: LatticeModelSpec) -> "BoundaryState":
        with open(path, "rb") as fh:
            if fh.read(8) != cls._MAGIC:
                raise ValueError("not a boundary-state cache file")
            version, rows = struct.unpack("<II", fh.read(8))
            if version != 1:
                raise ValueError(f"unsupported cache version {version}")
            r, q = struct.unpack("<II", fh.read(8))
            (bond_dim,) = struct.unpack("<I", fh.read(4))
            log_lambda, log_scale, discarded = struct.unpack("<ddd", fh.read(24))
            g = np.fromfile(fh, dtype="<f8", count=r * q).reshape(r, q)
            h = np.fromfile(fh, dtype="<f8", count=r)
            tensors = []
            for _ in range(rows):
                shape = struct.unpack("<III", fh.read(12))
                tensors.append(np.fromfile(fh, dtype="<f8", count=int(np.prod(shape))).reshape(shape))
        return cls(tensors=tensors, log_lambda=log_lambda, log_scale=log_scale,
                   model=model, rows=rows, bond_dim=bond_dim,
                   discarded_weight=discarded, fac=BondFactorization(g=g, h=h))


def _marginal_norm_ladder(tensors: list[np.ndarray], fac: BondFactorization,
                          model: LatticeModelSpec, rows: int) -> float:
    """sum_a q_a o_a^2 for the capped overlaps o of a lambda-space MPS,
    contracted row by row (no configuration enumeration)."""
    q = model.q
    bv = bond_weight_matrix(model)
    amats = [np.einsum("ls,lab->sab", fac.g, t) for t in tensors]
    periodic = model.vertical_bc == "periodic" and rows > 2
    if not periodic:
        env = np.einsum("sab,scd->sbd", amats[0], amats[0])  # left bonds have size 1
        for i in range(1, rows):
            env = np.einsum("sbd,st->tbd", env, bv)
            env = np.einsum("tbd,tbe,tdf->tef", env, amats[i], amats[i], optimize=True)
        return float(env.sum(axis=0)[0, 0])
    # periodic: carry the first row's state to close the vertical ring
    carry = np.einsum("sab,scd->sbd", amats[0], amats[0])
    env = np.zeros((q, q) + carry.shape[1:])
    for s in range(q):
        env[s, s] = carry[s]
    for i in range(1, rows):
        env = np.einsum("gsbd,st->gtbd", env, bv)
        env = np.einsum("gtbd,tbe,tdf->gtef", env, amats[i], amats[i], optimize=True)
    total = 0.0
    for g0 in range(q):
        for t0 in range(q):
            total += bv[t0, g0] * env[g0, t0, 0, 0]
    return float(total)


def dominant_boundary(model: LatticeModelSpec, rows: int | None = None, bond_dim: int = 16,
                      method: str = "auto", tol: float = 1e-12,
                      max_iter: int = 10 ** 4) -> BoundaryState:
    """(Lambda, |Lambda>) of the column transfer operator at bond dimension D.

    method 'dense' diagonalizes the full transfer matrix then truncates the
    eigenvector; 'power' runs MPO power iteration with per-step truncation;
    'auto' picks dense whenever the dense path is feasible.
    """
    rows = model.rows if rows is None else rows
    if rows < 1 or bond_dim < 1:
        raise ValueError("rows and bond_dim must be >= 1")
    fac = factorize_bond(model)
    if method == "auto":
        method = "dense" if model.q ** rows <= DENSE_LIMIT else "power"

    if method == "dense":
        ops = DenseStripOps(model, rows)
        lam, v = ops.dominant()
        u = math.sqrt(lam) * v / ops.sqv
        # map the spin-space vector to the factorization-index space
        ginv_t = np.linalg.inv(fac.g.T)  # maps spin axis -> lambda axis
        t = u.reshape((model.q,) * rows)
        for i in range(rows):
            axis = rows - 1 - i
            t = np.moveaxis(np.tensordot(ginv_t, t, axes=([1], [axis])), 0, axis)
        tensors, discarded = mps_from_dense(np.ascontiguousarray(t).reshape(-1),
                                            (fac.rank,) * rows, max_bond=bond_dim)
        tensors, _, _ = mps_compress(tensors, bond_dim)  # unit norm
        state = BoundaryState(tensors=tensors, log_lambda=math.log(lam), log_scale=0.0,
                              model=model, rows=rows, bond_dim=bond_dim,
                              discarded_weight=discarded, fac=fac)
        if discarded > 0.0:
            # truncated state: recompute the eigenvalue estimate variationally
            u2 = state.overlaps_dense()
            v2 = ops.sqv * u2
            v2 /= np.linalg.norm(v2)
            lam2 = float(v2 @ ops.symmetric_matvec(v2))
            state.log_lambda = math.log(lam2)
        c = _marginal_norm_ladder(state.tensors, fac, model, rows)
        state.log_scale = 0.5 * (state.log_lambda - math.log(c))
        return state

    # MPO power iteration with per-step SVD truncation
    op = TransferOperator.build(model, rows)
    psi = mps_product_state(rows, fac.rank)
    psi, _, _ = mps_compress(psi, bond_dim)
    lam_prev = None
    discarded = 0.0
    for _ in range(max_iter):
        psi, log_norm, discarded = op.apply(psi, bond_dim)
        lam_est = math.exp(log_norm)
        if lam_prev is not None and abs(lam_est - lam_prev) / abs(lam_est) < tol:
            lam_prev = lam_est
            break
        lam_prev = lam_est
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
    lam = op.expectation(psi)  # Rayleigh value of the unit-norm state
    state = BoundaryState(tensors=psi, log_lambda=math.log(lam), log_scale=0.0,
                          model=model, rows=rows, bond_dim=bond_dim,
                          discarded_weight=discarded, fac=fac)
    c = _marginal_norm_ladder(psi, fac, model, rows)
    state.log_scale = 0.5 * (state.log_lambda - math.log(c))
    return state
