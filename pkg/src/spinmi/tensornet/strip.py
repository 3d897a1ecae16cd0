"""Mutual information of the half-cut infinite strip/cylinder.

Everything is phrased through the dominant boundary state: the joint border
weight w(a,b) = q_a q_ab q_b <L|a><L|b> sums to Lambda^2, the border marginal
is pi_a = q_a <L|a>^2 with sum pi = Lambda, and the MI is the w-average of
log2( q_ab / (<L|a><L|b>) ).  Exact summation enumerates the two borders
separately (the cross terms reduce to row-local operator insertions); larger
systems hand the same weight/observable pair to the Metropolis sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.entropy import LN2
from ..core.geometry import BoundaryConfig
from ..core.logweight import LogWeight
from ..core.models import LatticeModelSpec, bond_weight_matrix
from .boundary import BoundaryState, dominant_boundary
from .transfer import DENSE_LIMIT, DenseStripOps

EXACT_SUM_LIMIT = 2 ** 20


def column_log_weight(model: LatticeModelSpec, config) -> float:
    """log q_a: vertical-bond weights within one border column."""
    logb = np.log(bond_weight_matrix(model))
    s = np.asarray(config, dtype=int)
    total = float(logb[s[:-1], s[1:]].sum())
    if model.vertical_bc == "periodic" and len(s) > 2:
        total += float(logb[s[-1], s[0]])
    return total


def crossing_log_weight(model: LatticeModelSpec, alpha, beta) -> float:
    """log q_ab: horizontal bonds between the two border columns."""
    logb = np.log(bond_weight_matrix(model))
    a = np.asarray(alpha, dtype=int)
    b = np.asarray(beta, dtype=int)
    return float(logb[a, b].sum())


def partial_partition(state: BoundaryState, alpha, n_bulk: int) -> LogWeight:
    """log Z_A(alpha) = n_bulk * log Lambda + log <Lambda|alpha>."""
    ov = state.overlap(alpha)
    if ov.sign == 0:
        return LogWeight.ZERO
    return LogWeight(n_bulk * state.log_lambda + ov.log_magnitude, ov.sign)


def weight_and_logterm(state: BoundaryState, model: LatticeModelSpec,
                       cfg: BoundaryConfig) -> tuple[LogWeight, float]:
    """Joint border weight w(a,b) and observable f = log2(q_ab/(<L|a><L|b>)).

    The Monte Carlo average of f under w is the strip mutual information;
    the exact sum of w over all configs is Lambda^2.
    """
    u_a = state.overlap(cfg.alpha)
    u_b = state.overlap(cfg.beta)
    if u_a.sign == 0 or u_b.sign == 0:
        return LogWeight.ZERO, math.nan
    log_qa = column_log_weight(model, cfg.alpha)
    log_qb = column_log_weight(model, cfg.beta)
    log_qab = crossing_log_weight(model, cfg.alpha, cfg.beta)
    w = LogWeight(log_qa + log_qab + log_qb) * u_a * u_b
    f = (log_qab - u_a.log_magnitude - u_b.log_magnitude) / LN2
    return w, f


@dataclass
class StripMIResult:
    mi_bits: float
    log_lambda: float
    discarded_weight: float
    sum_w_over_lambda_sq: float      # exact-sum consistency check, 1 when exact
    marginal_entropy_bits: float     # entropy of pi_a = q_a <L|a>^2


def mi_strip_exact(model: LatticeModelSpec, rows: int | None = None, bond_dim: int = 16,
                   state: BoundaryState | None = None, method: str = "auto") -> StripMIResult:
    """Exact border summation of the strip MI (no Monte Carlo).

    The two borders are enumerated separately (2 q^rows configurations);
    the coupling terms are row-local operator insertions, so no joint
    (a,b) enumeration occurs.
    """
    rows = model.rows if rows is None else rows
    if model.q ** rows > EXACT_SUM_LIMIT:
        raise ValueError("exact strip summation limited to q^rows <= 2^20")
    if state is None:
        state = dominant_boundary(model, rows, bond_dim, method=method)
    ops = DenseStripOps(model, rows)
    u = state.overlaps_dense()
    y = ops.qv * u
    hy = ops.horizontal_apply(y)
    sum_w = float(y @ hy)

    bmat = ops.bmat
    blogb = bmat * np.log(bmat)
    t_coupling = 0.0
    for i in range(rows):
        t_coupling += float(y @ ops.horizontal_apply(y, insert_row=i, insert_mat=blogb))

    absu = np.abs(u)
    lnu = np.where(absu > 0, np.log(np.where(absu > 0, absu, 1.0)), 0.0)
    t_overlap = float((y * hy) @ lnu)

    mi_nats = (t_coupling - 2.0 * t_overlap) / sum_w
    lam = math.exp(state.log_lambda)

    pi = ops.qv * u * u
    pi_sum = pi.sum()
    p = np.maximum(pi, 0.0) / pi_sum
    nz = p > 0
    marginal_entropy = float(-(p[nz] * np.log2(p[nz])).sum())

    return StripMIResult(
        mi_bits=mi_nats / LN2,
        log_lambda=state.log_lambda,
        discarded_weight=state.discarded_weight,
        sum_w_over_lambda_sq=sum_w / lam ** 2,
        marginal_entropy_bits=marginal_entropy,
    )


class StripEstimator:
    """Strip weight/observable evaluator for the Metropolis sampler.

    The chain state is the pair of border columns (alpha then beta,
    2*rows sites).  Single-site flips re-evaluate the boundary overlap
    through cached partial contractions in O(D^2).
    """

    def __init__(self, state: BoundaryState, model: LatticeModelSpec | None = None):
        self.state = state
        self.model = model or state.model
        self.rows = state.rows
        self.q = self.model.q
        logb = np.log(bond_weight_matrix(self.model))
        self.log_bv = logb          # vertical
        self.log_bh = logb          # horizontal (same bond weights on the square lattice)
        self.periodic = self.model.vertical_bc == "periodic" and self.rows > 2
        # per-site overlap matrices A_i(s), padded to a common bond dimension
        amats = [np.einsum("ls,lab->sab", state.fac.g, t) for t in state.tensors]
        self.bond_dims = [a.shape[1] for a in amats] + [amats[-1].shape[2]]
        dmax = max(max(self.bond_dims), 1)
        self.dmax = dmax
        self.amats = np.zeros((self.rows, self.q, dmax, dmax))
        for i, a in enumerate(amats):
            self.amats[i, :, : a.shape[1], : a.shape[2]] = a

    @property
    def n_sites(self) -> int:
        return 2 * self.rows

    def split(self, config: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return config[: self.rows], config[self.rows:]

    def log_weight(self, config: np.ndarray) -> float:
        alpha, beta = self.split(config)
        cfg = BoundaryConfig(tuple(int(s) for s in alpha), tuple(int(s) for s in beta))
        w, _ = weight_and_logterm(self.state, self.model, cfg)
        if w.sign == 0:
            return -math.inf
        return w.log_magnitude

    def observable(self, config: np.ndarray) -> float:
        alpha, beta = self.split(config)
        cfg = BoundaryConfig(tuple(int(s) for s in alpha), tuple(int(s) for s in beta))
        _, f = weight_and_logterm(self.state, self.model, cfg)
        return f

    def exact_mean(self) -> float:
        return mi_strip_exact(self.model, self.rows, state=self.state).mi_bits

    def n_border_states(self) -> int:
        return self.q ** (2 * self.rows)

    def exact_configs(self):
        """Iterate (config, log_w, f) over all border states (small systems)."""
        from .transfer import spin_digits

        dig = spin_digits(2 * self.rows, self.q)
        for row in dig:
            cfg = np.asarray(row, dtype=np.int8)
            yield cfg, self.log_weight(cfg), self.observable(cfg)

    def kernel_tables(self):
        from ..kernels import StripTables

        return StripTables(
            amats=np.ascontiguousarray(self.amats),
            bdims=np.asarray(self.bond_dims, dtype=np.int64),
            log_bv=np.ascontiguousarray(self.log_bv),
            log_bh=np.ascontiguousarray(self.log_bh),
            periodic=self.periodic,
            rows=self.rows,
            q=self.q,
        )

    def overlap_logs(self, config: np.ndarray) -> tuple[float, float]:
        """Fresh log|u_alpha|, log|u_beta| for the environment-drift audit."""
        alpha, beta = self.split(config)
        oa = self.state.overlap(tuple(int(s) for s in alpha))
        ob = self.state.overlap(tuple(int(s) for s in beta))
        return (oa.log_magnitude - self.state.log_scale,
                ob.log_magnitude - self.state.log_scale)
