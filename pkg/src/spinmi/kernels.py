"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The Metropolis strip sweep (single-site flips with O(D^2) incremental
boundary-overlap updates) dominates production runtime, so it is provided
both as a Cython extension (spinmi._mckernels) and as the reference numpy
implementation below.  The backend is selected at import; set
SPINMI_NO_EXT=1 to force the fallback.  Both backends consume identical
uniform-variate streams; see benchmarks/bench_kernels.py for the speed
comparison.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

try:  # pragma: no cover - exercised via the env override in tests
    if os.environ.get("SPINMI_NO_EXT"):
        _ext = None
    else:
        from . import _mckernels as _ext
except ImportError:  # pragma: no cover
    _ext = None

HAVE_EXTENSION = _ext is not None


@dataclass
class StripTables:
    """Inputs of the strip sweep kernel (bond dimensions padded to dmax)."""

    amats: np.ndarray       # (rows, q, dmax, dmax)
    bdims: np.ndarray       # (rows+1,) actual bond dimensions
    log_bv: np.ndarray      # (q, q) vertical bond log-weights
    log_bh: np.ndarray      # (q, q) horizontal bond log-weights
    periodic: bool
    rows: int
    q: int


def _chain_pass(tables: StripTables, states: np.ndarray, other: np.ndarray,
                uniforms: np.ndarray, forward: bool) -> tuple[float, int]:
    """One directional Metropolis pass over a single border column.

    states: (rows,) spins of this column, updated in place; other: spins of
    the facing column (for the crossing bonds).  Returns (log|u|, accepts).
    """
    rows, q = tables.rows, tables.q
    am, bd = tables.amats, tables.bdims
    log_bv, log_bh = tables.log_bv, tables.log_bh
    periodic = tables.periodic
    accepts = 0

    def vert_delta(i: int, new: int, old: int) -> float:
        d = 0.0
        if i > 0:
            d += log_bv[states[i - 1], new] - log_bv[states[i - 1], old]
        if i < rows - 1:
            d += log_bv[states[i + 1], new] - log_bv[states[i + 1], old]
        if periodic:
            if i == 0:
                d += log_bv[states[rows - 1], new] - log_bv[states[rows - 1], old]
            elif i == rows - 1:
                d += log_bv[new, states[0]] - log_bv[old, states[0]]
        return d

    if forward:
        # suffix cache, built fresh for this pass
        suf = [None] * (rows + 1)
        logs = np.zeros(rows + 1)
        suf[rows] = np.ones(1)
        for i in range(rows - 1, -1, -1):
            v = am[i, states[i], : bd[i], : bd[i + 1]] @ suf[i + 1]
            m = np.abs(v).max()
            suf[i] = v / m
            logs[i] = logs[i + 1] + math.log(m)
        left = np.ones(1)
        log_left = 0.0
        ln_u = logs[0] + math.log(abs(suf[0][0]))
        for i in range(rows):
            old = states[i]
            new = (old + 1 + int(uniforms[i, 0] * (q - 1))) % q
            v = left @ am[i, new, : bd[i], : bd[i + 1]]
            val = abs(v @ suf[i + 1])
            ln_new = (log_left + logs[i + 1] + math.log(val)) if val > 0 else -math.inf
            delta = (vert_delta(i, new, old)
                     + log_bh[new, other[i]] - log_bh[old, other[i]]
                     + ln_new - ln_u)
            if delta >= 0 or math.log(uniforms[i, 1]) < delta:
                states[i] = new
                ln_u = ln_new
                accepts += 1
            left = left @ am[i, states[i], : bd[i], : bd[i + 1]]
            m = np.abs(left).max()
            left /= m
            log_left += math.log(m)
        return ln_u, accepts

    # backward pass: prefix cache fresh, suffix updated incrementally
    pre = [None] * (rows + 1)
    logp = np.zeros(rows + 1)
    pre[0] = np.ones(1)
    for i in range(rows):
        v = pre[i] @ am[i, states[i], : bd[i], : bd[i + 1]]
        m = np.abs(v).max()
        pre[i + 1] = v / m
        logp[i + 1] = logp[i] + math.log(m)
    right = np.ones(1)
    log_right = 0.0
    ln_u = logp[rows] + math.log(abs(pre[rows][0]))
    for i in range(rows - 1, -1, -1):
        old = states[i]
        new = (old + 1 + int(uniforms[i, 0] * (q - 1))) % q
        v = am[i, new, : bd[i], : bd[i + 1]] @ right
        val = abs(pre[i] @ v)
        ln_new = (logp[i] + log_right + math.log(val)) if val > 0 else -math.inf
        delta = (vert_delta(i, new, old)
                 + log_bh[new, other[i]] - log_bh[old, other[i]]
                 + ln_new - ln_u)
        if delta >= 0 or math.log(uniforms[i, 1]) < delta:
            states[i] = new
            ln_u = ln_new
            accepts += 1
        right = am[i, states[i], : bd[i], : bd[i + 1]] @ right
        m = np.abs(right).max()
        right /= m
        log_right += math.log(m)
    return ln_u, accepts


def strip_sweeps_python(tables: StripTables, config: np.ndarray,
                        uniforms: np.ndarray, parity0: int = 0):
    """Reference implementation of the strip sweep block.

    config: (2*rows,) alpha then beta, updated in place.
    uniforms: (n_sweeps, 2*rows, 2).
    Returns (f values in nats per sweep, accepts, log|u_alpha|, log|u_beta|).
    """
    rows = tables.rows
    n_sweeps = uniforms.shape[0]
    fvals = np.empty(n_sweeps)
    accepts = 0
    alpha = config[:rows]
    beta = config[rows:]
    ln_ua = ln_ub = 0.0
    for k in range(n_sweeps):
        forward = (k + parity0) % 2 == 0
        ua = uniforms[k, :rows]
        ub = uniforms[k, rows:]
        if forward:
            ln_ua, n1 = _chain_pass(tables, alpha, beta, ua, True)
            ln_ub, n2 = _chain_pass(tables, beta, alpha, ub, True)
        else:
            ln_ub, n2 = _chain_pass(tables, beta, alpha, ub, False)
            ln_ua, n1 = _chain_pass(tables, alpha, beta, ua, False)
        accepts += n1 + n2
        ln_qab = float(tables.log_bh[alpha, beta].sum())
        fvals[k] = ln_qab - ln_ua - ln_ub
    return fvals, accepts, ln_ua, ln_ub


def strip_sweeps(tables: StripTables, config: np.ndarray, uniforms: np.ndarray,
                 parity0: int = 0):
    if _ext is not None:
        return _ext.strip_sweeps(tables.amats, tables.bdims.astype(np.int64),
                                 tables.log_bv, tables.log_bh,
                                 1 if tables.periodic else 0,
                                 config, uniforms, parity0)
    return strip_sweeps_python(tables, config, uniforms, parity0)
