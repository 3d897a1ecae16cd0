"""Metropolis sampling over boundary configurations with binning errors.

Chains are independent workers seeded from a counter-based generator
(Philox), one stream per chain, so runs are reproducible bit-for-bit per
backend.  Error bars come from the standard bin-doubling procedure: bin
sizes double until the error estimate moves by less than the plateau
threshold between doublings (or fewer than `min_bins` bins remain, which
flags the estimate as non-converged).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core.entropy import LN2
from .core.logweight import LogWeight
from . import kernels


@dataclass
class Schedule:
    """Measurement plan: counts are in sweeps (one proposal per site)."""

    n_samples: int
    n_equilibration: int | None = None   # default: 10% of the measurement budget
    seed: int = 0
    n_chains: int = 1
    force_mc: bool = False
    exact_sum_limit: int = 2 ** 22
    plateau_rel_change: float = 0.05
    min_bins: int = 32

    def equilibration(self) -> int:
        if self.n_equilibration is not None:
            return self.n_equilibration
        return max(1, self.n_samples // 10)


@dataclass
class MCEstimate:
    mean: float
    std_error: float
    n_samples: int
    n_equilibration: int
    bin_curve: list[tuple[int, float]] = field(default_factory=list)
    converged: bool = True
    acceptance: float = math.nan
    exact: bool = False

    def write_bin_curve(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("bin_size,std_error\n")
            for size, err in self.bin_curve:
                fh.write(f"{size},{err:.17g}\n")


def bin_curve(samples: np.ndarray, min_bins: int = 32) -> list[tuple[int, float]]:
    """(bin_size, error-of-mean) for doubling bin sizes."""
    curve = []
    size = 1
    x = np.asarray(samples, dtype=float)
    while x.size >= max(2, min_bins):
        err = float(x.std(ddof=1) / math.sqrt(x.size))
        curve.append((size, err))
        # combine neighbouring samples into bins of twice the size
        n2 = x.size // 2
        x = 0.5 * (x[: 2 * n2 : 2] + x[1 : 2 * n2 : 2])
        size *= 2
    return curve


def plateau_error(curve: list[tuple[int, float]], rel_change: float = 0.05) -> tuple[float, int, bool]:
    """(std_error, bin_size, converged) from the first plateau of the curve."""
    if not curve:
        return math.nan, 1, False
    for k in range(1, len(curve)):
        prev, cur = curve[k - 1][1], curve[k][1]
        ref = max(abs(cur), abs(prev), 1e-300)
        if abs(cur - prev) / ref < rel_change:
            return cur, curve[k][0], True
    return curve[-1][1], curve[-1][0], False


@dataclass
class ChainState:
    """Current boundary configuration and its log-weight."""

    config: np.ndarray
    log_weight: float
    cursor: int = 0
    direction: int = 1
    n_accepted: int = 0
    n_proposed: int = 0


def chain_rng(seed: int, chain_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, chain_id]))


def metropolis_step(chain: ChainState, weight_fn, q: int, rng: np.random.Generator) -> ChainState:
    """One single-site-flip proposal at the sweep cursor (boustrophedon order).

    weight_fn maps a configuration to a log-weight (float, -inf for an
    exactly vanished weight).  Acceptance is computed in the log domain.
    """
    if not math.isfinite(chain.log_weight):
        raise RuntimeError("chain weight underflowed to exact zero; restart required")
    cfg = chain.config
    i = chain.cursor
    old = cfg[i]
    shift = 1 + int(rng.random() * (q - 1))
    new = (old + shift) % q
    cfg[i] = new
    logw_new = weight_fn(cfg)
    delta = logw_new - chain.log_weight
    accept = delta >= 0 or math.log(rng.random()) < delta
    chain.n_proposed += 1
    if accept:
        chain.log_weight = logw_new
        chain.n_accepted += 1
    else:
        cfg[i] = old
    nxt = i + chain.direction
    if nxt < 0 or nxt >= len(cfg):
        chain.direction *= -1
        nxt = i + chain.direction if len(cfg) > 1 else 0
    chain.cursor = nxt
    return chain


def run_generic_chain(estimator, schedule: Schedule, chain_id: int) -> tuple[np.ndarray, float]:
    """Metropolis sweeps through a generic estimator (log_weight/observable)."""
    rng = chain_rng(schedule.seed, chain_id)
    n_sites = estimator.n_sites
    q = estimator.q
    cfg = rng.integers(0, q, size=n_sites).astype(np.int8)
    chain = ChainState(config=cfg, log_weight=estimator.log_weight(cfg))
    samples = np.empty(schedule.n_samples)
    n_equil = schedule.equilibration()
    for sweep in range(n_equil + schedule.n_samples):
        for _ in range(n_sites):
            metropolis_step(chain, estimator.log_weight, q, rng)
        if sweep >= n_equil:
            samples[sweep - n_equil] = estimator.observable(chain.config)
    acc = chain.n_accepted / max(chain.n_proposed, 1)
    return samples, acc


def estimate(estimator, schedule: Schedule) -> MCEstimate:
    """Weighted-expectation estimate of the estimator's observable.

    When the total border state count is small enough the sum is carried
    out exactly (no sampling); force_mc overrides that bypass.
    """
    n_states = estimator.n_border_states()
    if not schedule.force_mc and n_states <= schedule.exact_sum_limit:
        total = LogWeight.ZERO
        acc = 0.0
        vals = []
        logws = []
        for _, logw, f in estimator.exact_configs():
            if not math.isfinite(logw):
                continue
            vals.append(f)
            logws.append(logw)
        logws = np.asarray(logws)
        vals = np.asarray(vals)
        m = logws.max()
        w = np.exp(logws - m)
        mean = float((w * vals).sum() / w.sum())
        return MCEstimate(mean=mean, std_error=0.0, n_samples=0,
                          n_equilibration=0, bin_curve=[], converged=True, exact=True)

    per_chain = []
    for cid in range(schedule.n_chains):
        samples, acc = run_chain(estimator, schedule, cid)
        curve = bin_curve(samples, schedule.min_bins)
        err, bsize, conv = plateau_error(curve, schedule.plateau_rel_change)
        per_chain.append((samples.mean(), err, samples.size, curve, conv, acc))
    if len(per_chain) == 1:
        mean, err, n, curve, conv, acc = per_chain[0]
        return MCEstimate(mean=float(mean), std_error=float(err), n_samples=n,
                          n_equilibration=schedule.equilibration(), bin_curve=curve,
                          converged=conv, acceptance=acc)
    # inverse-variance merge after per-chain binning
    means = np.array([c[0] for c in per_chain])
    errs = np.array([c[1] for c in per_chain])
    wts = 1.0 / np.maximum(errs, 1e-300) ** 2
    mean = float((wts * means).sum() / wts.sum())
    err = float(math.sqrt(1.0 / wts.sum()))
    return MCEstimate(mean=mean, std_error=err,
                      n_samples=int(sum(c[2] for c in per_chain)),
                      n_equilibration=schedule.equilibration(),
                      bin_curve=per_chain[0][3],
                      converged=all(c[4] for c in per_chain),
                      acceptance=float(np.mean([c[5] for c in per_chain])))


def run_chain(estimator, schedule: Schedule, chain_id: int) -> tuple[np.ndarray, float]:
    """Dispatch to the fast strip kernel when the estimator supports it."""
    if hasattr(estimator, "kernel_tables"):
        return run_strip_chain(estimator, schedule, chain_id)
    return run_generic_chain(estimator, schedule, chain_id)


def run_strip_chain(estimator, schedule: Schedule, chain_id: int,
                    check_every: int = 10 ** 4) -> tuple[np.ndarray, float]:
    """Strip-border chain with O(D^2) incremental overlap updates.

    Every `check_every` sweeps the cached contraction environments are
    recomputed from scratch and verified against the incremental values.
    """
    rng = chain_rng(schedule.seed, chain_id)
    tables = estimator.kernel_tables()
    n_sites = estimator.n_sites
    q = estimator.q
    cfg = rng.integers(0, q, size=n_sites).astype(np.int8)
    n_equil = schedule.equilibration()
    total = n_equil + schedule.n_samples
    samples = np.empty(schedule.n_samples)
    # kernel overlaps are unscaled; shift f back to the true observable
    f_shift = -2.0 * estimator.state.log_scale
    got = 0
    accepted = 0
    done = 0
    while done < total:
        block = min(check_every, total - done)
        uniforms = rng.random(size=(block, n_sites, 2))
        fvals, n_acc, ln_ua, ln_ub = kernels.strip_sweeps(
            tables, cfg, uniforms, done % 2)
        accepted += n_acc
        # consistency audit of the incremental environments
        ref_a, ref_b = estimator.overlap_logs(cfg)
        if abs(ref_a - ln_ua) > 1e-8 or abs(ref_b - ln_ub) > 1e-8:
            raise RuntimeError("cached environments drifted beyond 1e-8")
        for k in range(block):
            sweep = done + k
            if sweep >= n_equil:
                samples[got] = (fvals[k] + f_shift) / LN2
                got += 1
        done += block
    return samples, accepted / (total * n_sites)
