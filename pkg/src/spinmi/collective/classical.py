"""Field-free (classical) limit of the LMG model.

Everything is diagonal in the S_x product basis: eigenstates count p spins
against the majority, with energy E_p = -N (p/N - 1/2)^2, degeneracy
C(N, p).  Finite N is summed exactly in the log domain; the thermodynamic
limit follows from a saddle-point treatment whose high-temperature branch
is a closed form and whose low-temperature branch has two symmetric
minima located numerically.  All entropies in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize as opt
from scipy.special import gammaln, logsumexp

LN2 = math.log(2.0)


def _log_binom(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def classical_log_z(n_spins: int, beta: float) -> float:
    """log Z = log sum_p C(N,p) exp(beta N (p/N-1/2)^2)."""
    p = np.arange(n_spins + 1)
    expo = beta * n_spins * (p / n_spins - 0.5) ** 2
    return float(logsumexp(_log_binom(n_spins, p) + expo))


def classical_limit(n_spins: int | None, beta: float, tau: float = 0.5) -> dict:
    """{log2_z, entropy_total, entropy_a, entropy_b, mi_bits} at h = 0.

    Finite N: exact log-binomial sums (subsystem entropy through the
    marginal weight R(p_A)).  n_spins=None: thermodynamic-limit MI from
    the saddle-point formulas; at the critical coupling beta = 2 the MI
    diverges as log(N)/4, see critical_mi_law.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if n_spins is None:
        return {"log2_z": None, "entropy_total": None, "entropy_a": None,
                "entropy_b": None, "mi_bits": classical_mi_infinite(beta, tau)}
    n = n_spins
    n_a = int(round(tau * n))
    if not 1 <= n_a <= n - 1:
        raise ValueError("tau must leave both parts nonempty")
    n_b = n - n_a

    p = np.arange(n + 1)
    log_z = classical_log_z(n, beta)
    logw = _log_binom(n, p) + beta * n * (p / n - 0.5) ** 2
    w = np.exp(logw - log_z)
    energy = float((w * (-n * (p / n - 0.5) ** 2)).sum())
    entropy_total = log_z / LN2 + beta * energy / LN2

    # marginal weights R(p_A) = (1/Z) sum_pB C(NB,pB) exp(beta N (...)^2)
    pa = np.arange(n_a + 1)
    pb = np.arange(n_b + 1)
    lb_b = _log_binom(n_b, pb)
    log_r = np.empty(n_a + 1)
    chunk = max(1, (1 << 22) // (n_b + 1))
    for lo in range(0, n_a + 1, chunk):
        hi = min(lo + chunk, n_a + 1)
        frac = (pa[lo:hi, None] + pb[None, :]) / n - 0.5
        log_r[lo:hi] = logsumexp(lb_b[None, :] + beta * n * frac ** 2, axis=1)
    log_r -= log_z
    lb_a = _log_binom(n_a, pa)
    # E_A = -sum C(NA,pA) R log2 R, evaluated from logs
    prob_a = np.exp(lb_a + log_r)
    entropy_a = float(-(prob_a * log_r).sum()) / LN2
    if n_a == n_b:
        entropy_b = entropy_a
    else:
        entropy_b = classical_limit(n, beta, 1.0 - n_a / n)["entropy_a"]
    return {"log2_z": log_z / LN2, "entropy_total": entropy_total,
            "entropy_a": entropy_a, "entropy_b": entropy_b,
            "mi_bits": entropy_a + entropy_b - entropy_total,
            "energy": energy}


def classical_mi_infinite(beta: float, tau: float = 0.5) -> float:
    """Thermodynamic-limit MI in bits for beta != 2.

    beta < 2: closed form (1/2) log2[(2-beta tau)(2-beta(1-tau))/(2(2-beta))].
    beta > 2: the saddle acquires two symmetric minima; the Gaussian
    fluctuations around them give the same algebraic form evaluated at the
    spontaneous magnetization, plus exactly one shared bit from the
    two-fold degeneracy.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if abs(beta - 2.0) < 1e-9:
        raise ValueError("beta = 2 is critical; use critical_mi_law(N)")
    if beta < 2.0:
        val = (2.0 - beta * tau) * (2.0 - beta * (1.0 - tau)) / (2.0 * (2.0 - beta))
        return 0.5 * math.log2(val)
    # two-minima branch: m solves m = tanh(beta m / 2)
    mstar = opt.brentq(lambda m: m - math.tanh(0.5 * beta * m), 1e-12, 1.0 - 1e-15)
    phibis = 4.0 / (1.0 - mstar ** 2)   # second derivative of the binomial exponent
    axx = tau * (phibis - 2.0 * beta * tau)
    ayy = (1.0 - tau) * (phibis - 2.0 * beta * (1.0 - tau))
    axy = -2.0 * beta * tau * (1.0 - tau)
    det = axx * ayy - axy ** 2
    return 1.0 + 0.5 * math.log2(axx * ayy / det)


def critical_mi_law(n_spins: int) -> float:
    """Leading critical scaling at beta = 2: I = (1/4) log2 N + O(1)."""
    return 0.25 * math.log2(n_spins)


def critical_energy_leading(n_spins: int) -> float:
    """Leading term of U at beta = 2: -sqrt(3N) Gamma(3/4) / (2 Gamma(1/4))."""
    return -math.sqrt(3.0 * n_spins) * math.gamma(0.75) / (2.0 * math.gamma(0.25))


def high_t_log_z_asymptotic(n_spins: int, beta: float) -> float:
    """log Z from the saddle point for beta < 2, including the 1/N correction."""
    if not 0 <= beta < 2:
        raise ValueError("asymptotic form valid for beta < 2")
    corr = 1.0 - beta ** 2 / (4.0 * n_spins * (2.0 - beta) ** 2)
    return n_spins * LN2 + 0.5 * math.log(2.0 / (2.0 - beta)) + math.log(corr)
