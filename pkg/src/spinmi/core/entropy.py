"""Shared entropy arithmetic.  All entropies are in bits (base-2 logs)."""

from __future__ import annotations

import numpy as np

LN2 = float(np.log(2.0))


def shannon_entropy(p, *, tol: float = 1e-12) -> float:
    """-sum p log2 p of a probability vector, with 0*log(0) := 0.

    Raises ValueError on negative entries or if the vector is not
    normalized to 1 within `tol`.
    """
    p = np.asarray(p, dtype=float)
    if p.size and p.min() < 0.0:
        raise ValueError(f"negative probability entry {p.min()}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total}, not 1 within {tol}")
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def entropy_from_unnormalized(w) -> float:
    """Entropy in bits of w / sum(w) for a nonnegative weight vector."""
    w = np.asarray(w, dtype=float)
    z = w.sum()
    return shannon_entropy(w / z, tol=1e-9)


def entropy_from_log_weights(logw) -> float:
    """Entropy in bits of the distribution exp(logw)/sum exp(logw).

    Safe against overflow: works from shifted log weights.
    """
    logw = np.asarray(logw, dtype=float)
    m = logw.max()
    w = np.exp(logw - m)
    z = w.sum()
    p = w / z
    nz = p > 0.0
    return float(-np.sum(p[nz] * (logw[nz] - m - np.log(z))) / LN2)


def mutual_information_from_entropies(s_a: float, s_b: float, s_ab: float) -> float:
    """I(A:B) = S_A + S_B - S_AB (all in the same units)."""
    for name, v in (("S_A", s_a), ("S_B", s_b), ("S_AB", s_ab)):
        if not np.isfinite(v):
            raise ValueError(f"{name} is not finite: {v}")
    return s_a + s_b - s_ab
