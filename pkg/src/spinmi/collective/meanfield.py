"""Mean-field phase structure of the fully connected models.

The self-consistent magnetizations are the stationary points of the
mean-field free energy; among all of them the free-energy minimizer wins.
For the LMG family the critical line is known in closed form,
T_c(h) = h / (2 artanh h); the m,n family is handled numerically on a
bracket grid so that no root is missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize as opt

from .blocks import mn_constant


def lmg_critical_temperature(h: float) -> float:
    """T_c(h) = h/(2 artanh h); the h -> 0 limit is 1/2."""
    if not 0.0 <= h < 1.0:
        raise ValueError("closed-form T_c needs 0 <= h < 1")
    if h == 0.0:
        return 0.5
    return h / (2.0 * math.atanh(h))


def _log_2cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax))


def _lmg_free_energy(m: float, h: float, temp: float) -> float:
    r = math.hypot(m, h)
    return m * m / 4.0 - temp * _log_2cosh(r / (2.0 * temp))


def lmg_mean_field(h: float, temp: float, grid_points: int = 256) -> dict:
    """Self-consistent m_x = m_x tanh(sqrt(m_x^2+h^2)/2T)/sqrt(m_x^2+h^2),
    free-energy minimizer among all bracketed roots."""
    if temp <= 0:
        raise ValueError("temp must be positive (use the ground-state path for T=0)")

    def residual(m: float) -> float:
        r = math.hypot(m, h)
        return m - m * math.tanh(r / (2.0 * temp)) / r if r > 0 else 0.0

    roots = [0.0]
    grid = np.linspace(1e-12, 1.0, grid_points)
    vals = np.array([residual(m) for m in grid])
    for k in range(len(grid) - 1):
        if vals[k] == 0.0:
            roots.append(float(grid[k]))
        elif vals[k] * vals[k + 1] < 0:
            roots.append(float(opt.brentq(residual, grid[k], grid[k + 1], xtol=1e-15)))
    best = min(roots, key=lambda m: _lmg_free_energy(m, h, temp))
    mx = abs(best)
    r = math.hypot(mx, h)
    mz = -h / r * math.tanh(r / (2.0 * temp)) if r > 0 else 0.0
    return {"m_x": mx, "m_z": mz,
            "free_energy": _lmg_free_energy(mx, h, temp),
            "is_ordered": mx > 1e-9}


def _mn_free_energy(mx: float, mz: float, m: int, n: int, omega: float,
                    temp: float) -> float:
    k = mn_constant(m, n)
    h0 = (m - 1) * mx ** m * math.cos(omega) + k * (n - 1) * mz ** n * math.sin(omega)
    hx = 2.0 * m * mx ** (m - 1) * math.cos(omega)
    hz = 2.0 * k * n * mz ** (n - 1) * math.sin(omega)
    r = math.hypot(hx, hz)
    return h0 - temp * _log_2cosh(r / (2.0 * temp))


def mn_mean_field(m: int, n: int, omega: float, temp: float,
                  grid_points: int = 64) -> dict:
    """Free-energy minimization over (m_x, m_z) in [0,1]^2 (coarse grid plus
    local polish); the minimizer satisfies the self-consistency equations."""
    if temp <= 0:
        raise ValueError("temp must be positive")
    grid = np.linspace(0.0, 1.0, grid_points)
    best = (math.inf, 0.0, 0.0)
    for mx in grid:
        for mz in grid:
            f = _mn_free_energy(mx, mz, m, n, omega, temp)
            if f < best[0]:
                best = (f, float(mx), float(mz))
    res = opt.minimize(lambda v: _mn_free_energy(v[0], v[1], m, n, omega, temp),
                       x0=[best[1], best[2]], method="Nelder-Mead",
                       bounds=[(0.0, 1.0), (0.0, 1.0)],
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    mx, mz = (abs(float(res.x[0])), abs(float(res.x[1])))
    return {"m_x": mx, "m_z": mz, "free_energy": float(res.fun),
            "is_ordered": order_parameter_mn(mx, mz, n) > 1e-9}


def order_parameter_mn(mx: float, mz: float, n: int) -> float:
    """The symmetry-breaking magnetization: m_x always; m_z only when the
    z-interaction is nonlinear (for n=1 it acts as a plain field)."""
    return max(mx, mz) if n >= 2 else mx


def _onset_temperature(order_at, t_hi: float = 4.0, tol: float = 1e-10) -> float:
    """Bisection on the order-parameter onset (order_at: T -> op value)."""
    lo, hi = 1e-6, t_hi
    if order_at(lo) <= 1e-9:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if order_at(mid) > 1e-9:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phase_boundary(family: str, axis_values, m: int = 2, n: int = 1,
                   tol: float = 1e-10) -> list[tuple[float, float]]:
    """(axis, T_c) polyline: axis = h for LMG, omega for the m,n family."""
    out = []
    for x in axis_values:
        if family == "lmg":
            def op(t, hval=x):
                return lmg_mean_field(hval, t)["m_x"]
        elif family == "mn":
            def op(t, w=x):
                r = mn_mean_field(m, n, w, t)
                return order_parameter_mn(r["m_x"], r["m_z"], n)
        else:
            raise ValueError(f"unknown family {family!r}")
        out.append((float(x), _onset_temperature(op, tol=tol)))
    return out


def classify_transition(family: str, x: float, m: int = 2, n: int = 1,
                        tc: float | None = None) -> str:
    """'first' if the order parameter jumps across the boundary, else 'second'.

    The jump is estimated by Richardson extrapolation of the order
    parameter at T_c(1-eps) and T_c(1-eps/4): a square-root onset
    extrapolates to zero, a discontinuity to its jump value.
    """
    if tc is None:
        if family == "lmg":
            tc = _onset_temperature(lambda t: lmg_mean_field(x, t)["m_x"])
        else:
            tc = _onset_temperature(
                lambda t: (lambda r: order_parameter_mn(r["m_x"], r["m_z"], n))(
                    mn_mean_field(m, n, x, t)))
    if tc <= 0:
        raise ValueError("no finite-temperature transition at this point")
    eps = 1e-6  # extrapolation residual for a sqrt onset scales as eps^(3/2)

    def op(t: float) -> float:
        if family == "lmg":
            return lmg_mean_field(x, t)["m_x"]
        r = mn_mean_field(m, n, x, t)
        return order_parameter_mn(r["m_x"], r["m_z"], n)

    o1 = op(tc * (1 - eps))
    o2 = op(tc * (1 - eps / 4.0))
    if o1 > 0 and o2 / o1 > 0.9:        # barely moved: a genuine discontinuity
        jump = o2
    else:                               # extrapolate the continuous onset to zero
        jump = 2.0 * o2 - o1
    return "first" if jump > 1e-6 else "second"
