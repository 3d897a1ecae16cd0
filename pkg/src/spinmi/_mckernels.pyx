# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Metropolis strip-sweep kernel.

Mirrors spinmi.kernels.strip_sweeps_python: single-site flips over the two
border columns with O(D^2) incremental boundary-overlap updates through
cached partial contractions.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log

cnp.import_array()


cdef double _vec_mat(double[::1] vec, double[:, :, :, ::1] am, Py_ssize_t site,
                     Py_ssize_t state, Py_ssize_t dl, Py_ssize_t dr,
                     double[::1] out) nogil:
    """out[0:dr] = vec[0:dl] @ am[site, state, :dl, :dr]; returns max |out|."""
    cdef Py_ssize_t a, b
    cdef double acc, mx = 0.0
    for b in range(dr):
        acc = 0.0
        for a in range(dl):
            acc += vec[a] * am[site, state, a, b]
        out[b] = acc
        if fabs(acc) > mx:
            mx = fabs(acc)
    return mx


cdef double _mat_vec(double[:, :, :, ::1] am, Py_ssize_t site, Py_ssize_t state,
                     Py_ssize_t dl, Py_ssize_t dr, double[::1] vec,
                     double[::1] out) nogil:
    """out[0:dl] = am[site, state, :dl, :dr] @ vec[0:dr]; returns max |out|."""
    cdef Py_ssize_t a, b
    cdef double acc, mx = 0.0
    for a in range(dl):
        acc = 0.0
        for b in range(dr):
            acc += am[site, state, a, b] * vec[b]
        out[a] = acc
        if fabs(acc) > mx:
            mx = fabs(acc)
    return mx


cdef double _dot(double[::1] x, double[::1] y, Py_ssize_t n) nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    for k in range(n):
        acc += x[k] * y[k]
    return acc


cdef (double, long) _chain_pass(double[:, :, :, ::1] am, long[::1] bd,
                                double[:, ::1] log_bv, double[:, ::1] log_bh,
                                int periodic, signed char[::1] states,
                                signed char[::1] other, double[:, ::1] uniforms,
                                int forward, Py_ssize_t rows, Py_ssize_t q,
                                double[:, ::1] cache, double[::1] cache_logs,
                                double[::1] cur, double[::1] tmp1, double[::1] tmp2) nogil:
    cdef Py_ssize_t i, k, old, new
    cdef long accepts = 0
    cdef double m, val, ln_u, ln_new, delta, log_cur
    cdef double NEG_INF = -1e300

    if forward:
        # suffix cache
        cache[rows, 0] = 1.0
        cache_logs[rows] = 0.0
        for i in range(rows - 1, -1, -1):
            for k in range(bd[i + 1]):
                tmp1[k] = cache[i + 1, k]
            m = _mat_vec(am, i, states[i], bd[i], bd[i + 1], tmp1, tmp2)
            for k in range(bd[i]):
                cache[i, k] = tmp2[k] / m
            cache_logs[i] = cache_logs[i + 1] + log(m)
        cur[0] = 1.0
        log_cur = 0.0
        ln_u = cache_logs[0] + log(fabs(cache[0, 0]))
        for i in range(rows):
            old = states[i]
            new = (old + 1 + <Py_ssize_t>(uniforms[i, 0] * (q - 1))) % q
            m = _vec_mat(cur, am, i, new, bd[i], bd[i + 1], tmp1)
            for k in range(bd[i + 1]):
                tmp2[k] = cache[i + 1, k]
            val = fabs(_dot(tmp1, tmp2, bd[i + 1]))
            if val > 0:
                ln_new = log_cur + cache_logs[i + 1] + log(val)
            else:
                ln_new = NEG_INF
            delta = ln_new - ln_u
            if i > 0:
                delta += log_bv[states[i - 1], new] - log_bv[states[i - 1], old]
            if i < rows - 1:
                delta += log_bv[states[i + 1], new] - log_bv[states[i + 1], old]
            if periodic:
                if i == 0:
                    delta += log_bv[states[rows - 1], new] - log_bv[states[rows - 1], old]
                elif i == rows - 1:
                    delta += log_bv[new, states[0]] - log_bv[old, states[0]]
            delta += log_bh[new, other[i]] - log_bh[old, other[i]]
            if delta >= 0 or log(uniforms[i, 1]) < delta:
                states[i] = <signed char>new
                ln_u = ln_new
                accepts += 1
            m = _vec_mat(cur, am, i, states[i], bd[i], bd[i + 1], tmp1)
            for k in range(bd[i + 1]):
                cur[k] = tmp1[k] / m
            log_cur += log(m)
        return ln_u, accepts

    # backward pass: prefix cache fresh, suffix incrementally
    cache[0, 0] = 1.0
    cache_logs[0] = 0.0
    for i in range(rows):
        for k in range(bd[i]):
            tmp1[k] = cache[i, k]
        m = _vec_mat(tmp1, am, i, states[i], bd[i], bd[i + 1], tmp2)
        for k in range(bd[i + 1]):
            cache[i + 1, k] = tmp2[k] / m
        cache_logs[i + 1] = cache_logs[i] + log(m)
    cur[0] = 1.0
    log_cur = 0.0
    ln_u = cache_logs[rows] + log(fabs(cache[rows, 0]))
    for i in range(rows - 1, -1, -1):
        old = states[i]
        new = (old + 1 + <Py_ssize_t>(uniforms[i, 0] * (q - 1))) % q
        m = _mat_vec(am, i, new, bd[i], bd[i + 1], cur, tmp1)
        for k in range(bd[i]):
            tmp2[k] = cache[i, k]
        val = fabs(_dot(tmp2, tmp1, bd[i]))
        if val > 0:
            ln_new = cache_logs[i] + log_cur + log(val)
        else:
            ln_new = NEG_INF
        delta = ln_new - ln_u
        if i > 0:
            delta += log_bv[states[i - 1], new] - log_bv[states[i - 1], old]
        if i < rows - 1:
            delta += log_bv[states[i + 1], new] - log_bv[states[i + 1], old]
        if periodic:
            if i == 0:
                delta += log_bv[states[rows - 1], new] - log_bv[states[rows - 1], old]
            elif i == rows - 1:
                delta += log_bv[new, states[0]] - log_bv[old, states[0]]
        delta += log_bh[new, other[i]] - log_bh[old, other[i]]
        if delta >= 0 or log(uniforms[i, 1]) < delta:
            states[i] = <signed char>new
            ln_u = ln_new
            accepts += 1
        m = _mat_vec(am, i, states[i], bd[i], bd[i + 1], cur, tmp1)
        for k in range(bd[i]):
            cur[k] = tmp1[k] / m
        log_cur += log(m)
    return ln_u, accepts


def strip_sweeps(cnp.ndarray[cnp.float64_t, ndim=4] amats,
                 cnp.ndarray[cnp.int64_t, ndim=1] bdims,
                 cnp.ndarray[cnp.float64_t, ndim=2] log_bv,
                 cnp.ndarray[cnp.float64_t, ndim=2] log_bh,
                 int periodic,
                 cnp.ndarray[cnp.int8_t, ndim=1] config,
                 cnp.ndarray[cnp.float64_t, ndim=3] uniforms,
                 int parity0):
    cdef Py_ssize_t rows = amats.shape[0]
    cdef Py_ssize_t q = amats.shape[1]
    cdef Py_ssize_t dmax = amats.shape[2]
    cdef Py_ssize_t n_sweeps = uniforms.shape[0]
    cdef double[:, :, :, ::1] am = np.ascontiguousarray(amats)
    cdef long[::1] bd = np.ascontiguousarray(bdims)
    cdef double[:, ::1] lbv = np.ascontiguousarray(log_bv)
    cdef double[:, ::1] lbh = np.ascontiguousarray(log_bh)
    cdef double[:, :, ::1] uni = np.ascontiguousarray(uniforms)
    cdef signed char[::1] cfg = config
    cdef signed char[::1] alpha = cfg[:rows]
    cdef signed char[::1] beta = cfg[rows:]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] fvals = np.empty(n_sweeps)
    cdef double[:, ::1] cache = np.empty((rows + 1, dmax))
    cdef double[::1] cache_logs = np.empty(rows + 1)
    cdef double[::1] cur = np.empty(dmax)
    cdef double[::1] tmp1 = np.empty(dmax)
    cdef double[::1] tmp2 = np.empty(dmax)

    cdef long accepts = 0, n1 = 0, n2 = 0
    cdef double ln_ua = 0.0, ln_ub = 0.0, ln_qab
    cdef Py_ssize_t k, i
    cdef int forward

    for k in range(n_sweeps):
        forward = 1 if (k + parity0) % 2 == 0 else 0
        if forward:
            ln_ua, n1 = _chain_pass(am, bd, lbv, lbh, periodic, alpha, beta,
                                    uni[k, :rows], 1, rows, q,
                                    cache, cache_logs, cur, tmp1, tmp2)
            ln_ub, n2 = _chain_pass(am, bd, lbv, lbh, periodic, beta, alpha,
                                    uni[k, rows:], 1, rows, q,
                                    cache, cache_logs, cur, tmp1, tmp2)
        else:
            ln_ub, n2 = _chain_pass(am, bd, lbv, lbh, periodic, beta, alpha,
                                    uni[k, rows:], 0, rows, q,
                                    cache, cache_logs, cur, tmp1, tmp2)
            ln_ua, n1 = _chain_pass(am, bd, lbv, lbh, periodic, alpha, beta,
                                    uni[k, :rows], 0, rows, q,
                                    cache, cache_logs, cur, tmp1, tmp2)
        accepts += n1 + n2
        ln_qab = 0.0
        for i in range(rows):
            ln_qab += lbh[alpha[i], beta[i]]
        fvals[k] = ln_qab - ln_ua - ln_ub
    return fvals, int(accepts), float(ln_ua), float(ln_ub)
