# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in _pykernels."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, pow, fabs, INFINITY

cnp.import_array()


cdef inline Py_ssize_t _find(const double[:] breaks, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = breaks.shape[0] - 1, mid
    # largest i with breaks[i] <= x
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if breaks[mid] <= x:
            lo = mid
        else:
            hi = mid
    return lo


def eval_piecewise(x, breaks, coeff, expo, logp):
    cdef const double[:] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:] bv = np.ascontiguousarray(breaks, dtype=np.float64)
    cdef const double[:, :] cv = np.ascontiguousarray(coeff, dtype=np.float64)
    cdef const double[:, :] ev = np.ascontiguousarray(expo, dtype=np.float64)
    cdef const long long[:, :] kv = np.ascontiguousarray(logp, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0], K = cv.shape[1], i, j, s
    out = np.empty(n, dtype=np.float64)
    cdef double[:] ov = out
    cdef double r, lr, acc, t
    with nogil:
        for i in range(n):
            r = xv[i]
            s = _find(bv, r)
            lr = log(r)
            acc = 0.0
            for j in range(K):
                if cv[s, j] == 0.0:
                    continue
                t = cv[s, j] * exp(ev[s, j] * lr)
                if kv[s, j] != 0:
                    t *= pow(lr, <double>kv[s, j])
                acc += t
            ov[i] = acc
    return out


def abs_power_cells(lo, hi, seg, nodes, weights, coeff, expo, logp, double p, double w):
    cdef const double[:] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[:] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef const long long[:] sv = np.ascontiguousarray(seg, dtype=np.int64)
    cdef const double[:] nv = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[:] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, :] cv = np.ascontiguousarray(coeff, dtype=np.float64)
    cdef const double[:, :] ev = np.ascontiguousarray(expo, dtype=np.float64)
    cdef const long long[:, :] kv = np.ascontiguousarray(logp, dtype=np.int64)
    cdef Py_ssize_t ncell = lov.shape[0], nq = nv.shape[0], K = cv.shape[1]
    cdef Py_ssize_t i, q, j, s
    cdef double la, lb, half, mid, u, g, t, emax, cell, total = 0.0
    with nogil:
        for i in range(ncell):
            la = log(lov[i])
            lb = log(hiv[i])
            half = 0.5 * (lb - la)
            mid = 0.5 * (lb + la)
            s = sv[i]
            cell = 0.0
            for q in range(nq):
                u = mid + half * nv[q]
                # scale by the largest exponential so |g|^p r^(w+1) is formed in logs
                emax = -INFINITY
                for j in range(K):
                    if cv[s, j] != 0.0 and ev[s, j] * u > emax:
                        emax = ev[s, j] * u
                g = 0.0
                for j in range(K):
                    if cv[s, j] == 0.0:
                        continue
                    t = cv[s, j] * exp(ev[s, j] * u - emax)
                    if kv[s, j] != 0:
                        t *= pow(u, <double>kv[s, j])
                    g += t
                if g != 0.0:
                    cell += wv[q] * exp(p * (log(fabs(g)) + emax) + (w + 1.0) * u)
            total += half * cell
    return total
