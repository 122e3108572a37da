# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch orbit kernel.

Mirrors ``_fallback.classify_seeds`` operation for operation; built without
FMA contraction so the two back ends agree bit for bit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

NAME = "cython"


cdef inline int _match(double x, double y, const double* alphas, int nroots, double tol) noexcept nogil:
    cdef int i
    for i in range(nroots):
        if fabs(x - alphas[i]) <= tol and fabs(y - alphas[i]) <= tol:
            return i
    return -1


cdef inline void _eval(double x, double y, const double* alphas, const long* mults, int nroots,
                       const double* res, int nres,
                       double* py_out, double* q_out, double* qa_out) noexcept nogil:
    cdef double ax = fabs(x), ay = fabs(y)
    cdef double py = 0.0, qm = 0.0, qma = 0.0, yp = 1.0, ypa = 1.0, q = 0.0, qa = 0.0
    cdef double u, v, au, av, qf, qfa, up, vp, vpa, c
    cdef int i, j
    for i in range(nres - 1, -1, -1):
        py = py * y + res[i]
    for i in range(1, nres):
        c = res[i]
        qm = qm * x + yp
        qma = qma * ax + ypa
        yp = yp * y
        ypa = ypa * ay
        q = q + c * qm
        qa = qa + fabs(c) * qma
    for i in range(nroots):
        u = x - alphas[i]
        v = y - alphas[i]
        au = fabs(u)
        av = fabs(v)
        qf = 0.0
        qfa = 0.0
        up = 1.0
        vp = 1.0
        vpa = 1.0
        for j in range(mults[i]):
            qf = qf * u + vp
            qfa = qfa * au + vpa
            up = up * u
            vp = vp * v
            vpa = vpa * av
        q = up * q + qf * py
        qa = fabs(up) * qa + qfa * fabs(py)
        py = py * vp
    py_out[0] = py
    q_out[0] = q
    qa_out[0] = qa


cdef void _classify(const double* xs, const double* ys, Py_ssize_t n,
                    const double* alphas, const long* mults, int nroots,
                    const double* res, int nres,
                    int max_iter, double conv_tol, int conv_streak, double escape_radius, double pole_guard,
                    short* codes, int* iters) noexcept nogil:
    cdef Py_ssize_t s
    cdef int i, it, last, cur, streak, code, done
    cdef double x, y, py, q, qa, ynew
    for s in range(n):
        x = xs[s]
        y = ys[s]
        code = -3
        it = max_iter
        done = 0
        for i in range(nroots):
            if x == alphas[i] and y == alphas[i]:
                code = i
                it = 0
                done = 1
                break
        if not done:
            last = _match(x, y, alphas, nroots, conv_tol)
            streak = 1 if last >= 0 else 0
            if streak >= conv_streak:
                code = last
                it = 0
                done = 1
        if not done:
            for it in range(1, max_iter + 1):
                _eval(x, y, alphas, mults, nroots, res, nres, &py, &q, &qa)
                if py == 0.0:
                    ynew = y
                elif fabs(q) <= pole_guard * qa:
                    code = -1
                    done = 1
                    break
                else:
                    ynew = y - py / q
                    if not (fabs(ynew) <= escape_radius):
                        code = -2
                        done = 1
                        break
                x = y
                y = ynew
                cur = _match(x, y, alphas, nroots, conv_tol)
                if cur >= 0:
                    if cur == last:
                        streak = streak + 1
                    else:
                        streak = 1
                else:
                    streak = 0
                last = cur
                if streak >= conv_streak:
                    code = last
                    done = 1
                    break
            if not done:
                it = max_iter
        codes[s] = <short>code
        iters[s] = it


def classify_seeds(xs, ys, alphas, mults, residual, int max_iter, double conv_tol, int conv_streak,
                   double escape_radius, double pole_guard):
    """Classify each seed; returns ``(codes int16, iterations int32)``.  Releases the GIL."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cx = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cy = np.ascontiguousarray(ys, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ca = np.ascontiguousarray(alphas, dtype=np.float64).ravel()
    cdef cnp.ndarray[long, ndim=1] cm = np.ascontiguousarray(mults, dtype=np.int_).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cr = np.ascontiguousarray(residual, dtype=np.float64).ravel()
    if cx.shape[0] != cy.shape[0]:
        raise ValueError("xs and ys must have the same size")
    if ca.shape[0] != cm.shape[0]:
        raise ValueError("alphas and mults must have the same size")
    if cr.shape[0] < 1:
        raise ValueError("residual needs at least one coefficient")
    cdef Py_ssize_t n = cx.shape[0]
    cdef cnp.ndarray[cnp.int16_t, ndim=1] codes = np.empty(n, dtype=np.int16)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] iters = np.empty(n, dtype=np.int32)
    cdef int nroots = <int>ca.shape[0]
    cdef int nres = <int>cr.shape[0]
    if n == 0:
        return codes, iters
    with nogil:
        _classify(&cx[0], &cy[0], n, &ca[0] if nroots else NULL, &cm[0] if nroots else NULL, nroots,
                  &cr[0], nres, max_iter, conv_tol, conv_streak, escape_radius, pole_guard,
                  <short*>&codes[0], <int*>&iters[0])
    return codes, iters
