# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Bellman stage sweep; see ``_stage_py`` for the reference semantics."""

import numpy as np

BACKEND = "cython"


def stage_nearest(next_values, double[:, ::1] r, Py_ssize_t[:, ::1] idx_d,
                  Py_ssize_t[:, ::1] idx_w, double tol):
    cdef double[:, ::1] V = np.ascontiguousarray(next_values, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], m = r.shape[1]
    values_arr = np.empty((n, n), dtype=np.float64)
    argmin_arr = np.empty((n, n), dtype=np.intp)
    cdef double[:, ::1] values = values_arr
    cdef Py_ssize_t[:, ::1] argmin = argmin_arr
    cdef double[::1] q = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i, j, c, best_c
    cdef double a1, w1, a2, w2, cost, cont, best

    with nogil:
        for i in range(n):
            for j in range(i, n):
                best = 1e300
                for c in range(m):
                    a1 = r[i, c]
                    w1 = 1.0 - a1
                    a2 = r[j, c]
                    w2 = 1.0 - a2
                    cost = 1.0 - (a1 * w2 + a2 * w1)
                    cont = (w1 * w2 * V[idx_w[i, c], idx_w[j, c]]
                            + a1 * a2 * V[idx_d[i, c], idx_d[j, c]]) + (
                            w1 * a2 * V[idx_w[i, c], idx_d[j, c]]
                            + a1 * w2 * V[idx_d[i, c], idx_w[j, c]])
                    q[c] = cost + cont
                    if q[c] < best:
                        best = q[c]
                best_c = 0
                while q[best_c] > best + tol:
                    best_c += 1
                values[i, j] = best
                values[j, i] = best
                argmin[i, j] = best_c
                argmin[j, i] = best_c
    return values_arr, argmin_arr


cdef inline double _bilinear(double[:, ::1] V, Py_ssize_t lo1, double f1,
                             Py_ssize_t lo2, double f2) noexcept nogil:
    cdef double g1 = 1.0 - f1, g2 = 1.0 - f2
    return (g1 * g2 * V[lo1, lo2] + f1 * f2 * V[lo1 + 1, lo2 + 1]) + (
            g1 * f2 * V[lo1, lo2 + 1] + f1 * g2 * V[lo1 + 1, lo2])


def stage_linear(next_values, double[:, ::1] r, Py_ssize_t[:, ::1] lo_d,
                 double[:, ::1] f_d, Py_ssize_t[:, ::1] lo_w, double[:, ::1] f_w,
                 double tol):
    cdef double[:, ::1] V = np.ascontiguousarray(next_values, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], m = r.shape[1]
    values_arr = np.empty((n, n), dtype=np.float64)
    argmin_arr = np.empty((n, n), dtype=np.intp)
    cdef double[:, ::1] values = values_arr
    cdef Py_ssize_t[:, ::1] argmin = argmin_arr
    cdef double[::1] q = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i, j, c, best_c
    cdef double a1, w1, a2, w2, cost, cont, best

    with nogil:
        for i in range(n):
            for j in range(i, n):
                best = 1e300
                for c in range(m):
                    a1 = r[i, c]
                    w1 = 1.0 - a1
                    a2 = r[j, c]
                    w2 = 1.0 - a2
                    cost = 1.0 - (a1 * w2 + a2 * w1)
                    cont = (w1 * w2 * _bilinear(V, lo_w[i, c], f_w[i, c], lo_w[j, c], f_w[j, c])
                            + a1 * a2 * _bilinear(V, lo_d[i, c], f_d[i, c], lo_d[j, c], f_d[j, c])) + (
                            w1 * a2 * _bilinear(V, lo_w[i, c], f_w[i, c], lo_d[j, c], f_d[j, c])
                            + a1 * w2 * _bilinear(V, lo_d[i, c], f_d[i, c], lo_w[j, c], f_w[j, c]))
                    q[c] = cost + cont
                    if q[c] < best:
                        best = q[c]
                best_c = 0
                while q[best_c] > best + tol:
                    best_c += 1
                values[i, j] = best
                values[j, i] = best
                argmin[i, j] = best_c
                argmin[j, i] = best_c
    return values_arr, argmin_arr
