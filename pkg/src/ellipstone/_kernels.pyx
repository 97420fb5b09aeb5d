# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel sums sum_j w_j |x - y_j|^(-p) and their gradients."""

import numpy as np

from libc.math cimport fabs, sqrt


def kernel_sums(const double[:, ::1] targets, const double[:, ::1] nodes,
                const double[::1] weights, int power, bint with_grad):
    cdef Py_ssize_t m = targets.shape[0]
    cdef Py_ssize_t k = nodes.shape[0]
    cdef Py_ssize_t d = targets.shape[1]
    cdef Py_ssize_t i, j, l
    cdef double s, c, t, term, r2, diff, inv, ip, g
    values = np.zeros(m)
    grads = np.zeros((m, d))
    cdef double[::1] vv = values
    cdef double[:, ::1] gv = grads
    with nogil:
        for i in range(m):
            s = 0.0
            c = 0.0
            for j in range(k):
                r2 = 0.0
                for l in range(d):
                    diff = targets[i, l] - nodes[j, l]
                    r2 = r2 + diff * diff
                inv = 1.0 / sqrt(r2)
                ip = 1.0
                for l in range(power):
                    ip = ip * inv
                term = weights[j] * ip
                # Neumaier compensated summation
                t = s + term
                if fabs(s) >= fabs(term):
                    c = c + ((s - t) + term)
                else:
                    c = c + ((term - t) + s)
                s = t
                if with_grad:
                    g = -power * term * inv * inv
                    for l in range(d):
                        gv[i, l] = gv[i, l] + g * (targets[i, l] - nodes[j, l])
            vv[i] = s + c
    return values, (grads if with_grad else None)
