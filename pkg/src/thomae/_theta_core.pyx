# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled lattice summation kernel.

Fused evaluation of exp(i pi q.tau.q + 2 pi i q.w) and the derivative
monomials prod (2 pi i q_d) over all requested multi-indices in one pass over
the lattice points; avoids the large temporaries of the numpy route.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, exp, sin

cnp.import_array()


def theta_sums(double[:, ::1] Q, double complex[:, ::1] tau,
               double complex[::1] w, cnp.int64_t[:, ::1] midx):
    cdef Py_ssize_t N = Q.shape[0]
    cdef Py_ssize_t g = Q.shape[1]
    cdef Py_ssize_t K = midx.shape[0]
    cdef Py_ssize_t M = midx.shape[1]
    out_arr = np.zeros(K, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t n, i, j, k, l
    cdef double qi, re, im, mag
    cdef double complex acc, t, f, factor
    cdef double complex two_pi_i = 2j * M_PI

    for n in range(N):
        acc = 0
        for i in range(g):
            qi = Q[n, i]
            acc = acc + qi * qi * tau[i, i] + 2.0 * qi * w[i]
            for j in range(i + 1, g):
                acc = acc + 2.0 * qi * Q[n, j] * tau[i, j]
        # t = exp(i pi acc)
        re = -M_PI * acc.imag
        im = M_PI * acc.real
        mag = exp(re)
        t = mag * cos(im) + 1j * mag * sin(im)
        for k in range(K):
            f = t
            for l in range(M):
                factor = two_pi_i * Q[n, midx[k, l]]
                f = f * factor
            out[k] = out[k] + f
    return out_arr
