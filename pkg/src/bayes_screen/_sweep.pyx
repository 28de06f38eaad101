# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernel: one full pass of per-coordinate (beta_j, gamma_j)
block updates with the size-control branch.

The caller pre-draws one uniform and one standard normal per coordinate;
the forced branch leaves its variates unused, so the pure-Python kernel
consumes the stream identically.
"""

from libc.math cimport exp, log, sqrt, isfinite


cpdef int sweep_blocks(
    double[::1, :] x,
    double[:] col_sq,
    double[:] beta,
    unsigned char[:] gamma_mask,
    double[:] residual,
    double sigma_sq,
    double c,
    int t_n,
    double[:] uniforms,
    double[:] normals,
) except -1:
    """Update every block j = 0..p-1 in place; returns the new model size."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    cdef Py_ssize_t i, j
    cdef int k = 0
    cdef double inv_c = 1.0 / c
    cdef double half_log_c = 0.5 * log(c)
    cdef double u, v2, log_theta, p0, b_new, diff, e

    for j in range(p):
        if gamma_mask[j]:
            k += 1

    for j in range(p):
        if k - (1 if gamma_mask[j] else 0) == t_n:
            # size cap saturated by the other coordinates: forced exclusion
            if gamma_mask[j]:
                diff = -beta[j]
                for i in range(n):
                    residual[i] -= x[i, j] * diff
                beta[j] = 0.0
                gamma_mask[j] = 0
                k -= 1
            continue

        u = 0.0
        for i in range(n):
            u += residual[i] * x[i, j]
        u += beta[j] * col_sq[j]
        if not isfinite(u):
            raise FloatingPointError(f"non-finite u at coordinate {j}")

        v2 = col_sq[j] + inv_c
        log_theta = -half_log_c - 0.5 * log(v2) + u * u / (2.0 * sigma_sq * v2)
        if log_theta >= 0.0:
            e = exp(-log_theta)
            p0 = e / (1.0 + e)
        else:
            p0 = 1.0 / (1.0 + exp(log_theta))

        if uniforms[j] < p0:
            b_new = 0.0
            if gamma_mask[j]:
                gamma_mask[j] = 0
                k -= 1
        else:
            b_new = u / v2 + sqrt(sigma_sq / v2) * normals[j]
            if not gamma_mask[j]:
                gamma_mask[j] = 1
                k += 1

        diff = b_new - beta[j]
        if diff != 0.0:
            for i in range(n):
                residual[i] -= x[i, j] * diff
            beta[j] = b_new

    return k
