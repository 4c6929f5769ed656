# Compiled cyclic Jacobi sweep for complex Hermitian matrices.
# Mirrors entlaw._jacobi_py.jacobi_inplace; see that module for the math.
# Complex entries are read through a float64 view (re at 2j, im at 2j+1)
# so the inner loops avoid libgcc's checked complex multiply.

from libc.math cimport sqrt, fabs

import numpy as np


cdef double _offnorm(double[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    cdef double re, im
    for i in range(n):
        for j in range(n):
            if i != j:
                re = a[i, 2 * j]
                im = a[i, 2 * j + 1]
                s += re * re + im * im
    return sqrt(s)


cdef void _rotate(double[:, ::1] a, double[:, ::1] v,
                  Py_ssize_t n, Py_ssize_t p, Py_ssize_t q) noexcept nogil:
    cdef Py_ssize_t pr = 2 * p, qr = 2 * q
    cdef double br = a[p, qr], bi = a[p, qr + 1]
    cdef double r = sqrt(br * br + bi * bi)
    cdef double app = a[p, pr]
    cdef double aqq = a[q, qr]
    cdef double g = 100.0 * r
    cdef double theta, t, c, s, u, w
    cdef double xr, xi, yr, yi
    cdef Py_ssize_t k, kr
    if r < 1e-300 or (fabs(app) + g == fabs(app) and fabs(aqq) + g == fabs(aqq)):
        a[p, qr] = 0.0
        a[p, qr + 1] = 0.0
        a[q, pr] = 0.0
        a[q, pr + 1] = 0.0
        return
    theta = (aqq - app) / (2.0 * r)
    if fabs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / sqrt(t * t + 1.0)
    s = t * c
    # s * exp(i phi) = u + i w
    u = s * br / r
    w = s * bi / r
    # columns: new_p = c x - (u - iw) y, new_q = (u + iw) x + c y
    for k in range(n):
        xr = a[k, pr]
        xi = a[k, pr + 1]
        yr = a[k, qr]
        yi = a[k, qr + 1]
        a[k, pr] = c * xr - (u * yr + w * yi)
        a[k, pr + 1] = c * xi - (u * yi - w * yr)
        a[k, qr] = u * xr - w * xi + c * yr
        a[k, qr + 1] = u * xi + w * xr + c * yi
    # rows: new_p = c x - (u + iw) y, new_q = (u - iw) x + c y
    for k in range(n):
        kr = 2 * k
        xr = a[p, kr]
        xi = a[p, kr + 1]
        yr = a[q, kr]
        yi = a[q, kr + 1]
        a[p, kr] = c * xr - u * yr + w * yi
        a[p, kr + 1] = c * xi - u * yi - w * yr
        a[q, kr] = u * xr + w * xi + c * yr
        a[q, kr + 1] = u * xi - w * xr + c * yi
    for k in range(n):
        xr = v[k, pr]
        xi = v[k, pr + 1]
        yr = v[k, qr]
        yi = v[k, qr + 1]
        v[k, pr] = c * xr - (u * yr + w * yi)
        v[k, pr + 1] = c * xi - (u * yi - w * yr)
        v[k, qr] = u * xr - w * xi + c * yr
        v[k, qr + 1] = u * xi + w * xr + c * yi
    a[p, pr] = app - t * r
    a[p, pr + 1] = 0.0
    a[q, qr] = aqq + t * r
    a[q, qr + 1] = 0.0
    a[p, qr] = 0.0
    a[p, qr + 1] = 0.0
    a[q, pr] = 0.0
    a[q, pr + 1] = 0.0


def jacobi_inplace(a, v, double threshold, int max_sweeps):
    """Run cyclic sweeps until the off-diagonal norm is <= threshold.

    ``a`` and ``v`` are C-contiguous complex128 arrays updated in place.
    Returns ``(sweeps, offnorm)``.
    """
    cdef double[:, ::1] ar = np.asarray(a).view(np.float64)
    cdef double[:, ::1] vr = np.asarray(v).view(np.float64)
    cdef Py_ssize_t n = ar.shape[0]
    cdef Py_ssize_t p, q
    cdef int sweep = 0
    cdef double off
    with nogil:
        off = _offnorm(ar, n)
        while off > threshold and sweep < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    _rotate(ar, vr, n, p, q)
            sweep += 1
            off = _offnorm(ar, n)
    return sweep, off
