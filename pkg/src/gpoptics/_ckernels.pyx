# cython: language_level=3
"""Compiled versions of the kernels in `_pykernels`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, fabs, copysign, fmod, M_PI, NAN, isnan

cnp.import_array()

cdef double _TIE_TOL = 1e-12
cdef double _DEGENERATE_TOL = 1e-14
cdef double _ANTIPODE_TOL = 1e-12


cdef double _triangle_excess(const double[:] a, const double[:] b, const double[:] c) noexcept nogil:
    cdef double ax = a[0], ay = a[1], az = a[2]
    cdef double bx = b[0], by = b[1], bz = b[2]
    cdef double cx = c[0], cy = c[1], cz = c[2]
    cdef double num = ax * (by * cz - bz * cy) + ay * (bz * cx - bx * cz) + az * (bx * cy - by * cx)
    cdef double den = 1.0 + (ax * bx + ay * by + az * bz) + (bx * cx + by * cy + bz * cz) + (cx * ax + cy * ay + cz * az)
    cdef double nx, ny, nz
    if fabs(num) <= _DEGENERATE_TOL and fabs(den) <= _DEGENERATE_TOL:
        return NAN
    if fabs(num) <= _TIE_TOL and den < 0.0:
        nx = (ay * bz - az * by) + (by * cz - bz * cy) + (cy * az - cz * ay)
        ny = (az * bx - ax * bz) + (bz * cx - bx * cz) + (cz * ax - cx * az)
        nz = (ax * by - ay * bx) + (bx * cy - by * cx) + (cx * ay - cy * ax)
        if fabs(nz) > _TIE_TOL:
            return copysign(2.0 * M_PI, nz)
        if fabs(nx) > _TIE_TOL:
            return copysign(2.0 * M_PI, nx)
        if fabs(ny) > _TIE_TOL:
            return copysign(2.0 * M_PI, ny)
        return 2.0 * M_PI
    return 2.0 * atan2(num, den)


def fan_solid_angle(vertices):
    cdef const double[:, :] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i = 1
    cdef double omega = 0.0
    cdef double ex, e1, e2
    with nogil:
        while i < n - 1:
            if (v[0, 0] * v[i + 1, 0] + v[0, 1] * v[i + 1, 1] + v[0, 2] * v[i + 1, 2] < -1.0 + _ANTIPODE_TOL
                    and i + 2 < n):
                e1 = _triangle_excess(v[i], v[i + 1], v[i + 2])
                e2 = _triangle_excess(v[0], v[i], v[i + 2])
                if isnan(e1) or isnan(e2):
                    break
                omega += e1 + e2
                i += 2
                continue
            ex = _triangle_excess(v[0], v[i], v[i + 1])
            if isnan(ex):
                break
            omega += ex
            i += 1
    if i < n - 1:
        return NAN, i
    return omega, -1


def transport(epsilon, vertices, bint closed):
    cdef const double[:, :] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef double complex[:] e = np.array(epsilon, dtype=np.complex128)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t m = n if (closed and n > 1) else n - 1
    cdef Py_ssize_t i, j
    cdef double ax, ay, az, bx, by, bz, kx, ky, kz, s, c
    cdef double complex ex, ey, ez, kdot, cx, cy, cz
    with nogil:
        for i in range(m):
            j = i + 1 if i + 1 < n else 0
            ax = v[i, 0]; ay = v[i, 1]; az = v[i, 2]
            bx = v[j, 0]; by = v[j, 1]; bz = v[j, 2]
            kx = ay * bz - az * by
            ky = az * bx - ax * bz
            kz = ax * by - ay * bx
            s = sqrt(kx * kx + ky * ky + kz * kz)
            c = ax * bx + ay * by + az * bz
            if s < 1e-300:
                continue
            kx = kx / s
            ky = ky / s
            kz = kz / s
            ex = e[0]; ey = e[1]; ez = e[2]
            kdot = kx * ex + ky * ey + kz * ez
            cx = ky * ez - kz * ey
            cy = kz * ex - kx * ez
            cz = kx * ey - ky * ex
            e[0] = ex * c + cx * s + kx * kdot * (1.0 - c)
            e[1] = ey * c + cy * s + ky * kdot * (1.0 - c)
            e[2] = ez * c + cz * s + kz * kdot * (1.0 - c)
    return np.asarray(e)


def phase_steps(theta):
    cdef const double[:] t = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] d = out
    cdef Py_ssize_t k
    cdef double x, two_pi = 2.0 * M_PI
    with nogil:
        for k in range(n):
            x = M_PI - (t[(k + 1) % n] - t[k])
            x = fmod(x, two_pi)
            if x < 0.0:
                x += two_pi
            d[k] = M_PI - x
    return out


def apply_family(field, matrices, out=None, Py_ssize_t row_start=0, row_stop=None):
    cdef const double complex[:, :, :] f = field
    cdef const double complex[:, :, :] mm = matrices
    if out is None:
        out = np.empty((f.shape[0], f.shape[1], 2), dtype=np.complex128)
    cdef double complex[:, :, :] o = out
    cdef Py_ssize_t stop = f.shape[0] if row_stop is None else row_stop
    cdef Py_ssize_t r, j
    cdef double complex x, y
    with nogil:
        for r in range(row_start, stop):
            for j in range(f.shape[1]):
                x = f[r, j, 0]
                y = f[r, j, 1]
                o[r, j, 0] = mm[j, 0, 0] * x + mm[j, 0, 1] * y
                o[r, j, 1] = mm[j, 1, 0] * x + mm[j, 1, 1] * y
    return out
