"""Pure-Python implementations of the hot loops.

Same signatures as the compiled `_ckernels` module; `gpoptics._kernels`
picks one of the two at import time.
"""

import math

import numpy as np

# |triple product| below this, with a negative denominator, marks a
# coplanar "hemisphere" fan triangle whose sign is a tie
_TIE_TOL = 1e-12
# triangle formula is 0/0 below this
_DEGENERATE_TOL = 1e-14
# dot(a, c) below -1 + this counts as antipodal
_ANTIPODE_TOL = 1e-12


def _triangle_excess(a, b, c):
    """Signed solid angle of the geodesic triangle (a, b, c).

    Returns nan for the 0/0 case (a vertex antipodal to another).
    """
    ax, ay, az = a
    bx, by, bz = b
    cx, cy, cz = c
    num = ax * (by * cz - bz * cy) + ay * (bz * cx - bx * cz) + az * (bx * cy - by * cx)
    den = 1.0 + (ax * bx + ay * by + az * bz) + (bx * cx + by * cy + bz * cz) + (cx * ax + cy * ay + cz * az)
    if abs(num) <= _DEGENERATE_TOL and abs(den) <= _DEGENERATE_TOL:
        return math.nan
    if abs(num) <= _TIE_TOL and den < 0.0:
        # coplanar with the origin and spanning a hemisphere: orient by the
        # triangle's area vector against +z, then +x, then +y
        nx = (ay * bz - az * by) + (by * cz - bz * cy) + (cy * az - cz * ay)
        ny = (az * bx - ax * bz) + (bz * cx - bx * cz) + (cz * ax - cx * az)
        nz = (ax * by - ay * bx) + (bx * cy - by * cx) + (cx * ay - cy * ax)
        for comp in (nz, nx, ny):
            if abs(comp) > _TIE_TOL:
                return math.copysign(2.0 * math.pi, comp)
        return 2.0 * math.pi
    return 2.0 * math.atan2(num, den)


def fan_solid_angle(vertices):
    """Sum of spherical excesses over the fan rooted at vertices[0].

    `vertices` is an (N, 3) array of unit vectors describing a closed
    polygon (no repeated closing vertex). Returns ``(omega, bad)`` where
    `bad` is the index of the first degenerate fan triangle or -1.
    """
    v = np.asarray(vertices, dtype=float).tolist()
    n = len(v)
    a = v[0]
    omega = 0.0
    i = 1
    while i < n - 1:
        b = v[i]
        c = v[i + 1]
        if a[0] * c[0] + a[1] * c[1] + a[2] * c[2] < -1.0 + _ANTIPODE_TOL and i + 2 < n:
            # c is the antipode of the fan root: merge the two triangles
            # touching it and re-root that piece at b
            d = v[i + 2]
            e1 = _triangle_excess(b, c, d)
            e2 = _triangle_excess(a, b, d)
            if math.isnan(e1) or math.isnan(e2):
                return math.nan, i
            omega += e1 + e2
            i += 2
            continue
        ex = _triangle_excess(a, b, c)
        if math.isnan(ex):
            return math.nan, i
        omega += ex
        i += 1
    return omega, -1


def transport(epsilon, vertices, closed):
    """Carry a complex 3-vector along geodesic segments by minimal rotations."""
    e = [complex(z) for z in epsilon]
    v = np.asarray(vertices, dtype=float).tolist()
    n = len(v)
    if closed and n > 1:
        v.append(v[0])
        n += 1
    for i in range(n - 1):
        ax, ay, az = v[i]
        bx, by, bz = v[i + 1]
        kx = ay * bz - az * by
        ky = az * bx - ax * bz
        kz = ax * by - ay * bx
        s = math.sqrt(kx * kx + ky * ky + kz * kz)
        c = ax * bx + ay * by + az * bz
        if s < 1e-300:
            continue
        kx /= s
        ky /= s
        kz /= s
        ex, ey, ez = e
        # Rodrigues: e c + (k x e) s + k (k.e)(1 - c)
        kdot = kx * ex + ky * ey + kz * ez
        cx = ky * ez - kz * ey
        cy = kz * ex - kx * ez
        cz = kx * ey - ky * ex
        e = [
            ex * c + cx * s + kx * kdot * (1.0 - c),
            ey * c + cy * s + ky * kdot * (1.0 - c),
            ez * c + cz * s + kz * kdot * (1.0 - c),
        ]
    return np.array(e, dtype=complex)


def phase_steps(theta):
    """Cyclic nearest-branch phase increments theta[k+1] - theta[k]."""
    t = np.asarray(theta, dtype=float)
    d = np.roll(t, -1) - t
    return np.pi - np.mod(np.pi - d, 2.0 * np.pi)


def apply_family(field, matrices, out=None, row_start=0, row_stop=None):
    """out[r, j] = matrices[j] @ field[r, j] for rows row_start..row_stop."""
    if out is None:
        out = np.empty_like(field, dtype=complex)
    if row_stop is None:
        row_stop = field.shape[0]
    out[row_start:row_stop] = np.einsum("jab,rjb->rja", matrices, field[row_start:row_stop])
    return out
