# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled k-parallel quadrature kernel.

Same algorithm and panel-selection rule as ``_pykernels``; see there for
the integrands.  The adaptive loop runs without the GIL.
"""
import numpy as np

from libc.math cimport exp, fabs, M_PI, sin, cos
from libc.stdlib cimport malloc, free

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

cdef enum:
    PROP = 0
    EVAN = 1
cdef double BRANCH_TOL = 1e-9


cdef inline int point(int sector, double u, double k0, double z, double complex eps,
                      bint conductor, double *fx, double *fz) nogil:
    """Integrand at one node; returns 0 if the branch check fails."""
    cdef double complex k1, rs, rp, kz, ph
    cdef double px = 1.0 / (8.0 * M_PI * k0 * k0)
    cdef double pz = 1.0 / (4.0 * M_PI * k0 * k0)
    cdef double damp, ars, arp
    cdef int ok = 1
    if sector == PROP:
        if conductor:
            rs = -1.0
            rp = 1.0
        else:
            k1 = csqrt((eps - 1.0) * k0 * k0 + u * u)
            if cimag(k1) < 0:
                k1 = -k1
            rs = (u - k1) / (u + k1)
            rp = (eps * u - k1) / (eps * u + k1)
            ars = creal(rs) * creal(rs) + cimag(rs) * cimag(rs)
            arp = creal(rp) * creal(rp) + cimag(rp) * cimag(rp)
            if ars > (1 + BRANCH_TOL) * (1 + BRANCH_TOL) or arp > (1 + BRANCH_TOL) * (1 + BRANCH_TOL):
                ok = 0
        ph = cos(2.0 * u * z) + 1j * sin(2.0 * u * z)
        fx[0] = px * creal((k0 * k0 * rs - u * u * rp) * ph)
        fz[0] = pz * creal((k0 * k0 - u * u) * rp * ph)
        return ok
    if conductor:
        fx[0] = 0.0
        fz[0] = 0.0
        return 1
    k1 = csqrt((eps - 1.0) * k0 * k0 - u * u)
    if cimag(k1) < 0:
        k1 = -k1
    kz = 1j * u
    rs = (kz - k1) / (kz + k1)
    rp = (eps * kz - k1) / (eps * kz + k1)
    if cimag(rs) < -BRANCH_TOL or cimag(rp) < -BRANCH_TOL:
        ok = 0
    damp = exp(-2.0 * u * z)
    fx[0] = px * (k0 * k0 * cimag(rs) + u * u * cimag(rp)) * damp
    fz[0] = pz * (k0 * k0 + u * u) * cimag(rp) * damp
    return ok


cdef int gk15(int sector, double a, double b, double k0, double z, double complex eps,
              bint conductor, double *out) nogil:
    """out = (Kx, Kz, |Kx - Gx|, |Kz - Gz|); returns branch flag."""
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double kx = 0, kz = 0, gx = 0, gz = 0
    cdef double f1x, f1z, f2x, f2z, d
    cdef int j, ok = 1
    ok &= point(sector, mid, k0, z, eps, conductor, &f1x, &f1z)
    kx = WGK[7] * f1x
    kz = WGK[7] * f1z
    gx = WG[3] * f1x
    gz = WG[3] * f1z
    for j in range(7):
        d = half * XGK[j]
        ok &= point(sector, mid - d, k0, z, eps, conductor, &f1x, &f1z)
        ok &= point(sector, mid + d, k0, z, eps, conductor, &f2x, &f2z)
        kx += WGK[j] * (f1x + f2x)
        kz += WGK[j] * (f1z + f2z)
        if j % 2 == 1:
            gx += WG[j // 2] * (f1x + f2x)
            gz += WG[j // 2] * (f1z + f2z)
    out[0] = half * kx
    out[1] = half * kz
    out[2] = fabs(half * (kx - gx))
    out[3] = fabs(half * (kz - gz))
    return ok


def adaptive_reflected(double k0, double z, eps, bint conductor, prop_breaks,
                       evan_breaks, double off_x, double off_z, double rtol,
                       double atol, int max_panels):
    """See ``_pykernels.adaptive_reflected``."""
    cdef double complex ceps = complex(eps)
    cdef double[::1] pb = np.ascontiguousarray(prop_breaks, dtype=np.float64)
    cdef double[::1] eb = np.ascontiguousarray(evan_breaks, dtype=np.float64)
    cdef int cap = max(max_panels, pb.shape[0] + eb.shape[0])
    cdef int *sec = <int *> malloc(cap * sizeof(int))
    cdef double *lo = <double *> malloc(cap * sizeof(double))
    cdef double *hi = <double *> malloc(cap * sizeof(double))
    cdef double *res = <double *> malloc(4 * cap * sizeof(double))
    cdef int n = 0, i, j, best, ok = 1, converged = 0
    cdef double vx = 0, vz = 0, ex = 0, ez = 0, tx, tz, score, bscore, m
    cdef double left[4]
    cdef double right[4]
    if sec == NULL or lo == NULL or hi == NULL or res == NULL:
        free(sec); free(lo); free(hi); free(res)
        raise MemoryError()
    try:
        with nogil:
            for i in range(pb.shape[0] - 1):
                if pb[i + 1] > pb[i]:
                    sec[n] = PROP
                    lo[n] = pb[i]
                    hi[n] = pb[i + 1]
                    ok &= gk15(PROP, lo[n], hi[n], k0, z, ceps, conductor, &res[4 * n])
                    n += 1
            for i in range(eb.shape[0] - 1):
                if eb[i + 1] > eb[i]:
                    sec[n] = EVAN
                    lo[n] = eb[i]
                    hi[n] = eb[i + 1]
                    ok &= gk15(EVAN, lo[n], hi[n], k0, z, ceps, conductor, &res[4 * n])
                    n += 1
            for i in range(n):
                vx += res[4 * i]
                vz += res[4 * i + 1]
                ex += res[4 * i + 2]
                ez += res[4 * i + 3]
            while True:
                tx = max(atol, rtol * fabs(off_x + vx), 1e-300)
                tz = max(atol, rtol * fabs(off_z + vz), 1e-300)
                if ex <= tx and ez <= tz:
                    converged = 1
                    break
                if n >= max_panels:
                    break
                best = 0
                bscore = -1.0
                for i in range(n):
                    score = max(res[4 * i + 2] / tx, res[4 * i + 3] / tz)
                    if score > bscore:
                        bscore = score
                        best = i
                m = 0.5 * (lo[best] + hi[best])
                ok &= gk15(sec[best], lo[best], m, k0, z, ceps, conductor, left)
                ok &= gk15(sec[best], m, hi[best], k0, z, ceps, conductor, right)
                vx += left[0] + right[0] - res[4 * best]
                vz += left[1] + right[1] - res[4 * best + 1]
                ex += left[2] + right[2] - res[4 * best + 2]
                ez += left[3] + right[3] - res[4 * best + 3]
                sec[n] = sec[best]
                lo[n] = m
                hi[n] = hi[best]
                for j in range(4):
                    res[4 * n + j] = right[j]
                    res[4 * best + j] = left[j]
                hi[best] = m
                n += 1
            vx = 0; vz = 0; ex = 0; ez = 0
            for i in range(n):
                vx += res[4 * i]
                vz += res[4 * i + 1]
                ex += res[4 * i + 2]
                ez += res[4 * i + 3]
    finally:
        free(sec); free(lo); free(hi); free(res)
    return vx, vz, ex, ez, n, bool(converged), bool(ok)
