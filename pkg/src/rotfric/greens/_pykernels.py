"""Pure-Python (numpy) twin of the compiled k-parallel quadrature kernel.

Both backends integrate the reflected part of the coincident-point Green
tensor above a half-space.  The integration variable is k_z in the
propagating sector (0 < k_z < k0) and kappa = |k_z| in the evanescent one,
which removes the 1/k_z endpoint singularity of the k-parallel form:

    prop:  Im G_xx^R = 1/(8 pi k0^2) Re[(k0^2 r_s - k_z^2 r_p) e^{2 i k_z z}]
           Im G_zz^R = 1/(4 pi k0^2) Re[(k0^2 - k_z^2) r_p e^{2 i k_z z}]
    evan:  Im G_xx^R = 1/(8 pi k0^2) (k0^2 Im r_s + kappa^2 Im r_p) e^{-2 kappa z}
           Im G_zz^R = 1/(4 pi k0^2) (k0^2 + kappa^2) Im r_p e^{-2 kappa z}

Panels are refined globally: the panel with the largest scaled error is
bisected until both components meet max(atol, rtol * |offset + total|).
"""
import numpy as np

# Gauss-Kronrod 7/15 (QUADPACK qk15)
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
# full 15-point abscissae on [-1, 1] and the matching weights
_X = np.concatenate([-XGK[:-1], XGK[::-1]])
_WK = np.concatenate([WGK[:-1], WGK[::-1]])
_WG = np.zeros(15)
# Gauss nodes are XGK[1], XGK[3], XGK[5], XGK[7]
for gi, ki in enumerate((1, 3, 5)):
    _WG[ki] = WG[gi]
    _WG[14 - ki] = WG[gi]
_WG[7] = WG[3]

PROP, EVAN = 0, 1
BRANCH_TOL = 1e-9


def integrand(sector, u, k0, z, eps, conductor):
    """Reflected Im G density at nodes ``u``; returns (xx, zz, branch_ok)."""
    pref_x = 1.0 / (8.0 * np.pi * k0 * k0)
    pref_z = 1.0 / (4.0 * np.pi * k0 * k0)
    if sector == PROP:
        if conductor:
            rs = -np.ones_like(u) + 0j
            rp = np.ones_like(u) + 0j
        else:
            k1 = np.sqrt((eps - 1.0) * k0 * k0 + u * u + 0j)
            k1 = np.where(k1.imag < 0, -k1, k1)
            rs = (u - k1) / (u + k1)
            rp = (eps * u - k1) / (eps * u + k1)
        ok = bool(np.all(np.abs(rs) <= 1 + BRANCH_TOL) and np.all(np.abs(rp) <= 1 + BRANCH_TOL))
        ph = np.exp(2j * u * z)
        fx = pref_x * ((k0 * k0 * rs - u * u * rp) * ph).real
        fz = pref_z * ((k0 * k0 - u * u) * rp * ph).real
        return fx, fz, ok
    if conductor:
        zero = np.zeros_like(u)
        return zero, zero, True
    k1 = np.sqrt((eps - 1.0) * k0 * k0 - u * u + 0j)
    k1 = np.where(k1.imag < 0, -k1, k1)
    kz = 1j * u
    rs = (kz - k1) / (kz + k1)
    rp = (eps * kz - k1) / (eps * kz + k1)
    ok = bool(np.all(rs.imag >= -BRANCH_TOL) and np.all(rp.imag >= -BRANCH_TOL))
    damp = np.exp(-2.0 * u * z)
    fx = pref_x * (k0 * k0 * rs.imag + u * u * rp.imag) * damp
    fz = pref_z * (k0 * k0 + u * u) * rp.imag * damp
    return fx, fz, ok


def gk15(sector, a, b, k0, z, eps, conductor):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    u = mid + half * _X
    fx, fz, ok = integrand(sector, u, k0, z, eps, conductor)
    kx = half * np.dot(_WK, fx)
    kz = half * np.dot(_WK, fz)
    gx = half * np.dot(_WG, fx)
    gz = half * np.dot(_WG, fz)
    return kx, kz, abs(kx - gx), abs(kz - gz), ok


def adaptive_reflected(k0, z, eps, conductor, prop_breaks, evan_breaks,
                       off_x, off_z, rtol, atol, max_panels):
    """Integrate both sectors over the given breakpoints.

    Returns ``(val_x, val_z, err_x, err_z, n_panels, converged, branch_ok)``.
    """
    eps = complex(eps)
    panels = []
    branch_ok = True
    for sector, br in ((PROP, prop_breaks), (EVAN, evan_breaks)):
        br = np.asarray(br, dtype=float)
        for a, b in zip(br[:-1], br[1:]):
            if b > a:
                kx, kz, ex, ez, ok = gk15(sector, a, b, k0, z, eps, conductor)
                branch_ok &= ok
                panels.append([sector, a, b, kx, kz, ex, ez])

    def totals():
        vx = sum(p[3] for p in panels)
        vz = sum(p[4] for p in panels)
        ex = sum(p[5] for p in panels)
        ez = sum(p[6] for p in panels)
        return vx, vz, ex, ez

    vx, vz, ex, ez = totals()
    converged = False
    while True:
        tx = max(atol, rtol * abs(off_x + vx), 1e-300)
        tz = max(atol, rtol * abs(off_z + vz), 1e-300)
        if ex <= tx and ez <= tz:
            converged = True
            break
        if len(panels) >= max_panels:
            break
        i = max(range(len(panels)), key=lambda j: max(panels[j][5] / tx, panels[j][6] / tz))
        sector, a, b, kx, kz, px, pz = panels[i]
        m = 0.5 * (a + b)
        left = gk15(sector, a, m, k0, z, eps, conductor)
        right = gk15(sector, m, b, k0, z, eps, conductor)
        branch_ok &= left[4] and right[4]
        panels[i] = [sector, a, m, *left[:4]]
        panels.append([sector, m, b, *right[:4]])
        vx += left[0] + right[0] - kx
        vz += left[1] + right[1] - kz
        ex += left[2] + right[2] - px
        ez += left[3] + right[3] - pz
    # re-sum to shed accumulated rounding from the incremental updates
    vx, vz, ex, ez = totals()
    return vx, vz, ex, ez, len(panels), converged, branch_ok

