"""Imaginary part of the coincident-point dyadic Green tensor.

Normalization: G solves [curl curl - omega^2] G = delta * I in internal
units (c = 1), so free space gives Im G_ii = omega / (6 pi) > 0.  The
printed planar kernels carry an extra factor -4 pi and the reflection
coefficients appear with the opposite sign of k_1; both are absorbed here by
using the standard Fresnel forms

    r_s = (k_z - k_1z) / (k_z + k_1z),   r_p = (eps k_z - k_1z) / (eps k_z + k_1z)

with Im k_1z >= 0 and k_z >= 0 (propagating) or k_z = i kappa (evanescent).
Only the diagonal is needed for a point dipole above a planar surface and
Im G_xx = Im G_yy after the angular average.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from ..errors import BranchCutError, DomainError, QuadratureError
from ..materials import DielectricModel, epsilon
from ._backend import BACKEND, kernels

__all__ = [
    "BACKEND", "Vacuum", "HalfSpace", "IdealConductor", "PlanarGeometry",
    "ImGreenDiag", "im_g", "im_g_vacuum", "im_g_halfspace", "im_g_conductor",
    "direct_term_quadrature", "fresnel",
]


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class HalfSpace:
    """Medium with permittivity ``material`` filling z <= 0; dipole at height z."""

    material: DielectricModel
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError("separation z must be > 0")


@dataclass(frozen=True)
class IdealConductor:
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError("separation z must be > 0")


PlanarGeometry = Union[Vacuum, HalfSpace, IdealConductor]


@dataclass(frozen=True)
class ImGreenDiag:
    im_gxx: float
    im_gyy: float
    im_gzz: float
    quadrature_error: tuple = (0.0, 0.0, 0.0)

    @property
    def in_plane(self):
        """Im G_xx + Im G_yy."""
        return self.im_gxx + self.im_gyy


# defaults shared with the observables layer
RTOL = 1e-8
ATOL = 0.0
MAX_PANELS = 20000


def im_g_vacuum(omega) -> ImGreenDiag:
    """Free space: Im G_ii = omega / (6 pi), exact."""
    if not omega > 0:
        raise DomainError("omega must be > 0")
    v = omega / (6.0 * math.pi)
    return ImGreenDiag(v, v, v)


def fresnel(k0, kz, eps):
    """(r_s, r_p) at complex normal wavenumber ``kz`` with Im k_1z >= 0.

    ``kz`` is real in (0, k0) for propagating waves and ``1j * kappa`` for
    evanescent ones; the compiled and numpy kernels inline the same formulas.
    """
    kz = complex(kz)
    k1 = np.sqrt(complex((eps - 1.0) * k0 * k0 + kz * kz))
    if k1.imag < 0:
        k1 = -k1
    return (kz - k1) / (kz + k1), (eps * kz - k1) / (eps * kz + k1)


def _check(omega, z):
    if not omega > 0:
        raise DomainError("omega must be > 0")
    if not z > 0:
        raise DomainError("separation z must be > 0")


def _prop_breaks(k0, z, fine_scale):
    """Zeros of cos(2 k_z z) plus a geometric cluster towards k_z = 0."""
    n = int(math.floor(2.0 * k0 * z / math.pi - 0.5))
    zeros = [(j + 0.5) * math.pi / (2.0 * z) for j in range(max(n + 1, 0))]
    zeros = [u for u in zeros if 0.0 < u < k0]
    cluster = _geometric_cluster(k0, fine_scale)
    return np.unique(np.array([0.0, *cluster, *zeros, k0]))


def _geometric_cluster(k0, fine_scale):
    # reflection coefficients of a good conductor turn over on the scale
    # k0 / sqrt|eps| next to k_z = 0 and kappa = 0
    pts = []
    u = 0.5 * k0
    while u > 0.01 * fine_scale:
        pts.append(u)
        u *= 0.5
    return pts


def _evan_breaks(k0, z, kmax, fine_scale):
    pts = [0.0, *_geometric_cluster(k0, fine_scale), k0]
    u = 2.0 * k0
    while u < kmax:
        pts.append(u)
        u *= 2.0
    pts.append(kmax)
    return np.unique(np.array(pts))


def _reflected(k0, z, eps, conductor, rtol, atol, max_panels):
    """Reflected Im G (xx, zz) and errors, with the evanescent tail check."""
    vac = k0 / (6.0 * math.pi)
    fine = k0 if conductor else k0 / math.sqrt(max(abs(eps), 1.0))
    pb = _prop_breaks(k0, z, fine)
    if len(pb) - 1 > max_panels:
        raise QuadratureError(f"{len(pb) - 1} half-period panels exceed max_panels")
    kmax = max(20.0 / z, 10.0 * k0)
    while True:
        eb = np.array([0.0]) if conductor else _evan_breaks(k0, z, kmax, fine)
        vx, vz, ex, ez, n, converged, ok = kernels.adaptive_reflected(
            k0, z, eps, conductor, pb, eb, vac, vac, rtol, atol, max_panels)
        if not ok:
            raise BranchCutError(
                f"|r| > 1 or Im r < 0 for passive eps = {eps!r} at omega = {k0!r}")
        if not converged:
            tot = ImGreenDiag(vac + vx, vac + vx, vac + vz, (ex, ex, ez))
            raise QuadratureError(
                f"k-parallel quadrature did not converge in {n} panels "
                f"(omega={k0!r}, z={z!r})", partial=tot, error=max(ex, ez))
        if conductor:
            return vx, vz, ex, ez
        tx = max(atol, rtol * abs(vac + vx))
        tz = max(atol, rtol * abs(vac + vz))
        tail = kernels.adaptive_reflected(
            k0, z, eps, conductor, np.array([0.0]), np.array([kmax, 2.0 * kmax]),
            vac, vac, rtol, atol, max_panels)
        if abs(tail[0]) < 0.1 * tx and abs(tail[1]) < 0.1 * tz:
            return vx, vz, ex, ez
        kmax *= 2.0


def im_g_halfspace(omega, z, material, *, rtol=RTOL, atol=ATOL,
                   max_panels=MAX_PANELS) -> ImGreenDiag:
    """Im G above a homogeneous half-space of permittivity ``material``.

    Free-space part in closed form plus the reflected part by adaptive
    Gauss-Kronrod panels over both k-parallel sectors.
    """
    _check(omega, z)
    eps = complex(epsilon(material, omega))
    if eps.imag < 0:
        raise BranchCutError(f"Im eps = {eps.imag!r} < 0 is not passive")
    vac = omega / (6.0 * math.pi)
    if eps == 1:
        return ImGreenDiag(vac, vac, vac)
    vx, vz, ex, ez = _reflected(omega, z, eps, False, rtol, atol, max_panels)
    return ImGreenDiag(vac + vx, vac + vx, vac + vz, (ex, ex, ez))


def im_g_conductor(omega, z, *, rtol=RTOL, atol=ATOL,
                   max_panels=MAX_PANELS) -> ImGreenDiag:
    """Im G above a perfect mirror (r_s = -1, r_p = 1, no evanescent loss)."""
    _check(omega, z)
    vac = omega / (6.0 * math.pi)
    vx, vz, ex, ez = _reflected(omega, z, 1.0, True, rtol, atol, max_panels)
    return ImGreenDiag(vac + vx, vac + vx, vac + vz, (ex, ex, ez))


def im_g(geometry: PlanarGeometry, omega, **quad) -> ImGreenDiag:
    if isinstance(geometry, Vacuum):
        return im_g_vacuum(omega)
    if isinstance(geometry, HalfSpace):
        return im_g_halfspace(omega, geometry.z, geometry.material, **quad)
    if isinstance(geometry, IdealConductor):
        return im_g_conductor(omega, geometry.z, **quad)
    raise TypeError(f"unknown geometry {geometry!r}")


def direct_term_quadrature(omega, rtol=1e-10):
    """Free-space Im G from the interface-independent planar-wave terms.

    Integrates the direct kernels in the k-parallel variable exactly as they
    appear in the angular spectrum (1/k_z endpoint singularity handled by an
    algebraic weight), with the -1/(4 pi) map to the working normalization.
    Independent of :func:`im_g_vacuum`; used to anchor the sign and scale.
    Returns ``(xx, zz)``.
    """
    if not omega > 0:
        raise DomainError("omega must be > 0")
    k0 = float(omega)

    # printed direct terms, propagating sector (kz real):
    #   Im g_xx = -2 pi kz / k0^2,  Im g_yy = -2 pi / kz,  Im g_zz = -2 pi q^2 / (kz k0^2)
    # angular average: G_xx = int q dq / (4 pi) (g_xx + g_yy),  G_zz = int q dq / (2 pi) g_zz.
    # kz = sqrt(k0 - q) sqrt(k0 + q); the sqrt(k0 - q) factor goes into the weight.
    def xx(q):
        s = math.sqrt(k0 + q)
        kz_reg = s  # kz / sqrt(k0 - q)
        # q (g_xx + g_yy) / (4 pi) * sqrt(k0 - q)
        return q / (4 * math.pi) * (-2 * math.pi * kz_reg * (k0 - q) / k0**2
                                    - 2 * math.pi / kz_reg)

    def zz(q):
        s = math.sqrt(k0 + q)
        return q / (2 * math.pi) * (-2 * math.pi * q * q / (s * k0**2))

    opts = dict(weight="alg", wvar=(0.0, -0.5), epsrel=rtol, epsabs=0.0, limit=200)
    gxx, _ = integrate.quad(xx, 0.0, k0, **opts)
    gzz, _ = integrate.quad(zz, 0.0, k0, **opts)
    return -gxx / (4 * math.pi), -gzz / (4 * math.pi)
