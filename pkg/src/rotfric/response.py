"""Body-frame response, thermal factors and fluctuation-dissipation kernels.

Conventions: internal units (hbar = kB = eps0 = 1), fields ~ exp(-i omega t),
rotation about +z with angular velocity ``omega0``.  ``omega_plus`` and
``omega_minus`` denote ``omega + omega0`` and ``omega - omega0``.

Susceptibilities are stored for omega >= 0 and continued to negative
frequency by chi(-w) = conj(chi(w)), so Im chi is odd.  Every thermal
quantity is built from the even product ``Im f(x) * coth(x / 2T)``, which
stays finite at x = 0 even though coth does not.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, PoleError, SingularPointError
from .materials import DielectricModel, Lorentz, epsilon_signed

# relative step used to take the x -> 0 limit of Im f(x) * coth(x / 2T)
_ZERO_STEP = 1e-6


def thermal_factor(omega, T):
    """a_T(omega) = coth(omega / 2T); sign(omega) at T = 0.

    Raises :class:`SingularPointError` for omega = 0 when T > 0.
    """
    if T < 0:
        raise DomainError("temperature must be >= 0")
    w = np.asarray(omega, dtype=float)
    if T == 0:
        out = np.sign(w)
    else:
        if np.any(w == 0):
            raise SingularPointError("a_T(0) diverges for T > 0; use the combined "
                                     "Im f(x) a_T(x) form")
        with np.errstate(over="ignore"):   # w / 2T -> inf is fine: coth -> 1
            out = 1.0 / np.tanh(w / (2.0 * T))
    return out[()] if out.ndim == 0 else out


def odd_times_thermal(im_fn: Callable, x, T):
    """Im f(x) * a_T(x) for an odd ``im_fn``, finite at x = 0.

    At x = 0 and T > 0 the limit 2T * d(Im f)/dx is taken with a small
    one-sided difference quotient (Im f is odd, so it is also central).
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    # below |x| = 1e-10 T the limit is exact to O(1e-20) and avoids inf * 0
    nz = np.abs(x) > 1e-10 * T
    if np.any(nz):
        xs = x[nz]
        out[nz] = im_fn(xs) * thermal_factor(xs, T)
    if T > 0 and not np.all(nz):
        h = max(_ZERO_STEP * T, 1e-150)   # subnormal T would underflow h
        out[~nz] = 2.0 * T * im_fn(np.array([h]))[0] / h
    return out[()] if out.ndim == 0 else out


def _signed(fn: Callable, omega):
    """Continue fn, defined on omega >= 0, by conjugate symmetry."""
    w = np.asarray(omega, dtype=float)
    val = np.asarray(fn(np.abs(w)), dtype=complex)
    val = np.where(w < 0, np.conj(val), val)
    return val[()] if val.ndim == 0 else val


@dataclass(frozen=True)
class BodySusceptibility:
    """Body-frame susceptibilities chi0_xx (= chi0_yy) and chi0_zz.

    ``xx`` and ``zz`` are callables evaluated on non-negative frequency
    arrays; negative frequencies go through conjugate symmetry.
    """

    xx: Callable
    zz: Callable

    @classmethod
    def lorentz(cls, strength, resonance, damping, zz=None):
        """Single Lorentz line, chi0 = s / (w0^2 - omega^2 - i g omega).

        ``zz`` optionally gives a different ``(strength, resonance, damping)``
        for the axial component.
        """
        mxx = Lorentz(((strength, resonance, damping),))
        mzz = mxx if zz is None else Lorentz((tuple(zz),))
        return cls(lambda w: mxx._eps(w) - 1.0, lambda w: mzz._eps(w) - 1.0)

    @classmethod
    def zero(cls):
        f = lambda w: np.zeros(np.shape(w), dtype=complex)
        return cls(f, f)

    def _fn(self, component):
        if component in ("xx", "yy"):
            return self.xx
        if component == "zz":
            return self.zz
        raise KeyError(component)

    def chi(self, component, omega):
        return _signed(self._fn(component), omega)

    def im_chi(self, component, omega):
        return np.imag(self.chi(component, omega))

    def im_chi_thermal(self, component, x, T):
        """Im chi0(x) a_T(x), finite at x = 0."""
        return odd_times_thermal(lambda w: self.im_chi(component, w), x, T)


def mie_polarizability(a, eps):
    """Small-sphere polarizability a^3 (eps - 1) / (eps + 2).

    Volume-normalized (Gaussian-style) convention; an infinite ``eps``
    returns the perfect-conductor value a^3.
    """
    if not a > 0:
        raise DomainError("radius must be > 0")
    eps = np.asarray(eps, dtype=complex)
    if np.any(eps == -2):
        raise PoleError("eps = -2: Froehlich pole of a lossless sphere")
    with np.errstate(invalid="ignore"):
        alpha = a**3 * (eps - 1.0) / (eps + 2.0)
    alpha = np.where(np.isinf(eps), a**3 + 0j, alpha)
    return alpha[()] if alpha.ndim == 0 else alpha


@dataclass(frozen=True)
class Polarizability:
    """Point-dipole polarizability of a small sphere.

    ``material_zz`` makes the axial response differ from the in-plane one
    (the default is isotropic).
    """

    radius: float
    material: DielectricModel
    material_zz: Optional[DielectricModel] = None

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("radius must be > 0")

    @property
    def volume(self):
        return 4.0 * np.pi * self.radius**3 / 3.0

    def _model(self, component):
        if component in ("xx", "yy"):
            return self.material
        if component == "zz":
            return self.material if self.material_zz is None else self.material_zz
        raise KeyError(component)

    def alpha(self, omega, component="xx"):
        """alpha at signed, nonzero frequency."""
        eps = epsilon_signed(self._model(component), omega)
        return mie_polarizability(self.radius, eps)

    def im_alpha(self, omega, component="xx"):
        """Im alpha at signed frequency; odd, and 0 at omega = 0."""
        w = np.asarray(omega, dtype=float)
        out = np.zeros(w.shape)
        nz = w != 0
        if np.any(nz):
            out[nz] = np.imag(self.alpha(w[nz], component))
        return out[()] if out.ndim == 0 else out

    def im_alpha_thermal(self, x, T, component="xx"):
        """Im alpha(x) a_T(x), finite at x = 0."""
        return odd_times_thermal(lambda w: self.im_alpha(w, component), x, T)

    def susceptibility(self) -> BodySusceptibility:
        """chi0 = alpha / V, consistent with Im alpha = V Im chi0."""
        v = self.volume
        return BodySusceptibility(lambda w: self._chi_nonneg(w, "xx") / v,
                                  lambda w: self._chi_nonneg(w, "zz") / v)

    def _chi_nonneg(self, w, component):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape, dtype=complex)
        nz = w != 0
        out[nz] = self.alpha(w[nz], component)
        # static limit: the Drude sphere screens perfectly, a dielectric does not
        if np.any(~nz):
            probe = np.array([_ZERO_STEP])
            out[~nz] = self.alpha(probe, component).real[0]
        return out


def lab_frame_chi(chi0: BodySusceptibility, omega, m, omega0):
    """Lab-frame 3x3 response for azimuthal index ``m``.

    chi_zz = chi0_zz(omega - m w0), chi_xx = chi_yy = mean of chi0_xx at the
    two Doppler-shifted arguments, chi_xy = -chi_yx = their difference / 2i.
    """
    omega = float(omega)
    shift = m * omega0
    cp = chi0.chi("xx", omega + omega0 - shift)
    cm = chi0.chi("xx", omega - omega0 - shift)
    out = np.zeros((3, 3), dtype=complex)
    out[0, 0] = out[1, 1] = 0.5 * (cp + cm)
    out[0, 1] = (cp - cm) / 2j
    out[1, 0] = -out[0, 1]
    out[2, 2] = chi0.chi("zz", omega - shift)
    return out


@dataclass(frozen=True)
class GammaKernels:
    """Values of the noise kernels at one (omega, m, T, omega0)."""

    zz: complex
    xx: complex
    xy: complex

    @property
    def yy(self):
        return self.xx

    def tensor(self):
        g = np.zeros((3, 3), dtype=complex)
        g[0, 0] = g[1, 1] = self.xx
        g[0, 1] = self.xy
        g[1, 0] = -self.xy
        g[2, 2] = self.zz
        return g


def gamma_kernels(chi0: BodySusceptibility, omega, m, T, omega0) -> GammaKernels:
    """Fluctuation-dissipation kernels of the noise polarization.

    Gamma_zz = 2 A_zz(m w0 - w), Gamma_xx = A(m w0 - w+) + A(m w0 - w-),
    Gamma_xy = i [A(m w0 - w-) - A(m w0 - w+)], with A = Im chi0 * a_T.
    """
    shift = m * omega0
    a_zz = chi0.im_chi_thermal("zz", shift - omega, T)
    a_p = chi0.im_chi_thermal("xx", shift - (omega + omega0), T)
    a_m = chi0.im_chi_thermal("xx", shift - (omega - omega0), T)
    return GammaKernels(zz=complex(2.0 * a_zz), xx=complex(a_p + a_m),
                        xy=complex(1j * (a_m - a_p)))


# rows of the lab <- body map for the components at omega+ and omega-
_FRAME_PLUS = 0.5 * np.array([[1.0, 1j], [-1j, 1.0]])
_FRAME_MINUS = 0.5 * np.array([[1.0, -1j], [1j, 1.0]])


def dipole_frame_transform(p_plus, p_minus, pz=0.0):
    """Lab-frame dipole spectrum from body-frame components.

    ``p_plus`` and ``p_minus`` are the body-frame (x, y[, z]) amplitudes at
    omega+ and omega-; only their in-plane parts enter.  ``pz`` is the
    body-frame z component at omega itself, which passes through unchanged.
    Returns an array whose last axis is (x, y, z).
    """
    pp = np.asarray(p_plus, dtype=complex)[..., :2]
    pm = np.asarray(p_minus, dtype=complex)[..., :2]
    xy = pp @ _FRAME_PLUS.T + pm @ _FRAME_MINUS.T
    pz = np.broadcast_to(np.asarray(pz, dtype=complex), xy.shape[:-1])
    return np.concatenate([xy, pz[..., None]], axis=-1)


def dipole_frame_inverse(p_lab):
    """Invert :func:`dipole_frame_transform` on its range.

    A lab dipole fixes only the co-rotating circular part of the body dipole
    at omega+ (p_x + i p_y) and the counter-rotating part at omega-
    (p_x - i p_y).  Returns ``(p_plus, p_minus, pz)`` holding exactly those
    circular components.
    """
    p = np.asarray(p_lab, dtype=complex)
    ccw = p[..., 0] + 1j * p[..., 1]
    cw = p[..., 0] - 1j * p[..., 1]
    p_plus = np.stack([ccw / 2, -1j * ccw / 2], axis=-1)
    p_minus = np.stack([cw / 2, 1j * cw / 2], axis=-1)
    return p_plus, p_minus, p[..., 2]
