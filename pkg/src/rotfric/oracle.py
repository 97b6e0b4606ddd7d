"""Brute-force check of the response and noise kernels with a discrete bath.

The continuum of bath oscillators is replaced by N modes on a log grid.
Mode couplings follow from f^2(nu) / nu = (2 / pi) Im chi0(nu); the
response is rebuilt as a finite sum and the noise kernels from the thermal
second moments of independent oscillators.  Nothing here calls the
analytic kernels except :func:`verify_gamma`, which compares against them.

Two numerical choices keep the finite sums honest:

* the i0+ of the continuum becomes ``i eta nu omega`` (``eta = 1e-3``);
  since eta is below the grid spacing, the discrete principal-value sum is
  only second-order accurate midway between nodes, so comparisons of chi
  use :func:`staggered_frequencies`;
* the delta-comb of mode spectra is smoothed with a Gaussian of fixed width
  in log(nu) before it is compared with a continuous kernel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, PassivityError
from .response import BodySusceptibility, gamma_kernels

ETA = 1e-3
DEFAULT_MODES = 4000
SMOOTHING_SPACINGS = 1.0


def log_grid(nu_peak, n=DEFAULT_MODES, decades=2.0):
    """Log-spaced grid over [nu_peak 10^-decades, nu_peak 10^decades] and
    trapezoid weights."""
    if not nu_peak > 0 or n < 2:
        raise DomainError("need nu_peak > 0 and at least two modes")
    nu = np.geomspace(nu_peak * 10.0**-decades, nu_peak * 10.0**decades, n)
    w = np.empty(n)
    w[1:-1] = 0.5 * (nu[2:] - nu[:-2])
    w[0] = 0.5 * (nu[1] - nu[0])
    w[-1] = 0.5 * (nu[-1] - nu[-2])
    return nu, w


@dataclass(frozen=True, eq=False)
class DiscreteBath:
    nu_grid: np.ndarray
    weights: np.ndarray
    f_xx: np.ndarray
    f_zz: np.ndarray
    m: int = 0
    omega0: float = 0.0
    eta: float = ETA

    def __post_init__(self):
        nu, w = np.asarray(self.nu_grid), np.asarray(self.weights)
        if nu.ndim != 1 or nu.size < 2:
            raise DomainError("bath needs at least two modes")
        if np.any(nu <= 0) or np.any(np.diff(nu) <= 0):
            raise DomainError("mode frequencies must be positive and increasing")
        if w.shape != nu.shape or np.any(w <= 0):
            raise DomainError("weights must be positive, one per mode")
        for f in (self.f_xx, self.f_zz):
            if np.shape(f) != nu.shape:
                raise DomainError("one coupling per mode is required")

    @property
    def spacing(self):
        """Mean log spacing of the grid."""
        nu = self.nu_grid
        return math.log(nu[-1] / nu[0]) / (nu.size - 1)

    def strength(self, component):
        """w_i f_i^2; complex so that injected faults (imaginary f) survive."""
        f = self.f_zz if component == "zz" else self.f_xx
        return self.weights * np.asarray(f) ** 2

    def with_rotation(self, m, omega0):
        return DiscreteBath(self.nu_grid, self.weights, self.f_xx, self.f_zz,
                            int(m), float(omega0), self.eta)


def couplings_from_chi(chi0: BodySusceptibility, nu_grid, weights,
                       m=0, omega0=0.0) -> DiscreteBath:
    """Mode couplings f(nu_i) = sqrt(2 nu_i Im chi0(nu_i) / pi)."""
    nu = np.asarray(nu_grid, dtype=float)
    out = {}
    for comp in ("xx", "zz"):
        im = chi0.im_chi(comp, nu)
        if np.any(im < 0):
            i = int(np.argmin(im))
            raise PassivityError(
                f"Im chi0_{comp} = {im[i]:.3e} < 0 at nu = {nu[i]:.6g}")
        out[comp] = np.sqrt(2.0 * nu * im / math.pi)
    return DiscreteBath(nu, np.asarray(weights, dtype=float), out["xx"], out["zz"],
                        int(m), float(omega0))


def staggered_frequencies(bath: DiscreteBath):
    """Geometric midpoints between neighbouring modes."""
    return np.sqrt(bath.nu_grid[1:] * bath.nu_grid[:-1])


def _mode_sum(bath, component, x):
    """sum_i w_i f_i^2 / (nu_i^2 - x^2 - i eta nu_i x) for signed x."""
    nu = bath.nu_grid
    x = np.asarray(x, dtype=float)
    den = nu**2 - x[..., None] ** 2 - 1j * bath.eta * nu * x[..., None]
    return np.sum(bath.strength(component) / den, axis=-1)


def body_chi(bath: DiscreteBath, component, omega):
    """Body-frame chi0 rebuilt from the modes."""
    return _mode_sum(bath, component, omega)


def response_from_modes(bath: DiscreteBath, omega) -> np.ndarray:
    """Lab-frame 3x3 response at signed ``omega`` from the mode sums."""
    shift = bath.m * bath.omega0
    w0 = bath.omega0
    cp = _mode_sum(bath, "xx", omega + w0 - shift)[()]
    cm = _mode_sum(bath, "xx", omega - w0 - shift)[()]
    out = np.zeros((3, 3), dtype=complex)
    out[0, 0] = out[1, 1] = 0.5 * (cp + cm)
    out[0, 1] = (cp - cm) / 2j
    out[1, 0] = -out[0, 1]
    out[2, 2] = _mode_sum(bath, "zz", omega - shift)[()]
    return out


def noise_density(bath: DiscreteBath, component, x, T):
    """Two-sided symmetrized noise spectrum of the body-frame polarization.

    Each mode holds (hbar / 2 nu)(2 n_T + 1) per quadrature and contributes
    2 pi of spectral weight at +-nu; the comb is smoothed in log(nu).
    """
    if T < 0:
        raise DomainError("temperature must be >= 0")
    nu = bath.nu_grid
    with np.errstate(over="ignore"):
        occ = np.ones_like(nu) if T == 0 else 1.0 / np.tanh(nu / (2.0 * T))
    amp = math.pi * bath.strength(component) * occ / nu
    x = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    sig = SMOOTHING_SPACINGS * bath.spacing
    out = np.zeros(x.shape, dtype=complex)
    pos = x > 0
    if np.any(pos):
        lx = np.log(x[pos])[:, None]
        d = (lx - np.log(nu)[None, :]) / sig
        # per-unit-x density of a log-space Gaussian of unit mass; 1/x is
        # folded into the exponent so subnormal x cannot give 0/0
        ker = np.exp(-0.5 * d * d - lx) / (sig * math.sqrt(2.0 * math.pi))
        out[pos] = ker @ amp
    return out


def gamma_from_modes(bath: DiscreteBath, omega, T):
    """Lab-frame (zz, xx, xy) noise kernels from the mode second moments.

    The lab dipole at a given frequency collects the body-frame components
    at the two Doppler-shifted frequencies (co- and counter-rotating
    circular parts); with isotropic in-plane body noise s this gives
    xx = (s+ + s-) / 2 and xy = i (s+ - s-) / 2.  The kernels are sampled at
    -omega with the spectrum seen by azimuthal order m, s~(nu) = S(m w0 + nu).
    """
    shift = bath.m * bath.omega0
    w0 = bath.omega0
    x = -float(omega)
    s_plus = noise_density(bath, "xx", shift + x + w0, T)[0]
    s_minus = noise_density(bath, "xx", shift + x - w0, T)[0]
    s_zz = noise_density(bath, "zz", shift + x, T)[0]
    return s_zz, 0.5 * (s_plus + s_minus), 0.5j * (s_plus - s_minus)


@dataclass(frozen=True)
class ComparisonRow:
    component: str
    omega: float
    analytic: complex
    oracle: complex
    rel_error: float


@dataclass(frozen=True)
class Report:
    rows: tuple
    threshold: float

    @property
    def worst(self) -> Optional[ComparisonRow]:
        return max(self.rows, key=lambda r: r.rel_error, default=None)

    @property
    def passed(self):
        w = self.worst
        return w is None or w.rel_error <= self.threshold

    def to_text(self):
        lines = [f"{'component':<10} {'omega':>14} {'analytic':>24} {'oracle':>24} {'rel_error':>10}"]
        for r in self.rows:
            lines.append(f"{r.component:<10} {r.omega:>14.6g} {_c(r.analytic):>24} "
                         f"{_c(r.oracle):>24} {r.rel_error:>10.3e}")
        w = self.worst
        status = "PASS" if self.passed else "FAIL"
        if w is not None:
            lines.append(f"{status}: worst {w.component} at omega = {w.omega:.6g}, "
                         f"rel_error {w.rel_error:.3e} (threshold {self.threshold:g})")
        else:
            lines.append(f"{status}: nothing compared")
        return "\n".join(lines)


def _c(z):
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.9g}"
    return f"{z.real:.4g}{z.imag:+.4g}j"


def _rel(a, b, scale):
    """|a - b| relative to ``scale``; exact zeros on both sides give 0."""
    d = abs(a - b)
    if d == 0:
        return 0.0
    return d / scale if scale > 0 else math.inf


def verify_gamma(bath: DiscreteBath, chi0: BodySusceptibility, T, omegas,
                 threshold=0.01) -> Report:
    """Compare mode-built noise kernels with the fluctuation-dissipation form.

    Relative errors of xy are taken against |xx| at the same point, since
    xy vanishes identically without rotation.
    """
    rows = []
    for w in np.atleast_1d(np.asarray(omegas, dtype=float)):
        g = gamma_kernels(chi0, w, bath.m, T, bath.omega0)
        o_zz, o_xx, o_xy = gamma_from_modes(bath, w, T)
        rows.append(ComparisonRow("Gamma_zz", w, g.zz, o_zz, _rel(g.zz, o_zz, abs(g.zz))))
        rows.append(ComparisonRow("Gamma_xx", w, g.xx, o_xx, _rel(g.xx, o_xx, abs(g.xx))))
        rows.append(ComparisonRow("Gamma_xy", w, g.xy, o_xy, _rel(g.xy, o_xy, abs(g.xx))))
    return Report(tuple(rows), threshold)


def verify_chi(bath: DiscreteBath, chi0: BodySusceptibility, omegas,
               threshold=0.01) -> Report:
    """Compare Re chi0 rebuilt from the modes with the analytic one."""
    rows = []
    for comp in ("xx", "zz"):
        for w in np.atleast_1d(np.asarray(omegas, dtype=float)):
            a = complex(chi0.chi(comp, w)).real
            o = complex(body_chi(bath, comp, w)).real
            rows.append(ComparisonRow(f"Re_chi_{comp}", w, a, o, _rel(a, o, abs(a))))
    return Report(tuple(rows), threshold)


def shift_identity_error(bath: DiscreteBath, omegas):
    """max |chi_zz(w, m) - chi_zz^(w0 = 0)(w - m w0)| / |chi|."""
    rest = bath.with_rotation(0, 0.0)
    worst = 0.0
    for w in np.atleast_1d(np.asarray(omegas, dtype=float)):
        a = response_from_modes(bath, w)[2, 2]
        b = response_from_modes(rest, w - bath.m * bath.omega0)[2, 2]
        worst = max(worst, _rel(a, b, abs(b)))
    return worst


def corrupt_mode(bath: DiscreteBath, index, component="xx") -> DiscreteBath:
    """Fault injection: flip the sign of f^2 at one mode.

    Flipping f itself is invisible (only f^2 enters), so f -> i f is used.
    """
    f_xx = np.asarray(bath.f_xx, dtype=complex).copy()
    f_zz = np.asarray(bath.f_zz, dtype=complex).copy()
    target = f_zz if component == "zz" else f_xx
    target[index] *= 1j
    return DiscreteBath(bath.nu_grid, bath.weights, f_xx, f_zz, bath.m,
                        bath.omega0, bath.eta)
