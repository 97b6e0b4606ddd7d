"""Radiated power and frictional torque of a small spinning sphere.

Point-dipole formulas in internal units (hbar = c = kB = 1):

    dP/dw = w^3 / (2 pi) * { 2 Im a_zz(w) Im G_zz(w) [a_T(w) - a_T0(w)]
            + (Im G_xx + Im G_yy)(w) * sum_{s=+,-} Im a_xx(w_s) [a_T(w_s) - a_T0(w)] }

    dM/dw = w^2 / (2 pi) * (Im G_xx + Im G_yy)(w)
            * { Im a(w+) [a_T(w+) - a_T0(w)] - Im a(w-) [a_T(w-) - a_T0(w)] }

with w+- = w +- omega0.  Positive P is power leaving the body; M < 0 for
omega0 > 0 means braking.  Products Im a(x) a_T(x) go through the finite
x -> 0 form so the integrands are regular everywhere on (0, inf).
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import integrate

from . import greens
from .errors import DomainError, QuadratureError
from .greens import ImGreenDiag, PlanarGeometry, Vacuum
from .response import Polarizability, thermal_factor

PREFACTOR = 1.0 / (2.0 * math.pi)   # hbar / (2 pi c^2)
CUTOFF_FACTOR = 40.0
THREADS_ENV = "ROTFRIC_THREADS"


@dataclass(frozen=True)
class SpinningBody:
    polarizability: Polarizability
    T: float
    omega0: float

    def __post_init__(self):
        if self.T < 0:
            raise DomainError("body temperature must be >= 0")
        beta = abs(self.omega0) * self.polarizability.radius
        if beta > 0.01:
            warnings.warn(f"rim speed |omega0| a / c = {beta:.3g} > 0.01; the "
                          "non-relativistic point-dipole model is stretched",
                          RuntimeWarning, stacklevel=3)


@dataclass(frozen=True)
class Environment:
    geometry: PlanarGeometry = field(default_factory=Vacuum)
    T0: float = 0.0

    def __post_init__(self):
        if self.T0 < 0:
            raise DomainError("environment temperature must be >= 0")


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-6
    abs_tol: float = 0.0
    max_refinements: int = 2000
    # inner k-parallel tolerance relative to rel_tol
    green_factor: float = 0.1

    def __post_init__(self):
        if not 1e-12 < self.rel_tol < 1e-2:
            raise DomainError("rel_tol must lie in (1e-12, 1e-2)")
        if self.abs_tol < 0 or self.max_refinements < 1:
            raise DomainError("abs_tol must be >= 0 and max_refinements >= 1")

    def green_options(self):
        return dict(rtol=self.rel_tol * self.green_factor,
                    max_panels=max(20000, 10 * self.max_refinements))


@dataclass(frozen=True)
class PowerDensity:
    zz: float
    xx_minus: float
    xx_plus: float

    @property
    def total(self):
        return self.zz + self.xx_minus + self.xx_plus


@dataclass(frozen=True)
class TorqueDensity:
    plus: float
    minus: float

    @property
    def total(self):
        return self.plus - self.minus


@dataclass(frozen=True)
class Total:
    value: float
    error: float
    parts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SpectralResult:
    """Channel-resolved spectra on a grid plus adaptively integrated totals."""

    omega_grid: np.ndarray
    dP_domega: dict
    dM_domega: dict
    total_power: float
    total_torque: float
    error_estimates: dict


def _green(env: Environment, omega, quad: Optional[QuadratureConfig]) -> ImGreenDiag:
    opts = (quad or QuadratureConfig()).green_options()
    return greens.im_g(env.geometry, omega, **opts)


def _thermal_brackets(body: SpinningBody, env: Environment, omega):
    """Im a(x) [a_T(x) - a_T0(omega)] at x = omega, omega-, omega+."""
    pol, T, w0 = body.polarizability, body.T, body.omega0
    a0 = thermal_factor(omega, env.T0)
    wm, wp = omega - w0, omega + w0
    zz = pol.im_alpha_thermal(omega, T, "zz") - pol.im_alpha(omega, "zz") * a0
    minus = pol.im_alpha_thermal(wm, T, "xx") - pol.im_alpha(wm, "xx") * a0
    plus = pol.im_alpha_thermal(wp, T, "xx") - pol.im_alpha(wp, "xx") * a0
    return float(zz), float(minus), float(plus)


def power_spectral_density(body: SpinningBody, env: Environment, omega,
                           green: Optional[ImGreenDiag] = None,
                           quad: Optional[QuadratureConfig] = None) -> PowerDensity:
    """Channel-resolved dP/domega at ``omega > 0``."""
    if not omega > 0:
        raise DomainError("omega must be > 0")
    g = green if green is not None else _green(env, omega, quad)
    zz, minus, plus = _thermal_brackets(body, env, omega)
    c = PREFACTOR * omega**3
    return PowerDensity(zz=c * 2.0 * g.im_gzz * zz,
                        xx_minus=c * g.in_plane * minus,
                        xx_plus=c * g.in_plane * plus)


def torque_spectral_density(body: SpinningBody, env: Environment, omega,
                            green: Optional[ImGreenDiag] = None,
                            quad: Optional[QuadratureConfig] = None) -> TorqueDensity:
    """dM/domega at ``omega > 0``, split into the omega+ and omega- terms."""
    if not omega > 0:
        raise DomainError("omega must be > 0")
    g = green if green is not None else _green(env, omega, quad)
    _, minus, plus = _thermal_brackets(body, env, omega)
    c = PREFACTOR * omega**2 * g.in_plane
    return TorqueDensity(plus=c * plus, minus=c * minus)


def _torque_split(body, env, omega, g):
    """Dipole-fluctuation (M_P) and field-fluctuation (M_E) densities."""
    pol, T, w0 = body.polarizability, body.T, body.omega0
    wm, wp = omega - w0, omega + w0
    c = PREFACTOR * omega**2 * g.in_plane
    mp = c * (pol.im_alpha_thermal(wp, T) - pol.im_alpha_thermal(wm, T))
    me = c * (pol.im_alpha(wm) - pol.im_alpha(wp)) * thermal_factor(omega, env.T0)
    return float(mp), float(me)


def _is_null(body, env):
    return body.omega0 == 0 and body.T == env.T0


def frequency_window(body: SpinningBody, env: Environment):
    """Integration range; ``hard`` means the integrand vanishes beyond it."""
    w0 = abs(body.omega0)
    Tm = max(body.T, env.T0)
    if Tm == 0:
        return w0, True
    return w0 + CUTOFF_FACTOR * Tm, False


class _Integrand:
    """Vector integrand with a per-call Im G memo (safe: local to one call)."""

    def __init__(self, body, env, quad, kind):
        self.body, self.env, self.quad, self.kind = body, env, quad, kind
        self.cache = {}

    def green(self, w):
        g = self.cache.get(w)
        if g is None:
            g = self.cache[w] = _green(self.env, w, self.quad)
        return g

    def __call__(self, w):
        w = float(w)
        g = self.green(w)
        gerr = g.quadrature_error
        if self.kind == "power":
            d = power_spectral_density(self.body, self.env, w, green=g)
            zz, minus, plus = _thermal_brackets(self.body, self.env, w)
            c = PREFACTOR * w**3
            prop = c * (2 * abs(zz) * gerr[2] + abs(minus + plus) * (gerr[0] + gerr[1]))
            return np.array([d.total, d.zz, d.xx_minus, d.xx_plus, prop])
        if self.kind == "split":
            return np.array([*_torque_split(self.body, self.env, w, g), 0.0])
        d = torque_spectral_density(self.body, self.env, w, green=g)
        c = PREFACTOR * w**2
        prop = c * abs(d.plus - d.minus) / g.in_plane * (gerr[0] + gerr[1]) if g.in_plane else 0.0
        return np.array([d.total, d.plus, d.minus, prop])


def _integrate(body, env, quad, kind, split=False):
    quad = quad or QuadratureConfig()
    names = (("total", "zz", "xx_minus", "xx_plus") if kind == "power"
             else ("total", "plus", "minus"))
    if _is_null(body, env):
        parts = {n: 0.0 for n in names[1:]}
        if split:
            parts.update(M_P=0.0, M_E=0.0)
        return Total(0.0, 0.0, parts)
    f = _Integrand(body, env, quad, kind)
    wmax, hard = frequency_window(body, env)
    w0 = abs(body.omega0)

    def run(a, b, epsabs=quad.abs_tol):
        pts = [w0] if a < w0 < b else None
        res, err, info = integrate.quad_vec(
            f, a, b, epsabs=epsabs, epsrel=quad.rel_tol, norm="max",
            limit=quad.max_refinements, points=pts, full_output=True)
        if not info.success:
            raise QuadratureError(
                f"{kind} integral over ({a:g}, {b:g}) did not converge: {info.message}",
                partial=float(res[0]), error=float(err))
        return res, err

    res, err = run(0.0, wmax)
    if not hard:
        # extend by octaves until the last one is negligible
        for _ in range(64):
            tol = max(quad.abs_tol, quad.rel_tol * np.max(np.abs(res[:-1])))
            tail, terr = run(wmax, 2.0 * wmax, epsabs=0.01 * tol)
            res, err = res + tail, err + terr
            wmax *= 2.0
            if np.max(np.abs(tail[:-1])) < 0.1 * tol:
                break
        else:
            raise QuadratureError(f"{kind} integrand does not decay", partial=float(res[0]))
    total_err = float(err + res[-1])
    parts = {n: float(v) for n, v in zip(names[1:], res[1:-1])}
    parts["omega_max"] = wmax
    if split:
        # each part alone carries a zero-point piece growing with omega that
        # cancels in the sum, so both are reported over the window of the total
        f.kind = "split"
        sp, _ = run(0.0, wmax, epsabs=max(quad.abs_tol, quad.rel_tol * abs(res[0])))
        parts["M_P"], parts["M_E"] = float(sp[0]), float(sp[1])
    return Total(float(res[0]), total_err, parts)


def radiated_power(body: SpinningBody, env: Environment,
                   quad: Optional[QuadratureConfig] = None) -> Total:
    """Total power emitted by the body (negative when it absorbs)."""
    return _integrate(body, env, quad, "power")


def friction_torque(body: SpinningBody, env: Environment,
                    quad: Optional[QuadratureConfig] = None, *,
                    split: bool = False) -> Total:
    """Total torque about +z.

    With ``split=True``, ``parts`` also carries ``M_P`` (dipole fluctuations)
    and ``M_E`` (field fluctuations), both integrated over the window used
    for the total.  Only their sum is cutoff independent.
    """
    return _integrate(body, env, quad, "torque", split)


def spectrum(body: SpinningBody, env: Environment, omega_grid,
             quad: Optional[QuadratureConfig] = None,
             totals: bool = True) -> SpectralResult:
    """Power and torque densities on a grid, plus adaptive totals."""
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("omega_grid must be positive and strictly increasing")
    dp = {k: np.empty(grid.size) for k in ("zz", "xx_minus", "xx_plus", "total")}
    dm = {k: np.empty(grid.size) for k in ("plus", "minus", "total")}
    for i, w in enumerate(grid):
        g = _green(env, w, quad)
        p = power_spectral_density(body, env, w, green=g)
        m = torque_spectral_density(body, env, w, green=g)
        dp["zz"][i], dp["xx_minus"][i], dp["xx_plus"][i], dp["total"][i] = (
            p.zz, p.xx_minus, p.xx_plus, p.total)
        dm["plus"][i], dm["minus"][i], dm["total"][i] = m.plus, m.minus, m.total
    if totals:
        P, M = radiated_power(body, env, quad), friction_torque(body, env, quad)
        tp, tm, errs = P.value, M.value, {"power": P.error, "torque": M.error}
    else:
        tp = tm = float("nan")
        errs = {"power": float("nan"), "torque": float("nan")}
    return SpectralResult(grid, dp, dm, tp, tm, errs)


@dataclass(frozen=True)
class SweepPoint:
    z: float
    power: Optional[Total]
    torque: Optional[Total]
    error: Optional[str] = None


def default_workers():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def separation_sweep(body: SpinningBody, env_template: Environment, z_values,
                     quad: Optional[QuadratureConfig] = None,
                     workers: Optional[int] = None) -> list:
    """Power and torque at each separation; per-point failures are recorded.

    Points are independent, so they may run on a thread pool; the output
    order always matches ``z_values``.
    """
    zs = [float(z) for z in z_values]
    if any(z <= 0 for z in zs) or any(b <= a for a, b in zip(zs, zs[1:])):
        raise DomainError("z_values must be positive and increasing")
    geom = env_template.geometry

    def one(z):
        env = env_template if isinstance(geom, Vacuum) else replace(
            env_template, geometry=replace(geom, z=z))
        try:
            return SweepPoint(z, radiated_power(body, env, quad),
                              friction_torque(body, env, quad))
        except (QuadratureError, ArithmeticError, ValueError) as exc:
            return SweepPoint(z, None, None, f"{type(exc).__name__}: {exc}")

    n = workers or default_workers()
    if n == 1:
        return [one(z) for z in zs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(one, zs))
