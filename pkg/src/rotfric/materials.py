"""Complex permittivity models.

Three variants are supported: a dc-conductivity Drude form, a sum of
Lorentz oscillators and linearly interpolated tabulated data.  All of them
use the exp(-i omega t) convention, so passive media have Im eps >= 0 for
omega > 0 and eps(-omega) = conj(eps(omega)).

Frequencies are in whatever unit the caller uses consistently; the
library itself passes internal (scaled) frequencies.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from scipy import integrate

from .errors import (DomainError, FrequencyRangeError, MonotonicityError,
                     ParseError, PassivityError)


@dataclass(frozen=True)
class Drude:
    """Low-frequency Drude metal, eps = 1 + i sigma0 / (eps0 omega).

    ``eps0`` defaults to the internal value 1; pass the SI value to evaluate
    with SI inputs directly.
    """

    sigma0: float
    eps0: float = 1.0

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise DomainError("Drude sigma0 must be > 0")
        if not self.eps0 > 0:
            raise DomainError("eps0 must be > 0")

    @property
    def relaxation(self) -> float:
        """sigma0 / eps0, the frequency scale below which the metal is 'good'."""
        return self.sigma0 / self.eps0

    def _eps(self, omega):
        return 1.0 + 1j * self.relaxation / omega


@dataclass(frozen=True)
class Lorentz:
    """Sum of oscillators, eps = 1 + sum_j s_j / (w_j**2 - omega**2 - i g_j omega).

    Each term is ``(strength, resonance, damping)``; ``strength`` has units of
    frequency squared (a plasma frequency squared).  ``resonance = 0`` gives
    a free-carrier term.
    """

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple(tuple(float(v) for v in t) for t in self.terms)
        for s, w, g in terms:
            if s < 0:
                raise PassivityError("Lorentz strengths must be >= 0")
            if w < 0:
                raise DomainError("Lorentz resonance frequencies must be >= 0")
            if not g > 0:
                raise PassivityError("Lorentz damping rates must be > 0")
        object.__setattr__(self, "terms", terms)

    def _eps(self, omega):
        eps = np.ones_like(omega, dtype=complex)
        for s, w, g in self.terms:
            eps = eps + s / (w * w - omega * omega - 1j * g * omega)
        return eps


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Linear interpolation of (omega, eps) samples, no extrapolation."""

    omega: np.ndarray
    eps: np.ndarray = field(repr=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        eps = np.asarray(self.eps, dtype=complex)
        if omega.ndim != 1 or omega.shape != eps.shape:
            raise ValueError("omega and eps must be 1-d arrays of equal length")
        if omega.size < 1:
            raise ValueError("empty table")
        if np.any(omega <= 0):
            raise DomainError("tabulated frequencies must be > 0")
        if np.any(np.diff(omega) <= 0):
            raise MonotonicityError("tabulated frequencies must be strictly increasing")
        if np.any(eps.imag < 0):
            i = int(np.argmax(eps.imag < 0))
            raise PassivityError(
                f"Im eps < 0 at omega = {omega[i]!r} (passive media need Im eps >= 0)")
        omega.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "eps", eps)

    @property
    def range(self):
        return float(self.omega[0]), float(self.omega[-1])

    def _eps(self, omega):
        lo, hi = self.range
        if np.any(omega < lo) or np.any(omega > hi):
            bad = np.asarray(omega)[(omega < lo) | (omega > hi)].flat[0]
            raise FrequencyRangeError(float(bad), lo, hi)
        re = np.interp(omega, self.omega, self.eps.real)
        im = np.interp(omega, self.omega, self.eps.imag)
        return re + 1j * im


@dataclass(frozen=True)
class Constant:
    """Frequency-independent permittivity (mainly for limiting-case checks).

    A lossy constant is not a physical model near omega = 0: Im eps jumps
    there, and thermal near-field torque integrals diverge logarithmically
    when the environment is warm.  Use it at fixed frequency or with T0 = 0.
    """

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if v.imag < 0:
            raise PassivityError("Im eps must be >= 0")
        object.__setattr__(self, "value", v)

    def _eps(self, omega):
        return np.full(np.shape(omega), self.value, dtype=complex)


DielectricModel = Union[Drude, Lorentz, Tabulated, Constant]


def epsilon(model: DielectricModel, omega):
    """Permittivity at angular frequency ``omega > 0``.

    Works element-wise on arrays.  Raises :class:`DomainError` for
    ``omega <= 0`` and :class:`FrequencyRangeError` outside a table.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0) or np.any(~np.isfinite(w)):
        raise DomainError("epsilon needs omega > 0; use epsilon_signed for "
                          "negative frequencies")
    out = model._eps(w)
    return out[()] if np.ndim(out) == 0 else out


def epsilon_signed(model: DielectricModel, omega):
    """eps at signed frequency, extended by eps(-w) = conj(eps(w)).

    ``omega = 0`` is rejected: the Drude form diverges there and callers
    handle the zero-frequency limit at the level of products that stay finite.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w == 0):
        raise DomainError("epsilon_signed is undefined at omega = 0")
    out = model._eps(np.abs(w))
    out = np.where(w < 0, np.conj(out), out)
    return out[()] if np.ndim(out) == 0 else out


def load_tabulated(path, *, check_kk: bool = True) -> Tabulated:
    """Read ``omega_rad_per_s, re_eps, im_eps`` records from a text file.

    Blank lines and ``#`` comments are skipped.  Parse problems raise
    :class:`ParseError` carrying the 1-based line number.
    """
    path = Path(path)
    rows = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise ParseError(f"expected 3 comma-separated fields, got {len(parts)}",
                                 lineno, path)
            try:
                w, re, im = (float(p) for p in parts)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, path) from None
            if not all(np.isfinite((w, re, im))):
                raise ParseError("non-finite value", lineno, path)
            if rows and w <= rows[-1][1]:
                raise MonotonicityError(
                    f"{path}:{lineno}: frequency {w!r} does not increase "
                    f"(previous {rows[-1][1]!r})")
            if im < 0:
                raise PassivityError(
                    f"{path}:{lineno}: Im eps = {im!r} < 0 violates passivity")
            rows.append((lineno, w, re, im))
    if not rows:
        raise ParseError("no data records", None, path)
    data = np.array([r[1:] for r in rows])
    model = Tabulated(data[:, 0], data[:, 1] + 1j * data[:, 2])
    if check_kk and data.shape[0] >= 8:
        resid = kramers_kronig_mismatch(model)
        if resid > 0.5:
            warnings.warn(f"{path}: tabulated data look Kramers-Kronig inconsistent "
                          f"(relative mismatch {resid:.2f}); continuing", stacklevel=2)
    return model


def kramers_kronig_mismatch(model: Tabulated) -> float:
    """Rough KK consistency score for a table; 0 means consistent.

    The principal-value transform of Im eps is truncated to the table, so
    only differences of Re eps between interior points are compared (the
    truncation mostly shifts Re eps by a slowly varying offset).
    """
    w, eps = model.omega, model.eps
    lo, hi = model.range

    def im_eps(x):
        return np.interp(x, w, eps.imag)

    def kk_re(x):
        # (2/pi) PV int nu Im eps(nu) / (nu^2 - x^2) dnu
        f = lambda nu: nu * im_eps(nu) / (nu + x)
        with warnings.catch_warnings():
            # kinks of the interpolant sit on the probes; the score is rough anyway
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, lo, hi, weight="cauchy", wvar=x, limit=200)
        return 2.0 / np.pi * val

    probes = w[len(w) // 4: 3 * len(w) // 4 + 1]
    probes = probes[(probes > lo) & (probes < hi)]
    if probes.size < 2:
        return 0.0
    rec = np.array([kk_re(x) for x in probes])
    d_rec = rec - rec[0]
    d_tab = eps.real[np.searchsorted(w, probes)] - np.interp(probes[0], w, eps.real)
    scale = max(np.max(np.abs(d_tab)), np.max(np.abs(d_rec)), 1e-300)
    return float(np.max(np.abs(d_rec - d_tab)) / scale)
