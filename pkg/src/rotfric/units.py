"""Scaled unit system.

Everything inside the library runs with hbar = c = eps0 = kB = 1.  The
remaining freedom is a characteristic angular frequency ``omega_c``; the
derived scales are

    time          1 / omega_c
    length        c / omega_c
    temperature   hbar * omega_c / kB
    energy        hbar * omega_c          (also the torque unit)
    power         hbar * omega_c**2

SI values enter and leave only through :class:`UnitSystem`.
"""
from __future__ import annotations

from dataclasses import dataclass

from scipy import constants as _sc

HBAR_SI = _sc.hbar
C_SI = _sc.c
EPS0_SI = _sc.epsilon_0
KB_SI = _sc.k


@dataclass(frozen=True)
class UnitSystem:
    """Conversion between SI and the internal scaled units.

    Parameters
    ----------
    omega_c : float
        Characteristic angular frequency in rad/s.  A good choice puts the
        interesting spectrum near 1, e.g. ``kB * T / hbar`` for the hottest
        temperature in the problem.
    """

    omega_c: float = KB_SI * 1.0 / HBAR_SI

    # internal values of the constants
    hbar: float = 1.0
    c: float = 1.0
    eps0: float = 1.0
    kB: float = 1.0

    def __post_init__(self):
        for name in ("omega_c", "hbar", "c", "eps0", "kB"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def for_temperature(cls, T_K: float) -> "UnitSystem":
        """Units with ``omega_c = kB * T / hbar``."""
        return cls(omega_c=KB_SI * T_K / HBAR_SI)

    # scale factors: SI value = internal value * scale
    @property
    def frequency(self) -> float:
        return self.omega_c

    @property
    def time(self) -> float:
        return 1.0 / self.omega_c

    @property
    def length(self) -> float:
        return C_SI / self.omega_c

    @property
    def temperature(self) -> float:
        return HBAR_SI * self.omega_c / KB_SI

    @property
    def energy(self) -> float:
        return HBAR_SI * self.omega_c

    @property
    def torque(self) -> float:
        return HBAR_SI * self.omega_c

    @property
    def power(self) -> float:
        return HBAR_SI * self.omega_c**2

    @property
    def conductivity(self) -> float:
        # sigma / (eps0 * omega) is dimensionless
        return EPS0_SI * self.omega_c

    def to_internal(self, value, quantity: str):
        return value / self._scale(quantity)

    def to_si(self, value, quantity: str):
        return value * self._scale(quantity)

    def _scale(self, quantity: str) -> float:
        if quantity not in QUANTITIES:
            raise KeyError(f"unknown quantity {quantity!r}")
        return getattr(self, quantity)


QUANTITIES = ("frequency", "time", "length", "temperature", "energy",
              "torque", "power", "conductivity")
