"""Rotational friction and radiation of a small spinning sphere.

Torque, radiated power and their spectra for a point-dipole sphere rotating
near vacuum, a lossy half-space or an ideal conductor.  All computations run
in scaled units (see :mod:`rotfric.units`).
"""
__version__ = "0.1.0"

from .errors import (BranchCutError, ConfigError, DomainError, FrequencyRangeError,
                     MonotonicityError, ParseError, PassivityError, PoleError,
                     QuadratureError, RotfricError, SingularPointError)
from .greens import (BACKEND, HalfSpace, IdealConductor, ImGreenDiag, Vacuum, im_g,
                     im_g_conductor, im_g_halfspace, im_g_vacuum)
from .materials import Constant, Drude, Lorentz, Tabulated, epsilon, load_tabulated
from .observables import (Environment, QuadratureConfig, SpectralResult, SpinningBody,
                          friction_torque, power_spectral_density, radiated_power,
                          separation_sweep, spectrum, torque_spectral_density)
from .response import (BodySusceptibility, Polarizability, gamma_kernels, lab_frame_chi,
                       mie_polarizability, thermal_factor)
from .units import UnitSystem
