"""Simulation and numerical checks for Berry's random wave model.

Submodules: ``specfun`` (Bessel functions, covariance kernels), ``sampler``
(realizations), ``geometry`` (domains, nodal length, vortices), ``chaos``
(Hermite/Wiener-chaos functionals), ``asymptotics`` (deterministic
covariance integrals) and ``experiments`` (Monte Carlo harness).
"""
from . import asymptotics, chaos, geometry, sampler, specfun
from .errors import (
    BerryError, ConfigError, InvalidArgumentError, OutOfDomainError, ParseError,
    ResolutionError, UnsupportedCaseError,
)
from .sampler import WaveSpec, sample_complex, sample_wave
from .specfun import bessel_j, kernel_set

__version__ = "0.1.0"
