"""Mixed Gaussian states of a scalar field coupled to dispersive media.

Submodules
----------
gaussian     covariance matrices, symplectic spectra, entropies
numerics     quadrature and fitting
dielectric   susceptibility models on the imaginary frequency axis
homogeneous  per-mode state and entropy density of an infinite medium
plates       two thin plates on a lattice
oracle       exact ground state of the coupled field-matter lattice
casimir      contour formula for the distance-dependent entropy
cli          command-line front end
"""
__version__ = "0.1.0"

from .errors import (ConfigError, ContourError, DomainError, FieldMatterError,  # noqa: F401
                     InvalidStateError, NumericalError, UnphysicalStateError)
