"""Numerical toolkit for weighted Bergman space Carleson measures.

The compiled kernels are used when the extension is built; otherwise a numpy
implementation is selected at import (see :mod:`bergman_lab.backend`).
"""

from .backend import NAME as BACKEND
from .carleson import (CarlesonParams, CarlesonReport, carleson_check, equivalence_triple,
                       schur_boundedness_check, vanishing_profile)
from .compop import CompOpSpec, apply_operator, power_diagnostic, pullback_measure
from .errors import (AdmissibilityError, BergmanLabError, ConstructionError, NumericalError,
                     ParameterError)
from .geometry import DiskPoint, make_lattice, mobius, pseudo_disk, rho
from .kernels import kernel, kernel_norm, normalized_kernel
from .measure import (atomic, disk_masses, integrate, kernel_integrals, lebesgue,
                      radial_density, truncated, weighted_area, zero_measure)
from .quadrature import QuadratureSpec
from .transforms import averaging, berezin_t
from .weights import make_custom_weight, make_standard_weight

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CarlesonParams", "CarlesonReport", "carleson_check", "equivalence_triple",
    "schur_boundedness_check", "vanishing_profile", "CompOpSpec", "apply_operator",
    "power_diagnostic", "pullback_measure", "AdmissibilityError", "BergmanLabError",
    "ConstructionError", "NumericalError", "ParameterError", "DiskPoint", "make_lattice",
    "mobius", "pseudo_disk", "rho", "kernel", "kernel_norm", "normalized_kernel", "atomic",
    "disk_masses", "integrate", "kernel_integrals", "lebesgue", "radial_density", "truncated",
    "weighted_area", "zero_measure", "QuadratureSpec", "averaging", "berezin_t",
    "make_custom_weight", "make_standard_weight",
]
