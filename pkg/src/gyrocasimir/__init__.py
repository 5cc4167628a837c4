"""Casimir pressure between gyrotropic, dielectric and ideal plates.

Lifshitz theory on the Matsubara axis with full 2x2 reflection matrices
obtained by matching plane-wave eigenmodes at each interface.
"""
from .analysis import (Equilibrium, PressureCurve, RepulsionDiagnostic, find_equilibria,
                       ideal_benchmarks, pressure_sweep, repulsion_diagnostic)
from .errors import (CasimirError, ConfigError, ConvergenceError, DegenerateModeError,
                     DomainError, GrazingModeError, MatchingError, ModeInstabilityError,
                     SingularMediumError)
from .lifshitz import (PlateSystem, PressureResult, free_energy, pressure,
                       zero_temperature_free_energy, zero_temperature_pressure)
from .materials import (IdealPlate, IsotropicParams, MagnetoPlasmaParams, PermittivityTensor,
                        SiliconParams, WeylParams)
from .reflection import Axis, Face, Plate, ReflectionMatrix, plate_reflection

__version__ = "0.1.0"

__all__ = [
    "Axis", "CasimirError", "ConfigError", "ConvergenceError", "DegenerateModeError",
    "DomainError", "Equilibrium", "Face", "GrazingModeError", "IdealPlate", "IsotropicParams",
    "MagnetoPlasmaParams", "MatchingError", "ModeInstabilityError", "PermittivityTensor",
    "Plate", "PlateSystem", "PressureCurve", "PressureResult", "ReflectionMatrix",
    "RepulsionDiagnostic", "SiliconParams", "SingularMediumError", "WeylParams",
    "find_equilibria", "free_energy", "ideal_benchmarks", "plate_reflection", "pressure",
    "pressure_sweep", "repulsion_diagnostic", "zero_temperature_free_energy",
    "zero_temperature_pressure",
]
