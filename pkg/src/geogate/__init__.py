"""Adiabatic Abelian geometric gates for superconducting phase qubits."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    GeoGateError,
    ResolutionError,
    SingularityError,
    UnobservablePhaseError,
)

__all__ = [
    "__version__",
    "GeoGateError",
    "DomainError",
    "SingularityError",
    "ResolutionError",
    "UnobservablePhaseError",
    "ConfigError",
]
