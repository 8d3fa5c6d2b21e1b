"""Exception types shared across the package.

The CLI maps each family onto its own exit status, so library code should
raise the most specific class that applies.
"""


class GeoGateError(Exception):
    """Base class for all package errors."""


class DomainError(GeoGateError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """The computation hits a genuine pole (e.g. the south-pole gauge pole of
    the solid-angle integrand, or a diverging junction inductance)."""


class ResolutionError(GeoGateError):
    """A discretisation is too coarse to resolve the dynamics."""


class UnobservablePhaseError(DomainError):
    """A relative phase was requested from coherences that are (numerically) zero."""


class ConfigError(GeoGateError):
    """Invalid or unknown configuration entries."""
