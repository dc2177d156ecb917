"""Exception hierarchy shared by all modules."""


class BiphotonError(Exception):
    """Base class for all package errors."""


class ConfigError(BiphotonError):
    """Invalid configuration input (bad value, unit, or file)."""


class WavelengthRangeError(ConfigError):
    """Wavelength outside the validity range of a dispersion dataset."""

    def __init__(self, wavelength_um, lo_um, hi_um):
        self.wavelength_um = wavelength_um
        self.lo_um = lo_um
        self.hi_um = hi_um
        super().__init__(
            f"wavelength {wavelength_um:g} um outside Sellmeier validity "
            f"range [{lo_um:g}, {hi_um:g}] um"
        )


class RegimeError(BiphotonError):
    """Configuration outside the noncollinear regime the formulas assume."""


class DegenerateGeometryError(BiphotonError):
    """Exactly back-to-back photon pair: pump transverse momentum vanishes."""


class ResolutionError(BiphotonError):
    """Grid too coarse to resolve the narrowest feature of a kernel."""

    def __init__(self, message, required_points=None):
        self.required_points = required_points
        super().__init__(message)


class InfeasibleLayoutError(BiphotonError):
    """Channel layout violates a spacing or fiber-size constraint."""
