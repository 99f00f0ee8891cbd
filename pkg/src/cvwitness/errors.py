"""Exception types shared across the package."""


class CutoffError(ValueError):
    """The Fock cutoff is too small for the requested operation."""


class SpecError(ValueError):
    """A minor index tuple violates the zero-pattern constraint."""


class AliasingError(ValueError):
    """Residual spectral power above the band limit of a phase grid."""


class UnsupportedError(ValueError):
    """No closed form (or no noise model) exists for this family/spec pair."""


class ConfigError(ValueError):
    """Invalid command-line or config-file input."""
