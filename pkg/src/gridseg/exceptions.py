"""Gridseg exceptions.

Every error carries the process exit code the CLI reports for it.
"""


class GridSegError(Exception):
    """Base class for all gridseg failures."""
    exit_code = 1


class InputError(GridSegError):
    """Raised when an input file, argument or configuration is unusable."""
    exit_code = 2


class ImageReadError(InputError):
    """Raised when an image file cannot be read."""
    pass


class UnsupportedImageError(InputError):
    """Raised for image modes outside 8-bit gray/RGB."""
    pass


class DimensionMismatchError(InputError):
    """Raised when paired arrays disagree in shape."""
    pass


class GridTooSmallError(InputError):
    """Raised when an image cannot host the requested lattice."""
    pass


class ConfigError(InputError):
    """Raised for malformed or unknown configuration keys."""
    pass


class ManifestError(InputError):
    """Raised for malformed or inconsistent dataset manifests."""
    pass


class MetricError(InputError):
    """Raised when a metric is undefined for the given ground truth."""
    pass


class NumericError(GridSegError):
    """Raised on non-finite losses, activations or gradients."""
    exit_code = 3


class ModelFormatError(GridSegError):
    """Raised when a model or tensor file is corrupt or of the wrong version."""
    exit_code = 4
