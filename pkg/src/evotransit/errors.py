"""Exception types shared across the package."""


class EvoTransitError(Exception):
    """Base class for all evotransit errors."""


class DimensionMismatchError(EvoTransitError):
    """Two rasters (or frames) that must share dimensions do not."""


class EmptyMutableSetError(EvoTransitError):
    """Start and target agree on every pixel; there is nothing to evolve."""


class UnreadableFileError(EvoTransitError):
    """Input image file is missing or cannot be opened."""


class UnsupportedFormatError(EvoTransitError):
    """Input image is not one of the accepted formats (PNG, JPEG, BMP)."""


class DecodeError(EvoTransitError):
    """Input image is corrupt or truncated."""


class ImagingIoError(EvoTransitError):
    """Writing a frame or animation to disk failed."""


class EmptyFrameListError(EvoTransitError):
    """An animation was requested from zero frames."""


class CapExceededError(EvoTransitError):
    """A bitstring run hit the safety generation cap before the optimum."""


class UsageError(EvoTransitError):
    """Invalid command-line flags or flag values."""
