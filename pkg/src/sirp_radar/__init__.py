"""Angular spacing estimation and resolution limits for MIMO radar in SIRP clutter."""

from ._errors import ConfigError, NumericalError

__version__ = "0.1.0"

__all__ = ["ConfigError", "NumericalError", "__version__"]
