"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or input data (bad shapes, out-of-domain parameters)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or hit a degenerate instance."""
