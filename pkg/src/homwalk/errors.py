"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A numerical precondition was violated (nonpositive conformal factor,
    under-resolved packet, weight below the division floor, ...).

    The CLI maps this to exit code 3.
    """


class ConfigError(ValueError):
    """A run configuration is malformed (unknown key, missing field,
    out-of-range parameter).  The CLI maps this to exit code 2.
    """
