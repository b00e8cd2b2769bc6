"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid user-supplied input: malformed CSV, misaligned series,
    coefficients outside their physical domain, or an unstable reference
    simulation. The CLI maps this to exit code 2."""
