"""Exception types shared across the package.

The CLI maps these onto exit codes: ValidationError (and subclasses) to 2,
NumericError to 3.
"""


class ValidationError(ValueError):
    """Bad input: out-of-range parameter, malformed file, shape mismatch."""


class IntegrityError(ValidationError):
    """A file's digest or magic string does not match what was expected."""


class NumericError(ArithmeticError):
    """A numeric routine failed (e.g. SVD did not converge)."""
