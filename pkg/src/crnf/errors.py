"""Error taxonomy shared by the whole package.

Exit codes used by the command line front end are attached to the classes so
scripting contracts stay in one place.
"""


class CrnfError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class SchemaError(CrnfError):
    """Malformed input file: bad JSON, bad rational string, wrong shape.

    ``line`` and ``column`` are best-effort 1-based positions in the source
    text (always present for JSON syntax errors, located by token search for
    bad rational strings inside valid JSON).
    """

    exit_code = 4

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DegenerateWError(CrnfError):
    """The invariant cubic W vanishes while the resonance rule is active."""

    exit_code = 2


class NonAffineResolutionError(CrnfError):
    """A resonance condition cannot be solved for any unresolved parameter."""

    exit_code = 3

    def __init__(self, degree, message):
        self.degree = degree
        super().__init__(f"degree {degree}: {message}")


class ParameterCapExceededError(CrnfError):
    """Parameter-polynomial arithmetic exceeded the configured degree cap."""


class ChainInfeasibleError(CrnfError):
    """The literal chain normal space admits no solution at some degree."""

    def __init__(self, degree, message):
        self.degree = degree
        super().__init__(f"degree {degree}: {message}")
