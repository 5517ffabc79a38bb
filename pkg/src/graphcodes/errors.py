"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` so the command-line front end can map
failures to the documented process status without a lookup table.
"""


class GraphCodesError(Exception):
    exit_code = 2


class DimensionError(GraphCodesError, ValueError):
    pass


class DomainError(GraphCodesError, ValueError):
    pass


class ParameterError(GraphCodesError, ValueError):
    pass


class PreconditionError(GraphCodesError, ValueError):
    pass


class DegenerateCodeError(GraphCodesError, ValueError):
    """The code is {0}; it has no nonzero word and hence no minimum distance."""


class ApplicabilityError(GraphCodesError, ValueError):
    pass


class ProvenanceError(GraphCodesError, ValueError):
    pass


class ParseError(GraphCodesError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(GraphCodesError, ValueError):
    pass


class SizeError(GraphCodesError):
    """A configured enumeration or vertex cap would be exceeded."""

    exit_code = 3


class FeasibilityError(GraphCodesError):
    exit_code = 3


class SearchExhausted(GraphCodesError):
    exit_code = 4
