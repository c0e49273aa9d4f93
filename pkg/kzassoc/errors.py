"""
Exception hierarchy shared by all kzassoc modules.
"""


class KzAssocError(Exception):
    """Base class for every error raised by kzassoc."""


class ContractViolation(KzAssocError):
    """Operands disagree on alphabet, truncation degree, precision or backend."""


class DomainError(KzAssocError, ValueError):
    """An operation was called outside its mathematical domain."""


class ResourceGuardError(KzAssocError):
    """A size guard refused to build an object of the requested degree."""

    def __init__(self, degree, words, limit):
        super().__init__(
            f"degree {degree} needs {words} monomials, above the guard of {limit}"
        )
        self.degree = degree
        self.words = words
        self.limit = limit


class SeriesFormatError(KzAssocError, ValueError):
    """A series document, table document or cache entry could not be used."""


class DslError(KzAssocError):
    """Error raised while parsing or evaluating relation text.

    ``line`` and ``column`` are 1-based; they are ``None`` when the error is
    not attached to a source position.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class DslSyntaxError(DslError):
    """Lexical or grammatical error in relation text."""


class UnboundNameError(DslError):
    """A series, map or generator name has no binding in the context."""


class ArityError(DslError):
    """A substitution lists the wrong number of arguments."""


class BackendMismatchError(DslError):
    """Factors of one product live in different algebras."""
