"""Exception types raised across the package."""


class PatternTreeError(Exception):
    """Base class for all errors raised by this package."""


class SymbolMismatch(PatternTreeError):
    pass


class InvalidDecomposition(PatternTreeError):
    pass


class VertexLimit(PatternTreeError):
    pass


class DomainLimit(PatternTreeError):
    pass


class InvalidAnchor(PatternTreeError):
    pass


class BudgetExceeded(PatternTreeError):
    pass


class CapExceeded(PatternTreeError):
    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count


class NotWellDesigned(PatternTreeError):
    pass


class WidthCapExceeded(PatternTreeError):
    pass


class RootHasNoParent(PatternTreeError):
    pass


class ParseError(PatternTreeError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DataError(PatternTreeError):
    """Malformed fact file, mapping or pattern-tree document."""


class UnknownVariableWarning(UserWarning):
    """A selected variable never occurs in the query body."""
