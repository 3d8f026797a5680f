"""Exception types shared across the package."""


class BudgetExceededError(RuntimeError):
    """An exhaustive search or randomized search ran out of its enumeration budget.

    Raised instead of returning a possibly-wrong answer.  The CLI maps this
    to exit code 3.
    """


class RegimeError(ValueError):
    """Parameter ledger rejected the input regime (e.g. p outside (0, 1))."""


class KhgParseError(ValueError):
    """A `khg v1` file violated the grammar.  Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
