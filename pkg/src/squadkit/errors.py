"""Exception types shared across the package.

The CLI maps :class:`CheckFailure` to exit code 1 and :class:`SchemaError`
to exit code 2.
"""


class SchemaError(ValueError):
    """Malformed input: unknown names, missing table entries, bad JSON shape."""


class CheckFailure(Exception):
    """A mathematical check failed; ``witness`` names the offending datum."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InconsistentPresentation(CheckFailure):
    """Some degree-one relator has a boundary outside the degree-zero relations."""
