"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, data contract
violations exit 2, scorer/service failures exit 3.
"""


class SlotshotError(Exception):
    """Base class for all package errors."""


class DataContractError(SlotshotError):
    """An input value violates a documented invariant."""


class MalformedTemplateError(DataContractError):
    """A question template does not contain the placeholder exactly once."""


class InvalidScoresError(DataContractError):
    """Score vectors are non-finite, empty, or of mismatched length."""


class ScorerError(SlotshotError):
    """Base class for failures while obtaining scores from a scorer."""


class ScorerTimeoutError(ScorerError):
    """The external scorer did not answer within the configured timeout."""


class ScorerProtocolError(ScorerError):
    """The external scorer sent a malformed or unexpected response."""


class ScorerLengthMismatchError(ScorerError):
    """The external scorer returned vectors of the wrong length."""


class ServiceError(SlotshotError):
    """The annotation service cannot satisfy a request."""


class ValidationError(ServiceError):
    """An annotator payload failed validation; carries a reason string."""


class NotFoundError(ServiceError):
    """A request referenced a task, template, or relation that is not stored."""


class ConflictError(ServiceError):
    """A request collides with existing state (full task, repeat submission)."""
