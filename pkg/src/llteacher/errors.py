"""Exception types shared across the service."""


class LLTeacherError(Exception):
    """Base class for all service errors."""


# -- domain ------------------------------------------------------------------

class IllegalTransition(LLTeacherError):
    """Requested lifecycle event is not legal for the session's status."""


class Unauthorized(LLTeacherError):
    """Caller's role/ownership does not permit the action."""


class InconsistentInput(LLTeacherError):
    """Inputs reference each other inconsistently (e.g. unknown student)."""


class ValidationFailed(LLTeacherError):
    """A field value violates its documented constraints."""


class EmptyField(ValidationFailed):
    """A required text field is empty."""


# -- gateway -----------------------------------------------------------------

class GatewayError(LLTeacherError):
    """Base class for provider-call failures."""


class ProviderUnavailable(GatewayError):
    """Retries exhausted against transport errors / 5xx / 429."""


class ProviderRejected(GatewayError):
    """Provider returned a non-retryable 4xx."""


class EmptyCompletion(GatewayError):
    """Provider only ever returned empty content."""


class ScriptExhausted(GatewayError):
    """Mock provider received more calls than scripted outcomes."""


# -- persistence -------------------------------------------------------------

class StoreError(LLTeacherError):
    """Base class for storage failures."""


class SchemaMismatch(StoreError):
    """Database file schema version differs from the expected version."""


class IoFailure(StoreError):
    """Underlying storage failed; the operation was not applied."""


class NotFound(StoreError):
    """Referenced entity does not exist."""


class ConflictingReference(StoreError):
    """Delete refused because dependent rows exist."""


class SessionLocked(StoreError):
    """Session is not InProgress; its transcript cannot grow."""


class SequenceGap(StoreError):
    """Appended messages do not continue the sequence gap-free."""


# -- api ---------------------------------------------------------------------

class InvalidCredentials(LLTeacherError):
    """Login name/credential pair did not match."""


class EmptyContent(ValidationFailed):
    """Chat message body is empty."""


class TurnLimitReached(LLTeacherError):
    """Configured per-session turn limit has been reached."""
