"""Pure domain layer: persistent types, session lifecycle, authorization.

No I/O happens here; everything is value-like and safe to share across
threads. Mutation goes through the persistence layer's transactions.
"""

from llteacher.domain.authz import Action, Decision, ResourceRef, authorize
from llteacher.domain.lifecycle import GradeEvent, SubmitEvent, transition
from llteacher.domain.models import (
    Author,
    Grade,
    GuardAction,
    Homework,
    Message,
    Mode,
    Role,
    Session,
    SessionStatus,
    SubmissionRow,
    SubmissionStatus,
    User,
    new_id,
    utcnow,
)
from llteacher.domain.submissions import derive_submission_rows

__all__ = [
    "Action",
    "Author",
    "Decision",
    "Grade",
    "GradeEvent",
    "GuardAction",
    "Homework",
    "Message",
    "Mode",
    "ResourceRef",
    "Role",
    "Session",
    "SessionStatus",
    "SubmissionRow",
    "SubmissionStatus",
    "SubmitEvent",
    "User",
    "authorize",
    "derive_submission_rows",
    "new_id",
    "transition",
    "utcnow",
]
