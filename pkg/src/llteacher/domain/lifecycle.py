"""Session lifecycle state machine.

Exactly two edges exist: InProgress --Submit--> Submitted and
Submitted --Grade--> Graded. Every other (status, event) pair raises
IllegalTransition. Transitions never touch the message list.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime

from llteacher.domain.models import Grade, Role, Session, SessionStatus, User
from llteacher.errors import IllegalTransition, Unauthorized


@dataclass(frozen=True)
class SubmitEvent:
    at: datetime


@dataclass(frozen=True)
class GradeEvent:
    grade: Grade
    grader: User


def transition(session: Session, event: SubmitEvent | GradeEvent) -> Session:
    """Apply a lifecycle event, returning the updated session.

    Raises IllegalTransition when the event has no edge from the current
    status, and Unauthorized when a Grade event comes from a non-instructor.
    """
    if isinstance(event, SubmitEvent):
        if session.status is not SessionStatus.IN_PROGRESS:
            raise IllegalTransition(
                f"cannot submit a session in status {session.status.value}"
            )
        return replace(
            session, status=SessionStatus.SUBMITTED, submitted_at=event.at
        )
    if isinstance(event, GradeEvent):
        if event.grader.role is not Role.INSTRUCTOR:
            raise Unauthorized("only instructors may grade")
        if session.status is not SessionStatus.SUBMITTED:
            raise IllegalTransition(
                f"cannot grade a session in status {session.status.value}"
            )
        return replace(session, status=SessionStatus.GRADED, grade=event.grade)
    raise IllegalTransition(f"unknown event {event!r}")
