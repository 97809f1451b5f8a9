"""Persistent domain types.

All types are immutable; invariants are checked at construction so an
instance that exists is a valid one. Identifiers are opaque strings
generated server-side.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from llteacher.errors import ValidationFailed


def new_id() -> str:
    return uuid.uuid4().hex


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Role(Enum):
    INSTRUCTOR = "instructor"
    STUDENT = "student"


class Mode(Enum):
    RECALL = "recall"
    DISCOVERY = "discovery"


class SessionStatus(Enum):
    IN_PROGRESS = "in_progress"
    SUBMITTED = "submitted"
    GRADED = "graded"


class Author(Enum):
    STUDENT = "student"
    TUTOR = "tutor"
    SYSTEM_NOTICE = "system_notice"


class GuardAction(Enum):
    NONE = "none"
    REGENERATED = "regenerated"
    REDACTED = "redacted"


class SubmissionStatus(Enum):
    """Display status for the instructor's submissions table.

    NOT_STARTED is derived (no session row exists); the other three mirror
    the stored session status.
    """

    NOT_STARTED = "not_started"
    IN_PROGRESS = "in_progress"
    SUBMITTED = "submitted"
    GRADED = "graded"


@dataclass(frozen=True)
class User:
    id: str
    display_name: str
    role: Role
    credential_hash: bytes

    def __post_init__(self) -> None:
        if not self.display_name.strip():
            raise ValidationFailed("display_name must be nonempty")


@dataclass(frozen=True)
class Homework:
    """An assignment: public problem statement plus an instructor-only
    solution that is fed to the prompt engine but never shown to students."""

    id: str
    title: str
    problem_statement: str
    solution: str
    mode: Mode
    created_by: str
    created_at: datetime
    due_at: datetime | None = None

    def __post_init__(self) -> None:
        for name in ("title", "problem_statement", "solution"):
            if not getattr(self, name).strip():
                raise ValidationFailed(f"homework {name} must be nonempty")


@dataclass(frozen=True)
class Message:
    """One transcript turn entry.

    guard_action is only meaningful on tutor messages; it records whether
    the leak guard regenerated or redacted the reply.
    """

    seq: int
    author: Author
    content: str
    created_at: datetime
    guard_action: GuardAction | None = None

    def __post_init__(self) -> None:
        if self.seq < 1:
            raise ValidationFailed("message seq must be positive")
        if self.author in (Author.STUDENT, Author.TUTOR) and not self.content:
            raise ValidationFailed("student/tutor message content must be nonempty")
        if self.guard_action is not None and self.author is not Author.TUTOR:
            raise ValidationFailed("guard_action is only valid on tutor messages")


@dataclass(frozen=True)
class Grade:
    score: float
    feedback: str
    graded_by: str
    graded_at: datetime

    def __post_init__(self) -> None:
        if not 0 <= self.score <= 100:
            raise ValidationFailed("score must be within [0, 100]")


@dataclass(frozen=True)
class Session:
    """One student's conversational attempt at one homework.

    The message list is append-only: operations only ever extend it, and
    sequence numbers run 1..n without gaps.
    """

    id: str
    homework_id: str
    student_id: str
    status: SessionStatus
    messages: tuple[Message, ...]
    started_at: datetime
    submitted_at: datetime | None = None
    grade: Grade | None = None

    def __post_init__(self) -> None:
        for i, msg in enumerate(self.messages, start=1):
            if msg.seq != i:
                raise ValidationFailed(
                    f"message sequence broken: position {i} holds seq {msg.seq}"
                )
        submitted_like = self.status in (SessionStatus.SUBMITTED, SessionStatus.GRADED)
        if (self.submitted_at is not None) != submitted_like:
            raise ValidationFailed("submitted_at is set iff status is submitted/graded")
        if (self.grade is not None) != (self.status is SessionStatus.GRADED):
            raise ValidationFailed("grade is set iff status is graded")

    @property
    def student_turn_count(self) -> int:
        return sum(1 for m in self.messages if m.author is Author.STUDENT)

    def last_activity_at(self) -> datetime:
        stamps = [self.started_at]
        stamps.extend(m.created_at for m in self.messages)
        if self.submitted_at is not None:
            stamps.append(self.submitted_at)
        if self.grade is not None:
            stamps.append(self.grade.graded_at)
        return max(stamps)


@dataclass(frozen=True)
class SubmissionRow:
    """One line of the instructor's per-homework submissions overview."""

    student_id: str
    student_display_name: str
    status: SubmissionStatus
    last_activity_at: datetime | None = None
    session_id: str | None = None

    def __post_init__(self) -> None:
        if (self.session_id is None) != (self.status is SubmissionStatus.NOT_STARTED):
            raise ValidationFailed("session_id is absent iff status is not_started")
