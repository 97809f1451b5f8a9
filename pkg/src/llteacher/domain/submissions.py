"""Projection of sessions into the instructor's submissions overview."""

from __future__ import annotations

from llteacher.domain.models import (
    Homework,
    Session,
    SubmissionRow,
    SubmissionStatus,
    User,
)
from llteacher.errors import InconsistentInput

_STATUS_MAP = {
    "in_progress": SubmissionStatus.IN_PROGRESS,
    "submitted": SubmissionStatus.SUBMITTED,
    "graded": SubmissionStatus.GRADED,
}


def derive_submission_rows(
    homework: Homework, students: list[User], sessions: list[Session]
) -> list[SubmissionRow]:
    """One row per student, sorted by display name then id.

    Students without a session show as NotStarted. A student with several
    sessions (a graded one plus a fresh attempt) is shown by the most
    recently started one.
    """
    known = {s.id for s in students}
    by_student: dict[str, Session] = {}
    for session in sessions:
        if session.homework_id != homework.id:
            raise InconsistentInput(
                f"session {session.id} belongs to homework {session.homework_id}"
            )
        if session.student_id not in known:
            raise InconsistentInput(
                f"session {session.id} references unknown student {session.student_id}"
            )
        current = by_student.get(session.student_id)
        if current is None or session.started_at > current.started_at:
            by_student[session.student_id] = session

    rows = []
    for student in sorted(students, key=lambda u: (u.display_name, u.id)):
        session = by_student.get(student.id)
        if session is None:
            rows.append(
                SubmissionRow(
                    student_id=student.id,
                    student_display_name=student.display_name,
                    status=SubmissionStatus.NOT_STARTED,
                )
            )
        else:
            rows.append(
                SubmissionRow(
                    student_id=student.id,
                    student_display_name=student.display_name,
                    status=_STATUS_MAP[session.status.value],
                    last_activity_at=session.last_activity_at(),
                    session_id=session.id,
                )
            )
    return rows
