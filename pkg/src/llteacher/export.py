"""Portable transcript export.

One UTF-8 text file per session: a header block (homework title, student,
status, grade) followed by every message as a "[seq] [author] [timestamp]"
line plus the raw content.
"""

from __future__ import annotations

from pathlib import Path

from llteacher.domain.models import Homework, Session, User
from llteacher.store import Store


def format_transcript(session: Session, homework: Homework, student: User) -> str:
    grade_line = "(not graded)"
    if session.grade is not None:
        grade_line = f"{session.grade.score:g}/100"
        if session.grade.feedback:
            grade_line += f" - {session.grade.feedback}"
    lines = [
        f"Homework: {homework.title}",
        f"Student: {student.display_name}",
        f"Status: {session.status.value}",
        f"Grade: {grade_line}",
        "",
    ]
    for message in session.messages:
        stamp = message.created_at.isoformat()
        lines.append(f"[{message.seq}] [{message.author.value}] [{stamp}]")
        lines.append(message.content)
        lines.append("")
    return "\n".join(lines)


def export_transcripts(store: Store, homework_id: str, out_dir: str | Path) -> list[Path]:
    """Write every transcript of a homework into out_dir; returns the paths."""
    homework = store.get_homework(homework_id)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for session in store.list_sessions(homework_id=homework_id):
        student = store.get_user(session.student_id)
        path = out / f"{session.id}.txt"
        path.write_text(
            format_transcript(session, homework, student), encoding="utf-8"
        )
        written.append(path)
    return written
