"""Durable storage on an embedded single-file relational database (SQLite).

All writes are transactional; a chat turn (student message plus the
resulting tutor message or system notice) commits atomically, so an
interrupted append leaves the transcript exactly as it was. One writer at a
time is enforced with a process-wide lock; readers go through the same lock
so they never observe a half-applied transaction on the shared connection.

The schema version is pinned: opening a file written by a different version
fails instead of silently migrating.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path

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
    User,
)
from llteacher.errors import (
    ConflictingReference,
    IoFailure,
    NotFound,
    SchemaMismatch,
    SequenceGap,
    SessionLocked,
    ValidationFailed,
)
from llteacher.prompting.config import GuardPolicy, TutorConfig, default_config

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE users (
    id TEXT PRIMARY KEY,
    display_name TEXT NOT NULL UNIQUE,
    role TEXT NOT NULL,
    credential_hash BLOB NOT NULL
);
CREATE TABLE homework (
    id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    problem_statement TEXT NOT NULL,
    solution TEXT NOT NULL,
    mode TEXT NOT NULL,
    created_by TEXT NOT NULL REFERENCES users(id),
    created_at TEXT NOT NULL,
    due_at TEXT
);
CREATE TABLE tutor_config (
    id INTEGER PRIMARY KEY CHECK (id = 1),
    model_id TEXT NOT NULL,
    base_prompt TEXT NOT NULL,
    guard_min_run INTEGER NOT NULL,
    guard_policy TEXT NOT NULL,
    max_turns INTEGER,
    temperature REAL NOT NULL
);
CREATE TABLE sessions (
    id TEXT PRIMARY KEY,
    homework_id TEXT NOT NULL REFERENCES homework(id),
    student_id TEXT NOT NULL REFERENCES users(id),
    status TEXT NOT NULL,
    started_at TEXT NOT NULL,
    submitted_at TEXT,
    grade_score REAL,
    grade_feedback TEXT,
    graded_by TEXT REFERENCES users(id),
    graded_at TEXT
);
CREATE UNIQUE INDEX sessions_one_active
    ON sessions(homework_id, student_id) WHERE status != 'graded';
CREATE TABLE messages (
    session_id TEXT NOT NULL REFERENCES sessions(id),
    seq INTEGER NOT NULL,
    author TEXT NOT NULL,
    content TEXT NOT NULL,
    created_at TEXT NOT NULL,
    guard_action TEXT,
    PRIMARY KEY (session_id, seq)
);
"""


def _dt(value: datetime | None) -> str | None:
    return None if value is None else value.isoformat()


def _parse_dt(value: str | None) -> datetime | None:
    return None if value is None else datetime.fromisoformat(value)


class Store:
    """Handle on one database file. Safe for concurrent use from threads."""

    def __init__(self, conn: sqlite3.Connection, location: str):
        self._conn = conn
        self.location = location
        self.schema_version = SCHEMA_VERSION
        self._lock = threading.RLock()

    # -- lifecycle -------------------------------------------------------

    @classmethod
    def open(cls, location: str | Path) -> "Store":
        try:
            conn = sqlite3.connect(
                str(location), isolation_level=None, check_same_thread=False
            )
            conn.execute("PRAGMA foreign_keys = ON")
            tables = conn.execute(
                "SELECT name FROM sqlite_master WHERE type = 'table'"
            ).fetchall()
        except sqlite3.Error as exc:
            raise IoFailure(f"cannot open store at {location}: {exc}") from exc
        store = cls(conn, str(location))
        if not tables:
            store._create_schema()
            return store
        try:
            row = conn.execute(
                "SELECT value FROM meta WHERE key = 'schema_version'"
            ).fetchone()
            found = int(row[0]) if row else None
        except (sqlite3.Error, ValueError):
            found = None
        if found != SCHEMA_VERSION:
            conn.close()
            raise SchemaMismatch(
                f"store at {location} has schema version {found}, "
                f"expected {SCHEMA_VERSION}"
            )
        return store

    def _create_schema(self) -> None:
        with self._tx():
            # executescript would force-commit the open transaction, so run
            # the statements one by one to keep creation all-or-nothing.
            for statement in _SCHEMA.split(";"):
                if statement.strip():
                    self._conn.execute(statement)
            self._conn.execute(
                "INSERT INTO meta (key, value) VALUES ('schema_version', ?)",
                (str(SCHEMA_VERSION),),
            )
            self._insert_config(default_config())

    def close(self) -> None:
        self._conn.close()

    @contextmanager
    def _tx(self):
        with self._lock:
            try:
                self._conn.execute("BEGIN IMMEDIATE")
            except sqlite3.Error as exc:
                raise IoFailure(f"cannot start transaction: {exc}") from exc
            try:
                yield
            except sqlite3.Error as exc:
                self._rollback()
                raise IoFailure(f"storage failure: {exc}") from exc
            except BaseException:
                self._rollback()
                raise
            else:
                try:
                    self._conn.execute("COMMIT")
                except sqlite3.Error as exc:
                    self._rollback()
                    raise IoFailure(f"commit failed: {exc}") from exc

    def _rollback(self) -> None:
        try:
            self._conn.execute("ROLLBACK")
        except sqlite3.Error:
            pass

    # -- users -----------------------------------------------------------

    def put_user(self, user: User) -> None:
        with self._tx():
            clash = self._conn.execute(
                "SELECT id FROM users WHERE display_name = ? AND id != ?",
                (user.display_name, user.id),
            ).fetchone()
            if clash:
                raise ValidationFailed(
                    f"display_name {user.display_name!r} is already in use"
                )
            self._conn.execute(
                "INSERT INTO users (id, display_name, role, credential_hash) "
                "VALUES (?, ?, ?, ?) "
                "ON CONFLICT(id) DO UPDATE SET display_name = excluded.display_name, "
                "credential_hash = excluded.credential_hash",
                (user.id, user.display_name, user.role.value, user.credential_hash),
            )

    def get_user(self, user_id: str) -> User:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, display_name, role, credential_hash FROM users "
                "WHERE id = ?",
                (user_id,),
            ).fetchone()
        if row is None:
            raise NotFound(f"user {user_id} not found")
        return self._user(row)

    def get_user_by_name(self, display_name: str) -> User:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, display_name, role, credential_hash FROM users "
                "WHERE display_name = ?",
                (display_name,),
            ).fetchone()
        if row is None:
            raise NotFound(f"user named {display_name!r} not found")
        return self._user(row)

    def list_users(self, role: Role | None = None) -> list[User]:
        query = "SELECT id, display_name, role, credential_hash FROM users"
        params: tuple = ()
        if role is not None:
            query += " WHERE role = ?"
            params = (role.value,)
        with self._lock:
            rows = self._conn.execute(query + " ORDER BY display_name, id", params)
            return [self._user(r) for r in rows.fetchall()]

    def delete_user(self, user_id: str) -> None:
        with self._tx():
            row = self._conn.execute(
                "SELECT id FROM users WHERE id = ?", (user_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"user {user_id} not found")
            dependents = self._conn.execute(
                "SELECT (SELECT COUNT(*) FROM sessions WHERE student_id = ?) + "
                "(SELECT COUNT(*) FROM sessions WHERE graded_by = ?) + "
                "(SELECT COUNT(*) FROM homework WHERE created_by = ?)",
                (user_id, user_id, user_id),
            ).fetchone()[0]
            if dependents:
                raise ConflictingReference(
                    f"user {user_id} is referenced by {dependents} row(s)"
                )
            self._conn.execute("DELETE FROM users WHERE id = ?", (user_id,))

    @staticmethod
    def _user(row) -> User:
        return User(
            id=row[0],
            display_name=row[1],
            role=Role(row[2]),
            credential_hash=row[3],
        )

    # -- homework ----------------------------------------------------------

    def put_homework(self, homework: Homework) -> None:
        with self._tx():
            creator = self._conn.execute(
                "SELECT role FROM users WHERE id = ?", (homework.created_by,)
            ).fetchone()
            if creator is None:
                raise NotFound(f"creator {homework.created_by} not found")
            self._conn.execute(
                "INSERT INTO homework (id, title, problem_statement, solution, "
                "mode, created_by, created_at, due_at) "
                "VALUES (?, ?, ?, ?, ?, ?, ?, ?) "
                "ON CONFLICT(id) DO UPDATE SET title = excluded.title, "
                "problem_statement = excluded.problem_statement, "
                "solution = excluded.solution, mode = excluded.mode, "
                "due_at = excluded.due_at",
                (
                    homework.id,
                    homework.title,
                    homework.problem_statement,
                    homework.solution,
                    homework.mode.value,
                    homework.created_by,
                    _dt(homework.created_at),
                    _dt(homework.due_at),
                ),
            )

    def get_homework(self, homework_id: str) -> Homework:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, title, problem_statement, solution, mode, created_by, "
                "created_at, due_at FROM homework WHERE id = ?",
                (homework_id,),
            ).fetchone()
        if row is None:
            raise NotFound(f"homework {homework_id} not found")
        return self._homework(row)

    def list_homework(self) -> list[Homework]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, title, problem_statement, solution, mode, created_by, "
                "created_at, due_at FROM homework ORDER BY created_at, id"
            ).fetchall()
        return [self._homework(r) for r in rows]

    def delete_homework(self, homework_id: str) -> None:
        with self._tx():
            row = self._conn.execute(
                "SELECT id FROM homework WHERE id = ?", (homework_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"homework {homework_id} not found")
            dependents = self._conn.execute(
                "SELECT COUNT(*) FROM sessions WHERE homework_id = ?",
                (homework_id,),
            ).fetchone()[0]
            if dependents:
                raise ConflictingReference(
                    f"homework {homework_id} has {dependents} session(s)"
                )
            self._conn.execute("DELETE FROM homework WHERE id = ?", (homework_id,))

    @staticmethod
    def _homework(row) -> Homework:
        return Homework(
            id=row[0],
            title=row[1],
            problem_statement=row[2],
            solution=row[3],
            mode=Mode(row[4]),
            created_by=row[5],
            created_at=_parse_dt(row[6]),
            due_at=_parse_dt(row[7]),
        )

    # -- tutor config ------------------------------------------------------

    def get_config(self) -> TutorConfig:
        with self._lock:
            row = self._conn.execute(
                "SELECT model_id, base_prompt, guard_min_run, guard_policy, "
                "max_turns, temperature FROM tutor_config WHERE id = 1"
            ).fetchone()
        if row is None:
            return default_config()
        return TutorConfig(
            model_id=row[0],
            base_prompt=row[1],
            guard_min_run=row[2],
            guard_policy=GuardPolicy(row[3]),
            max_turns=row[4],
            temperature=row[5],
        )

    def put_config(self, config: TutorConfig) -> None:
        with self._tx():
            self._conn.execute("DELETE FROM tutor_config WHERE id = 1")
            self._insert_config(config)

    def _insert_config(self, config: TutorConfig) -> None:
        self._conn.execute(
            "INSERT INTO tutor_config (id, model_id, base_prompt, guard_min_run, "
            "guard_policy, max_turns, temperature) VALUES (1, ?, ?, ?, ?, ?, ?)",
            (
                config.model_id,
                config.base_prompt,
                config.guard_min_run,
                config.guard_policy.value,
                config.max_turns,
                config.temperature,
            ),
        )

    # -- sessions ----------------------------------------------------------

    def create_session_if_absent(
        self, homework_id: str, student_id: str, session_id: str, now: datetime
    ) -> tuple[Session, bool]:
        """Return the student's non-graded session for this homework,
        creating it when none exists. Idempotent under races thanks to the
        partial unique index on (homework_id, student_id)."""
        with self._tx():
            if (
                self._conn.execute(
                    "SELECT id FROM homework WHERE id = ?", (homework_id,)
                ).fetchone()
                is None
            ):
                raise NotFound(f"homework {homework_id} not found")
            if (
                self._conn.execute(
                    "SELECT id FROM users WHERE id = ?", (student_id,)
                ).fetchone()
                is None
            ):
                raise NotFound(f"student {student_id} not found")
            existing = self._conn.execute(
                "SELECT id FROM sessions WHERE homework_id = ? AND student_id = ? "
                "AND status != 'graded'",
                (homework_id, student_id),
            ).fetchone()
            if existing:
                return self._load_session(existing[0]), False
            self._conn.execute(
                "INSERT INTO sessions (id, homework_id, student_id, status, "
                "started_at) VALUES (?, ?, ?, ?, ?)",
                (
                    session_id,
                    homework_id,
                    student_id,
                    SessionStatus.IN_PROGRESS.value,
                    _dt(now),
                ),
            )
            return self._load_session(session_id), True

    def get_session(self, session_id: str) -> Session:
        with self._lock:
            return self._load_session(session_id)

    def list_sessions(
        self, homework_id: str | None = None, student_id: str | None = None
    ) -> list[Session]:
        query = "SELECT id FROM sessions"
        clauses, params = [], []
        if homework_id is not None:
            clauses.append("homework_id = ?")
            params.append(homework_id)
        if student_id is not None:
            clauses.append("student_id = ?")
            params.append(student_id)
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        with self._lock:
            ids = [r[0] for r in self._conn.execute(query + " ORDER BY started_at, id", params)]
            return [self._load_session(sid) for sid in ids]

    def _load_session(self, session_id: str) -> Session:
        row = self._conn.execute(
            "SELECT id, homework_id, student_id, status, started_at, submitted_at, "
            "grade_score, grade_feedback, graded_by, graded_at "
            "FROM sessions WHERE id = ?",
            (session_id,),
        ).fetchone()
        if row is None:
            raise NotFound(f"session {session_id} not found")
        messages = tuple(
            Message(
                seq=m[0],
                author=Author(m[1]),
                content=m[2],
                created_at=_parse_dt(m[3]),
                guard_action=GuardAction(m[4]) if m[4] is not None else None,
            )
            for m in self._conn.execute(
                "SELECT seq, author, content, created_at, guard_action "
                "FROM messages WHERE session_id = ? ORDER BY seq",
                (session_id,),
            ).fetchall()
        )
        grade = None
        if row[6] is not None:
            grade = Grade(
                score=row[6],
                feedback=row[7] or "",
                graded_by=row[8],
                graded_at=_parse_dt(row[9]),
            )
        return Session(
            id=row[0],
            homework_id=row[1],
            student_id=row[2],
            status=SessionStatus(row[3]),
            messages=messages,
            started_at=_parse_dt(row[4]),
            submitted_at=_parse_dt(row[5]),
            grade=grade,
        )

    def append_messages(self, session_id: str, messages: list[Message]) -> Session:
        """Persist one turn atomically: all messages or none of them.

        Requires the session to be InProgress and the new sequence numbers
        to continue the stored transcript without gaps.
        """
        if not messages:
            raise SequenceGap("a turn must contain at least one message")
        with self._tx():
            row = self._conn.execute(
                "SELECT status FROM sessions WHERE id = ?", (session_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"session {session_id} not found")
            if row[0] != SessionStatus.IN_PROGRESS.value:
                raise SessionLocked(f"session {session_id} is {row[0]}")
            last = self._conn.execute(
                "SELECT COALESCE(MAX(seq), 0) FROM messages WHERE session_id = ?",
                (session_id,),
            ).fetchone()[0]
            for offset, message in enumerate(messages, start=1):
                if message.seq != last + offset:
                    raise SequenceGap(
                        f"expected seq {last + offset}, got {message.seq}"
                    )
            for message in messages:
                self._conn.execute(
                    "INSERT INTO messages (session_id, seq, author, content, "
                    "created_at, guard_action) VALUES (?, ?, ?, ?, ?, ?)",
                    (
                        session_id,
                        message.seq,
                        message.author.value,
                        message.content,
                        _dt(message.created_at),
                        message.guard_action.value if message.guard_action else None,
                    ),
                )
            return self._load_session(session_id)

    def update_status(self, session_id: str, event: SubmitEvent | GradeEvent) -> Session:
        """Apply a lifecycle transition and persist it atomically."""
        with self._tx():
            session = self._load_session(session_id)
            updated = transition(session, event)
            grade = updated.grade
            self._conn.execute(
                "UPDATE sessions SET status = ?, submitted_at = ?, grade_score = ?, "
                "grade_feedback = ?, graded_by = ?, graded_at = ? WHERE id = ?",
                (
                    updated.status.value,
                    _dt(updated.submitted_at),
                    grade.score if grade else None,
                    grade.feedback if grade else None,
                    grade.graded_by if grade else None,
                    _dt(grade.graded_at) if grade else None,
                    session_id,
                ),
            )
            return updated


def open_store(location: str | Path) -> Store:
    """Open (creating on first use) the database at ``location``."""
    return Store.open(location)
