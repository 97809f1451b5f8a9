from __future__ import annotations

import sqlite3
from datetime import datetime, timedelta, timezone

import pytest

from llteacher.auth import hash_credential
from llteacher.domain.models import (
    Author,
    Homework,
    Message,
    Mode,
    Role,
    Session,
    SessionStatus,
    User,
    new_id,
)
from llteacher.gateway import MockProvider, ProviderSettings
from llteacher.service import TutorService
from llteacher.store import Store, open_store

T0 = datetime(2026, 3, 2, 9, 0, 0, tzinfo=timezone.utc)


def ts(minutes: float = 0.0) -> datetime:
    return T0 + timedelta(minutes=minutes)


def make_user(name: str = "alice", role: Role = Role.STUDENT, uid: str | None = None,
              credential: str = "pw") -> User:
    return User(
        id=uid or new_id(),
        display_name=name,
        role=role,
        credential_hash=hash_credential(credential),
    )


def make_homework(
    creator: User,
    title: str = "Data types",
    statement: str = "Explain the difference between numeric, character, "
    "logical, and factor data types in R, with one example of each.",
    solution: str = "A factor stores a categorical variable: the observed "
    "levels are stored once and each observation is an integer code pointing "
    "at a level, which is why factors are the right type for grouping "
    "variables in models and plots. Treating a factor as numeric returns the "
    "internal codes.",
    mode: Mode = Mode.RECALL,
) -> Homework:
    return Homework(
        id=new_id(),
        title=title,
        problem_statement=statement,
        solution=solution,
        mode=mode,
        created_by=creator.id,
        created_at=ts(),
    )


def make_message(seq: int, author: Author = Author.STUDENT,
                 content: str = "hello") -> Message:
    return Message(seq=seq, author=author, content=content, created_at=ts(seq))


def make_session(
    homework: Homework,
    student: User,
    status: SessionStatus = SessionStatus.IN_PROGRESS,
    messages: tuple[Message, ...] = (),
    **kwargs,
) -> Session:
    return Session(
        id=new_id(),
        homework_id=homework.id,
        student_id=student.id,
        status=status,
        messages=messages,
        started_at=ts(),
        **kwargs,
    )


@pytest.fixture
def store(tmp_path):
    handle = open_store(tmp_path / "test.db")
    yield handle
    handle.close()


@pytest.fixture
def instructor(store):
    user = make_user("greta", role=Role.INSTRUCTOR, credential="chalk")
    store.put_user(user)
    return user


@pytest.fixture
def student(store):
    user = make_user("alice", role=Role.STUDENT, credential="alice-pw")
    store.put_user(user)
    return user


@pytest.fixture
def other_student(store):
    user = make_user("bob", role=Role.STUDENT, credential="bob-pw")
    store.put_user(user)
    return user


def settings_for_tests(**overrides) -> ProviderSettings:
    base = dict(
        base_url="http://provider.test",
        api_key="test-key-agent-007",
        max_retries=2,
        backoff_base=0.0,
    )
    base.update(overrides)
    return ProviderSettings(**base)


def service_with(store: Store, provider: MockProvider, **settings_overrides) -> TutorService:
    return TutorService(store, settings_for_tests(**settings_overrides), provider)


class FaultInjector:
    """Connection proxy that raises on the n-th execute matching a SQL prefix."""

    def __init__(self, real: sqlite3.Connection, trigger_sql: str, at_call: int = 1):
        self._real = real
        self._trigger = trigger_sql
        self._at_call = at_call
        self._seen = 0

    def execute(self, sql, *args):
        if sql.lstrip().upper().startswith(self._trigger.upper()):
            self._seen += 1
            if self._seen == self._at_call:
                raise sqlite3.OperationalError("injected fault")
        return self._real.execute(sql, *args)

    def __getattr__(self, name):
        return getattr(self._real, name)
