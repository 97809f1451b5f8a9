"""Application services tying domain, prompt engine, gateway and store together.

The chat-turn pipeline is the core path: persist-ready student message ->
prompt assembly -> provider completion -> leak guard (with one regeneration
when the policy asks for it) -> atomic append of the whole turn. Provider
failures never lose the student's words: the turn commits as the student
message plus a system notice instead of a tutor message.

Turns within one session are processed strictly one at a time, in arrival
order (ticket lock); requests across sessions run in parallel.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Callable

from llteacher.domain import (
    Action,
    Author,
    Decision,
    Grade,
    GradeEvent,
    GuardAction,
    Homework,
    Message,
    Mode,
    ResourceRef,
    Role,
    Session,
    SessionStatus,
    SubmissionRow,
    SubmitEvent,
    User,
    authorize,
    derive_submission_rows,
    new_id,
    utcnow,
)
from llteacher.errors import (
    EmptyContent,
    GatewayError,
    IllegalTransition,
    IoFailure,
    SessionLocked,
    TurnLimitReached,
    Unauthorized,
)
from llteacher.gateway import HttpProvider, MockProvider, ProviderSettings, complete
from llteacher.prompting.assembly import assemble_prompt
from llteacher.prompting.config import GuardPolicy, TutorConfig
from llteacher.prompting.guard import guard_reply

TUTOR_UNAVAILABLE_NOTICE = (
    "The tutor is unavailable right now; your message was recorded. "
    "Please retry in a moment."
)
TURN_NOT_RECORDED_NOTICE = (
    "The tutor replied but the turn could not be stored in full; your "
    "message was recorded. Please retry in a moment."
)


class FairLock:
    """Ticket lock: acquirers proceed strictly in arrival order.

    A waiter that is interrupted abandons its ticket; serving skips
    abandoned tickets so later arrivals are never stranded.
    """

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._next_ticket = 0
        self._now_serving = 0
        self._abandoned: set[int] = set()

    def __enter__(self) -> "FairLock":
        with self._cond:
            ticket = self._next_ticket
            self._next_ticket += 1
            try:
                while ticket != self._now_serving:
                    self._cond.wait()
            except BaseException:
                if ticket == self._now_serving:
                    self._advance()
                else:
                    self._abandoned.add(ticket)
                self._cond.notify_all()
                raise
        return self

    def __exit__(self, *exc_info) -> None:
        with self._cond:
            self._advance()
            self._cond.notify_all()

    def _advance(self) -> None:
        self._now_serving += 1
        while self._now_serving in self._abandoned:
            self._abandoned.discard(self._now_serving)
            self._now_serving += 1


class _LockMap:
    def __init__(self) -> None:
        self._locks: dict[str, FairLock] = {}
        self._mutex = threading.Lock()

    def get(self, key: str) -> FairLock:
        with self._mutex:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = FairLock()
            return lock


@dataclass(frozen=True)
class ChatTurn:
    """Result of one chat turn: both persisted messages plus guard outcome."""

    student_message: Message
    reply_message: Message
    guard_action: GuardAction
    session_status: SessionStatus
    tutor_unavailable: bool


@dataclass(frozen=True)
class TranscriptView:
    session: Session
    homework: Homework
    student: User


class TutorService:
    def __init__(
        self,
        store,
        settings: ProviderSettings,
        provider: HttpProvider | MockProvider,
        clock: Callable[[], datetime] = utcnow,
        id_factory: Callable[[], str] = new_id,
    ):
        self._store = store
        self._settings = settings
        self._provider = provider
        self._clock = clock
        self._new_id = id_factory
        self._turn_locks = _LockMap()

    @property
    def store(self):
        return self._store

    def _require(self, actor: User, action: Action, resource: ResourceRef) -> None:
        if authorize(actor, action, resource) is Decision.DENY:
            raise Unauthorized(
                f"{actor.role.value} may not {action.value} on this {resource.kind}"
            )

    # -- homework --------------------------------------------------------

    def create_homework(
        self,
        actor: User,
        *,
        title: str,
        problem_statement: str,
        solution: str,
        mode: Mode,
        due_at: datetime | None = None,
    ) -> Homework:
        self._require(actor, Action.CREATE_HOMEWORK, ResourceRef("homework"))
        homework = Homework(
            id=self._new_id(),
            title=title,
            problem_statement=problem_statement,
            solution=solution,
            mode=mode,
            created_by=actor.id,
            created_at=self._clock(),
            due_at=due_at,
        )
        self._store.put_homework(homework)
        return homework

    def update_homework(self, actor: User, homework_id: str, **fields) -> Homework:
        self._require(actor, Action.UPDATE_HOMEWORK, ResourceRef("homework"))
        current = self._store.get_homework(homework_id)
        updated = replace(current, **fields)
        self._store.put_homework(updated)
        return updated

    def delete_homework(self, actor: User, homework_id: str) -> None:
        self._require(actor, Action.DELETE_HOMEWORK, ResourceRef("homework"))
        self._store.delete_homework(homework_id)

    def list_homework(self, actor: User) -> list[Homework]:
        self._require(actor, Action.LIST_HOMEWORK, ResourceRef("homework"))
        return self._store.list_homework()

    def get_homework(self, actor: User, homework_id: str) -> Homework:
        self._require(actor, Action.READ_HOMEWORK, ResourceRef("homework"))
        return self._store.get_homework(homework_id)

    # -- config ----------------------------------------------------------

    def get_tutor_config(self, actor: User) -> TutorConfig:
        self._require(actor, Action.READ_CONFIG, ResourceRef("config"))
        return self._store.get_config()

    def update_tutor_config(self, actor: User, **fields) -> TutorConfig:
        self._require(actor, Action.UPDATE_CONFIG, ResourceRef("config"))
        updated = replace(self._store.get_config(), **fields)
        self._store.put_config(updated)
        return updated

    # -- sessions ----------------------------------------------------------

    def start_session(self, actor: User, homework_id: str) -> tuple[Session, bool]:
        """Idempotent: returns the existing non-graded session when present."""
        self._require(actor, Action.CREATE_SESSION, ResourceRef("session", actor.id))
        return self._store.create_session_if_absent(
            homework_id, actor.id, self._new_id(), self._clock()
        )

    def post_message(self, actor: User, session_id: str, content: str) -> ChatTurn:
        with self._turn_locks.get(session_id):
            session = self._store.get_session(session_id)
            self._require(
                actor, Action.WRITE_SESSION, ResourceRef("session", session.student_id)
            )
            if session.status is not SessionStatus.IN_PROGRESS:
                raise SessionLocked(f"session is {session.status.value}")
            if not content.strip():
                raise EmptyContent("message content is empty")
            config = self._store.get_config()
            if (
                config.max_turns is not None
                and session.student_turn_count >= config.max_turns
            ):
                raise TurnLimitReached(
                    f"session already used its {config.max_turns} turns"
                )
            homework = self._store.get_homework(session.homework_id)
            student_message = Message(
                seq=len(session.messages) + 1,
                author=Author.STUDENT,
                content=content,
                created_at=self._clock(),
            )
            bundle = assemble_prompt(
                config, homework, list(session.messages) + [student_message]
            )
            try:
                reply_text, action = self._tutor_reply(bundle, homework, config)
            except GatewayError:
                return self._commit_notice(
                    session_id, student_message, TUTOR_UNAVAILABLE_NOTICE
                )
            tutor_message = Message(
                seq=student_message.seq + 1,
                author=Author.TUTOR,
                content=reply_text,
                created_at=self._clock(),
                guard_action=action,
            )
            try:
                updated = self._store.append_messages(
                    session_id, [student_message, tutor_message]
                )
            except IoFailure:
                # The failed append rolled back whole; keep the student's
                # words by committing them with a notice instead.
                return self._commit_notice(
                    session_id, student_message, TURN_NOT_RECORDED_NOTICE
                )
            return ChatTurn(
                student_message=student_message,
                reply_message=tutor_message,
                guard_action=action,
                session_status=updated.status,
                tutor_unavailable=False,
            )

    def _commit_notice(
        self, session_id: str, student_message: Message, notice_text: str
    ) -> ChatTurn:
        notice = Message(
            seq=student_message.seq + 1,
            author=Author.SYSTEM_NOTICE,
            content=notice_text,
            created_at=self._clock(),
        )
        updated = self._store.append_messages(session_id, [student_message, notice])
        return ChatTurn(
            student_message=student_message,
            reply_message=notice,
            guard_action=GuardAction.NONE,
            session_status=updated.status,
            tutor_unavailable=True,
        )

    def _tutor_reply(
        self, bundle, homework: Homework, config: TutorConfig
    ) -> tuple[str, GuardAction]:
        """Complete once, guard, and regenerate at most once when asked to."""
        result = complete(bundle, self._settings, self._provider)
        text, report = guard_reply(result.content, homework, config)
        if report.action_taken is not GuardAction.REGENERATED:
            return text, report.action_taken
        redact_config = replace(config, guard_policy=GuardPolicy.REDACT_ONLY)
        try:
            second = complete(bundle, self._settings, self._provider)
        except GatewayError:
            text, _ = guard_reply(result.content, homework, redact_config)
            return text, GuardAction.REDACTED
        text, second_report = guard_reply(second.content, homework, redact_config)
        if second_report.leaked:
            return text, GuardAction.REDACTED
        return text, GuardAction.REGENERATED

    def submit(self, actor: User, session_id: str) -> Session:
        # Take the turn lock so a submit fired right after a Send waits for
        # that turn to commit instead of racing it.
        with self._turn_locks.get(session_id):
            session = self._store.get_session(session_id)
            self._require(
                actor, Action.SUBMIT_SESSION, ResourceRef("session", session.student_id)
            )
            try:
                return self._store.update_status(
                    session_id, SubmitEvent(at=self._clock())
                )
            except IllegalTransition as exc:
                raise SessionLocked(str(exc)) from exc

    def grade(
        self, actor: User, session_id: str, score: float, feedback: str = ""
    ) -> Session:
        session = self._store.get_session(session_id)
        self._require(
            actor, Action.GRADE_SESSION, ResourceRef("session", session.student_id)
        )
        grade = Grade(
            score=score,
            feedback=feedback,
            graded_by=actor.id,
            graded_at=self._clock(),
        )
        return self._store.update_status(
            session_id, GradeEvent(grade=grade, grader=actor)
        )

    def get_transcript(self, actor: User, session_id: str) -> TranscriptView:
        session = self._store.get_session(session_id)
        self._require(
            actor, Action.READ_SESSION, ResourceRef("session", session.student_id)
        )
        return TranscriptView(
            session=session,
            homework=self._store.get_homework(session.homework_id),
            student=self._store.get_user(session.student_id),
        )

    def list_submissions(self, actor: User, homework_id: str) -> list[SubmissionRow]:
        self._require(actor, Action.LIST_SUBMISSIONS, ResourceRef("homework"))
        homework = self._store.get_homework(homework_id)
        students = self._store.list_users(role=Role.STUDENT)
        sessions = self._store.list_sessions(homework_id=homework_id)
        return derive_submission_rows(homework, students, sessions)
