"""HTTP+JSON API.

All endpoints sit under /api and authenticate with a bearer token from
POST /api/login. Response shaping is role-aware: student payloads never
include a homework solution or guard annotations; instructors see both.
Field names are documented in docs/api.md.
"""

from __future__ import annotations

from datetime import datetime
from typing import Literal

from fastapi import Depends, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from llteacher.auth import TokenRegistry, verify_credential
from llteacher.domain.models import (
    Homework,
    Message,
    Mode,
    Role,
    Session,
    User,
)
from llteacher.errors import (
    ConflictingReference,
    EmptyField,
    GatewayError,
    IllegalTransition,
    InvalidCredentials,
    LLTeacherError,
    NotFound,
    SessionLocked,
    StoreError,
    TurnLimitReached,
    Unauthorized,
    ValidationFailed,
)
from llteacher.prompting.config import GuardPolicy, TutorConfig
from llteacher.service import ChatTurn, TutorService


class LoginRequest(BaseModel):
    name: str
    credential: str


class HomeworkCreate(BaseModel):
    title: str
    problem_statement: str
    solution: str
    mode: Literal["recall", "discovery"]
    due_at: str | None = None


class HomeworkUpdate(BaseModel):
    title: str | None = None
    problem_statement: str | None = None
    solution: str | None = None
    mode: Literal["recall", "discovery"] | None = None
    due_at: str | None = None


class ConfigUpdate(BaseModel):
    model_id: str | None = None
    base_prompt: str | None = None
    guard_min_run: int | None = None
    guard_policy: Literal["regenerate_then_redact", "redact_only"] | None = None
    max_turns: int | None = None
    temperature: float | None = None
    clear_max_turns: bool = False


class ChatMessageRequest(BaseModel):
    content: str


class GradeRequest(BaseModel):
    score: float
    feedback: str = ""


_ERROR_STATUS: list[tuple[type[Exception], int, str]] = [
    (InvalidCredentials, 401, "invalid_credentials"),
    (Unauthorized, 403, "unauthorized"),
    (NotFound, 404, "not_found"),
    (EmptyField, 422, "validation_failed"),
    (ValidationFailed, 422, "validation_failed"),
    (SessionLocked, 409, "session_locked"),
    (IllegalTransition, 409, "illegal_transition"),
    (ConflictingReference, 409, "conflicting_reference"),
    (TurnLimitReached, 409, "turn_limit_reached"),
    (GatewayError, 503, "tutor_unavailable"),
    (StoreError, 500, "storage_failure"),
]


def _error_response(exc: Exception) -> JSONResponse:
    for klass, status, code in _ERROR_STATUS:
        if isinstance(exc, klass):
            return JSONResponse(
                status_code=status, content={"error": code, "detail": str(exc)}
            )
    return JSONResponse(
        status_code=500, content={"error": "internal", "detail": str(exc)}
    )


def _dt(value) -> str | None:
    return None if value is None else value.isoformat()


def _parse_dt(value: str | None) -> datetime | None:
    return None if value is None else datetime.fromisoformat(value)


def homework_payload(homework: Homework, *, include_solution: bool) -> dict:
    payload = {
        "id": homework.id,
        "title": homework.title,
        "problem_statement": homework.problem_statement,
        "mode": homework.mode.value,
        "created_at": _dt(homework.created_at),
        "due_at": _dt(homework.due_at),
    }
    if include_solution:
        payload["solution"] = homework.solution
        payload["created_by"] = homework.created_by
    return payload


def message_payload(message: Message, *, include_guard: bool) -> dict:
    payload = {
        "seq": message.seq,
        "author": message.author.value,
        "content": message.content,
        "created_at": _dt(message.created_at),
    }
    if include_guard:
        payload["guard_action"] = (
            message.guard_action.value if message.guard_action else None
        )
    return payload


def session_payload(session: Session) -> dict:
    return {
        "id": session.id,
        "homework_id": session.homework_id,
        "student_id": session.student_id,
        "status": session.status.value,
        "started_at": _dt(session.started_at),
        "submitted_at": _dt(session.submitted_at),
        "message_count": len(session.messages),
    }


def config_payload(config: TutorConfig) -> dict:
    return {
        "model_id": config.model_id,
        "base_prompt": config.base_prompt,
        "guard_min_run": config.guard_min_run,
        "guard_policy": config.guard_policy.value,
        "max_turns": config.max_turns,
        "temperature": config.temperature,
    }


def chat_turn_payload(turn: ChatTurn) -> dict:
    return {
        "student_message": message_payload(turn.student_message, include_guard=False),
        "tutor_message": message_payload(turn.reply_message, include_guard=False),
        "guard_action": turn.guard_action.value,
        "session_status": turn.session_status.value,
    }


def create_app(service: TutorService, token_ttl_seconds: float = 12 * 3600) -> FastAPI:
    app = FastAPI(title="llteacher", docs_url=None, redoc_url=None)
    # The browser UI may be served from a different origin; auth is a bearer
    # header (no cookies), so a wide-open CORS policy carries no session.
    # Authorization must be listed by name: the header wildcard does not
    # cover it per the fetch spec.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["Authorization", "Content-Type"],
    )
    tokens = TokenRegistry(ttl_seconds=token_ttl_seconds)
    app.state.service = service
    app.state.tokens = tokens

    @app.exception_handler(LLTeacherError)
    async def handle_domain_error(request: Request, exc: LLTeacherError):
        return _error_response(exc)

    def current_user(request: Request) -> User:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise InvalidCredentials("missing bearer token")
        user_id = tokens.resolve(header[7:].strip())
        if user_id is None:
            raise InvalidCredentials("unknown or expired token")
        return service.store.get_user(user_id)

    # -- auth ---------------------------------------------------------------

    @app.post("/api/login")
    def login(body: LoginRequest):
        try:
            user = service.store.get_user_by_name(body.name)
        except NotFound:
            raise InvalidCredentials("unknown name or wrong credential")
        if not verify_credential(body.credential, user.credential_hash):
            raise InvalidCredentials("unknown name or wrong credential")
        token = tokens.issue(user.id)
        return {
            "token": token.token,
            "user_id": user.id,
            "role": user.role.value,
            "display_name": user.display_name,
            "expires_at": _dt(token.expires_at),
        }

    # -- homework -------------------------------------------------------------

    @app.get("/api/homework")
    def list_homework(user: User = Depends(current_user)):
        include = user.role is Role.INSTRUCTOR
        return [
            homework_payload(hw, include_solution=include)
            for hw in service.list_homework(user)
        ]

    @app.get("/api/homework/{homework_id}")
    def get_homework(homework_id: str, user: User = Depends(current_user)):
        homework = service.get_homework(user, homework_id)
        return homework_payload(
            homework, include_solution=user.role is Role.INSTRUCTOR
        )

    @app.post("/api/homework", status_code=201)
    def create_homework(body: HomeworkCreate, user: User = Depends(current_user)):
        homework = service.create_homework(
            user,
            title=body.title,
            problem_statement=body.problem_statement,
            solution=body.solution,
            mode=Mode(body.mode),
            due_at=_parse_dt(body.due_at),
        )
        return homework_payload(homework, include_solution=True)

    @app.put("/api/homework/{homework_id}")
    def update_homework(
        homework_id: str, body: HomeworkUpdate, user: User = Depends(current_user)
    ):
        fields = {}
        for name in ("title", "problem_statement", "solution"):
            value = getattr(body, name)
            if value is not None:
                fields[name] = value
        if body.mode is not None:
            fields["mode"] = Mode(body.mode)
        if body.due_at is not None:
            fields["due_at"] = _parse_dt(body.due_at)
        homework = service.update_homework(user, homework_id, **fields)
        return homework_payload(homework, include_solution=True)

    @app.delete("/api/homework/{homework_id}", status_code=204)
    def delete_homework(homework_id: str, user: User = Depends(current_user)):
        service.delete_homework(user, homework_id)

    # -- config ---------------------------------------------------------------

    @app.get("/api/config")
    def get_config(user: User = Depends(current_user)):
        return config_payload(service.get_tutor_config(user))

    @app.put("/api/config")
    def put_config(body: ConfigUpdate, user: User = Depends(current_user)):
        fields = {}
        for name in (
            "model_id",
            "base_prompt",
            "guard_min_run",
            "temperature",
            "max_turns",
        ):
            value = getattr(body, name)
            if value is not None:
                fields[name] = value
        if body.clear_max_turns:
            fields["max_turns"] = None
        if body.guard_policy is not None:
            fields["guard_policy"] = GuardPolicy(body.guard_policy)
        return config_payload(service.update_tutor_config(user, **fields))

    # -- sessions ---------------------------------------------------------------

    @app.post("/api/homework/{homework_id}/session")
    def start_session(homework_id: str, user: User = Depends(current_user)):
        session, created = service.start_session(user, homework_id)
        return JSONResponse(
            status_code=201 if created else 200, content=session_payload(session)
        )

    @app.post("/api/session/{session_id}/message")
    def post_message(
        session_id: str, body: ChatMessageRequest, user: User = Depends(current_user)
    ):
        turn = service.post_message(user, session_id, body.content)
        payload = chat_turn_payload(turn)
        if turn.tutor_unavailable:
            return JSONResponse(status_code=503, content=payload)
        return payload

    @app.post("/api/session/{session_id}/submit")
    def submit_session(session_id: str, user: User = Depends(current_user)):
        return session_payload(service.submit(user, session_id))

    @app.get("/api/homework/{homework_id}/submissions")
    def list_submissions(homework_id: str, user: User = Depends(current_user)):
        rows = service.list_submissions(user, homework_id)
        return [
            {
                "student_id": row.student_id,
                "student_display_name": row.student_display_name,
                "status": row.status.value,
                "last_activity_at": _dt(row.last_activity_at),
                "session_id": row.session_id,
            }
            for row in rows
        ]

    @app.get("/api/session/{session_id}/transcript")
    def get_transcript(session_id: str, user: User = Depends(current_user)):
        view = service.get_transcript(user, session_id)
        session = view.session
        instructor = user.role is Role.INSTRUCTOR
        grade = None
        grade_visible = instructor or session.status.value == "graded"
        if session.grade is not None and grade_visible:
            grade = {
                "score": session.grade.score,
                "feedback": session.grade.feedback,
                "graded_at": _dt(session.grade.graded_at),
            }
        return {
            "session_id": session.id,
            "homework_id": view.homework.id,
            "homework_title": view.homework.title,
            "student_id": view.student.id,
            "student_display_name": view.student.display_name,
            "status": session.status.value,
            "started_at": _dt(session.started_at),
            "submitted_at": _dt(session.submitted_at),
            "grade": grade,
            "messages": [
                message_payload(m, include_guard=instructor)
                for m in session.messages
            ],
        }

    @app.post("/api/session/{session_id}/grade")
    def grade_session(
        session_id: str, body: GradeRequest, user: User = Depends(current_user)
    ):
        session = service.grade(user, session_id, body.score, body.feedback)
        payload = session_payload(session)
        payload["grade"] = {
            "score": session.grade.score,
            "feedback": session.grade.feedback,
            "graded_at": _dt(session.grade.graded_at),
        }
        return payload

    return app
