"""Role-based authorization rules.

A single pure function decides every request: students may list homework
(without solutions) and read/write/submit their own sessions; instructors
may manage homework and config, read any session, and grade. The decision
depends only on (role, action, ownership).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from llteacher.domain.models import Role, User


class Action(Enum):
    LIST_HOMEWORK = "list_homework"
    READ_HOMEWORK = "read_homework"
    READ_HOMEWORK_SOLUTION = "read_homework_solution"
    CREATE_HOMEWORK = "create_homework"
    UPDATE_HOMEWORK = "update_homework"
    DELETE_HOMEWORK = "delete_homework"
    READ_CONFIG = "read_config"
    UPDATE_CONFIG = "update_config"
    CREATE_SESSION = "create_session"
    READ_SESSION = "read_session"
    WRITE_SESSION = "write_session"
    SUBMIT_SESSION = "submit_session"
    GRADE_SESSION = "grade_session"
    LIST_SUBMISSIONS = "list_submissions"


class Decision(Enum):
    ALLOW = "allow"
    DENY = "deny"


@dataclass(frozen=True)
class ResourceRef:
    """Reference to the acted-on resource; owner_id for owned resources."""

    kind: str
    owner_id: str | None = None


_EVERYONE = {Action.LIST_HOMEWORK, Action.READ_HOMEWORK}

_INSTRUCTOR_ONLY = {
    Action.READ_HOMEWORK_SOLUTION,
    Action.CREATE_HOMEWORK,
    Action.UPDATE_HOMEWORK,
    Action.DELETE_HOMEWORK,
    Action.READ_CONFIG,
    Action.UPDATE_CONFIG,
    Action.GRADE_SESSION,
    Action.LIST_SUBMISSIONS,
}

# Students act on their own sessions only; instructors never chat or submit.
_STUDENT_OWNED = {
    Action.CREATE_SESSION,
    Action.WRITE_SESSION,
    Action.SUBMIT_SESSION,
}


def authorize(user: User, action: Action, resource: ResourceRef) -> Decision:
    if action in _EVERYONE:
        return Decision.ALLOW
    if user.role is Role.INSTRUCTOR:
        if action in _INSTRUCTOR_ONLY or action is Action.READ_SESSION:
            return Decision.ALLOW
        return Decision.DENY
    # student
    if action in _STUDENT_OWNED or action is Action.READ_SESSION:
        if resource.owner_id is not None and resource.owner_id == user.id:
            return Decision.ALLOW
    return Decision.DENY
