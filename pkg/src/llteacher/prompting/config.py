"""Service-wide tutor settings."""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

from llteacher.errors import ValidationFailed

# Below 4 tokens, everyday phrases would trigger false leak reports.
MIN_GUARD_RUN = 4

DEFAULT_MODEL_ID = "gpt-5"

DEFAULT_BASE_PROMPT = (
    "You are a patient tutor embedded in a homework tool for a university "
    "course. You help one student at a time work through one assignment in a "
    "back-and-forth conversation. Be encouraging and concrete, keep replies "
    "short enough to answer in one sitting, and always end with something "
    "for the student to do or think about next."
)


class GuardPolicy(Enum):
    REGENERATE_THEN_REDACT = "regenerate_then_redact"
    REDACT_ONLY = "redact_only"


@dataclass(frozen=True)
class TutorConfig:
    """Instructor-editable settings shared by every session.

    guard_min_run is the minimum verbatim token-run length counted as a
    solution leak; runs shorter than that are treated as coincidence.
    """

    model_id: str = DEFAULT_MODEL_ID
    base_prompt: str = DEFAULT_BASE_PROMPT
    guard_min_run: int = 12
    guard_policy: GuardPolicy = GuardPolicy.REGENERATE_THEN_REDACT
    max_turns: int | None = None
    temperature: float = 0.2

    def __post_init__(self) -> None:
        if not self.model_id.strip():
            raise ValidationFailed("model_id must be nonempty")
        if not self.base_prompt.strip():
            raise ValidationFailed("base_prompt must be nonempty")
        if self.guard_min_run < MIN_GUARD_RUN:
            raise ValidationFailed(f"guard_min_run must be >= {MIN_GUARD_RUN}")
        if self.max_turns is not None and self.max_turns < 1:
            raise ValidationFailed("max_turns must be positive when set")
        if self.temperature < 0:
            raise ValidationFailed("temperature must be >= 0")


def default_config() -> TutorConfig:
    """Built-in config for a fresh store; LLTEACHER_MODEL overrides the model."""
    return TutorConfig(model_id=os.environ.get("LLTEACHER_MODEL", DEFAULT_MODEL_ID))
