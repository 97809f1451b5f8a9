"""Prompt engine: deterministic system-prompt assembly and the solution-leak
guard applied to every tutor reply."""

from llteacher.prompting.assembly import (
    PromptBundle,
    assemble_prompt,
    render_mode_directive,
)
from llteacher.prompting.config import (
    DEFAULT_BASE_PROMPT,
    GuardPolicy,
    TutorConfig,
    default_config,
)
from llteacher.prompting.guard import (
    GuardReport,
    LeakRun,
    REDACTION_MARKER,
    find_leak_runs,
    guard_reply,
    tokenize,
)

__all__ = [
    "DEFAULT_BASE_PROMPT",
    "GuardPolicy",
    "GuardReport",
    "LeakRun",
    "PromptBundle",
    "REDACTION_MARKER",
    "TutorConfig",
    "assemble_prompt",
    "default_config",
    "find_leak_runs",
    "guard_reply",
    "render_mode_directive",
    "tokenize",
]
