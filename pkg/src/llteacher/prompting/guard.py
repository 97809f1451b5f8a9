"""Mechanical solution-leak guard for tutor replies.

The never-reveal contract is enforced with instructions *and* a post-filter:
a reply leaks when it shares a contiguous run of at least ``guard_min_run``
normalized tokens with the instructor solution, unless that same run also
appears verbatim in the problem statement (restating the problem is not a
leak).

Normalization: prose is lowercased and split on anything that is not a
letter or digit, so punctuation and whitespace differences don't hide a
leak. Code spans (fenced ``` blocks and inline backtick spans) are split on
whitespace only and compared verbatim, case and punctuation intact, because
``mean(x)`` leaking is structurally different from prose leaking.

Detection reports *maximal* runs: every common run that cannot be extended
by one token on either side. Redaction replaces each offending run with a
fixed marker and re-scans its own output until no run of guardable length
survives, so a redacted reply is guaranteed clean.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from llteacher.domain.models import GuardAction, Homework
from llteacher.prompting.config import GuardPolicy, TutorConfig

REDACTION_MARKER = "[guidance withheld]"
REDACTION_NOTICE = (
    "Some guidance was withheld here because it came too close to the "
    "solution; keep reasoning it through and tell me your next step."
)

_FENCED_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_INLINE_CODE_RE = re.compile(r"`([^`\n]+)`")
_PROSE_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_CODE_TOKEN_RE = re.compile(r"\S+")

# (token text, start char offset, end char offset)
Span = tuple[str, int, int]


@dataclass(frozen=True)
class LeakRun:
    """One maximal common token run between a reply and the solution."""

    reply_offset: int
    length: int
    solution_offset: int


@dataclass(frozen=True)
class GuardReport:
    leaked: bool
    runs: tuple[LeakRun, ...]
    action_taken: GuardAction

    def __post_init__(self) -> None:
        if self.leaked != bool(self.runs):
            raise ValueError("leaked must be true iff runs is nonempty")


def _code_regions(text: str) -> list[tuple[int, int, int, int]]:
    """Disjoint code regions as (outer_start, outer_end, inner_start, inner_end).

    Fenced blocks win over inline spans; an inline candidate overlapping a
    fenced block is ignored.
    """
    regions = [
        (m.start(), m.end(), m.start(1), m.end(1)) for m in _FENCED_RE.finditer(text)
    ]
    fenced = [(s, e) for s, e, _, _ in regions]
    for m in _INLINE_CODE_RE.finditer(text):
        if any(m.end() > s and e > m.start() for s, e in fenced):
            continue
        regions.append((m.start(), m.end(), m.start(1), m.end(1)))
    return sorted(regions)


def tokenize_with_spans(text: str) -> list[Span]:
    """Normalized tokens with their character spans in the original text."""
    spans: list[Span] = []
    cursor = 0
    for outer_start, outer_end, inner_start, inner_end in _code_regions(text):
        _extend_prose(text, cursor, outer_start, spans)
        for match in _CODE_TOKEN_RE.finditer(text, inner_start, inner_end):
            spans.append((match.group(), match.start(), match.end()))
        cursor = outer_end
    _extend_prose(text, cursor, len(text), spans)
    return spans


def _extend_prose(text: str, start: int, end: int, out: list[Span]) -> None:
    for match in _PROSE_TOKEN_RE.finditer(text, start, end):
        out.append((match.group().lower(), match.start(), match.end()))


def tokenize(text: str) -> list[str]:
    return [span[0] for span in tokenize_with_spans(text)]


def find_common_runs(
    reply_tokens: list[str], solution_tokens: list[str], min_run: int
) -> list[tuple[int, int, int]]:
    """All maximal common contiguous runs of length >= min_run.

    Returns (reply_offset, solution_offset, length) triples. Anchors on
    diagonal starts (positions whose predecessors differ), so each maximal
    run is found exactly once.
    """
    positions: dict[str, list[int]] = {}
    for j, token in enumerate(solution_tokens):
        positions.setdefault(token, []).append(j)

    n, m = len(reply_tokens), len(solution_tokens)
    runs: list[tuple[int, int, int]] = []
    for i, token in enumerate(reply_tokens):
        for j in positions.get(token, ()):
            if i > 0 and j > 0 and reply_tokens[i - 1] == solution_tokens[j - 1]:
                continue
            length = 1
            while (
                i + length < n
                and j + length < m
                and reply_tokens[i + length] == solution_tokens[j + length]
            ):
                length += 1
            if length >= min_run:
                runs.append((i, j, length))
    return runs


def _appears_in(haystack: list[str], needle: list[str]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    first = needle[0]
    for start in range(len(haystack) - len(needle) + 1):
        if haystack[start] == first and haystack[start : start + len(needle)] == needle:
            return True
    return False


def find_leak_runs(
    reply_tokens: list[str],
    solution_tokens: list[str],
    statement_tokens: list[str],
    min_run: int,
) -> list[LeakRun]:
    """Maximal reply/solution runs that do not also occur in the statement."""
    leaks = []
    for i, j, length in find_common_runs(reply_tokens, solution_tokens, min_run):
        if _appears_in(statement_tokens, reply_tokens[i : i + length]):
            continue
        leaks.append(LeakRun(reply_offset=i, length=length, solution_offset=j))
    return leaks


def _merge_intervals(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[tuple[int, int]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def _splice(text: str, intervals: list[tuple[int, int]], replacement: str) -> str:
    parts = []
    cursor = 0
    for start, end in intervals:
        parts.append(text[cursor:start])
        parts.append(replacement)
        cursor = end
    parts.append(text[cursor:])
    return "".join(parts)


def _redact_to_fixpoint(
    reply: str,
    solution_tokens: list[str],
    statement_tokens: list[str],
    min_run: int,
) -> str:
    """Replace every leaking run with the marker until a re-scan is clean.

    Terminates because each pass replaces runs of >= min_run tokens with the
    two-token marker, strictly shrinking the token count; the notice is
    appended exactly once and participates in the final scans.
    """
    text = reply
    notice_appended = False
    while True:
        spans = tokenize_with_spans(text)
        runs = find_leak_runs(
            [s[0] for s in spans], solution_tokens, statement_tokens, min_run
        )
        if not runs:
            if notice_appended:
                return text
            text = text.rstrip() + "\n\n" + REDACTION_NOTICE
            notice_appended = True
            continue
        intervals = _merge_intervals(
            [
                (spans[run.reply_offset][1], spans[run.reply_offset + run.length - 1][2])
                for run in runs
            ]
        )
        text = _splice(text, intervals, REDACTION_MARKER)


def guard_reply(
    reply: str, homework: Homework, config: TutorConfig
) -> tuple[str, GuardReport]:
    """Scan a tutor reply for solution leaks and apply the guard policy.

    Returns the guarded reply text plus a report. With no detected runs the
    reply passes through unchanged (action NONE). Under REDACT_ONLY the
    offending runs are replaced immediately (action REDACTED). Under
    REGENERATE_THEN_REDACT the text is returned unchanged with action
    REGENERATED: that is the signal for the caller to request one fresh
    completion and guard it again with REDACT_ONLY.
    """
    if not reply:
        raise ValueError("reply must be nonempty")
    solution_tokens = tokenize(homework.solution)
    statement_tokens = tokenize(homework.problem_statement)
    reply_tokens = tokenize(reply)
    runs = find_leak_runs(
        reply_tokens, solution_tokens, statement_tokens, config.guard_min_run
    )
    if not runs:
        return reply, GuardReport(False, (), GuardAction.NONE)
    if config.guard_policy is GuardPolicy.REGENERATE_THEN_REDACT:
        return reply, GuardReport(True, tuple(runs), GuardAction.REGENERATED)
    redacted = _redact_to_fixpoint(
        reply, solution_tokens, statement_tokens, config.guard_min_run
    )
    return redacted, GuardReport(True, tuple(runs), GuardAction.REDACTED)
