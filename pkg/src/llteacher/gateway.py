"""Provider-abstracted chat-completion client.

Wire protocol: HTTP POST to {base_url}/chat/completions with body
{"model", "temperature", "messages": [{"role", "content"}, ...]}; the reply
is the first choice's message content. Transport errors, 5xx and 429 are
retried with exponential backoff and full jitter (429 honors a Retry-After
hint); other 4xx fail immediately. The scripted mock provider speaks the
same interface so every retry path is testable offline.
"""

from __future__ import annotations

import logging
import os
import random
import threading
import time
from dataclasses import dataclass, field

import httpx

from llteacher.errors import (
    EmptyCompletion,
    ProviderRejected,
    ProviderUnavailable,
    ScriptExhausted,
)
from llteacher.prompting.assembly import PromptBundle

logger = logging.getLogger("llteacher.gateway")

API_KEY_ENV = "LLTEACHER_API_KEY"
BASE_URL_ENV = "LLTEACHER_BASE_URL"

_WIRE_ROLES = {"student": "user", "tutor": "assistant"}


@dataclass(frozen=True)
class ProviderSettings:
    base_url: str
    api_key: str
    request_timeout: float = 60.0
    max_retries: int = 2
    backoff_base: float = 0.5

    @classmethod
    def from_env(cls, **overrides) -> "ProviderSettings":
        base_url = overrides.pop("base_url", None) or os.environ.get(BASE_URL_ENV)
        api_key = overrides.pop("api_key", None) or os.environ.get(API_KEY_ENV)
        if not base_url:
            raise ProviderRejected(f"{BASE_URL_ENV} is not set and no base_url given")
        if not api_key:
            raise ProviderRejected(f"{API_KEY_ENV} is not set and no api_key given")
        return cls(base_url=base_url, api_key=api_key, **overrides)


@dataclass(frozen=True)
class CompletionResult:
    content: str
    provider_latency: float
    attempt_count: int


@dataclass(frozen=True)
class ProviderReply:
    """Outcome of one provider call: an HTTP status plus parsed content."""

    status: int
    content: str | None = None
    retry_after: float | None = None


class TransportFailure(Exception):
    """Connection-level failure before any HTTP status was produced."""


def build_payload(bundle: PromptBundle) -> dict:
    messages = [{"role": "system", "content": bundle.system_prompt}]
    for role, content in bundle.history:
        messages.append({"role": _WIRE_ROLES[role], "content": content})
    return {
        "model": bundle.model_id,
        "temperature": bundle.temperature,
        "messages": messages,
    }


class HttpProvider:
    """Real chat-completions endpoint behind ProviderSettings."""

    def __init__(self, settings: ProviderSettings, client: httpx.Client | None = None):
        self._settings = settings
        self._client = client or httpx.Client(timeout=settings.request_timeout)

    def send(self, payload: dict) -> ProviderReply:
        url = self._settings.base_url.rstrip("/") + "/chat/completions"
        try:
            response = self._client.post(
                url,
                json=payload,
                headers={"Authorization": f"Bearer {self._settings.api_key}"},
            )
        except httpx.HTTPError as exc:
            raise TransportFailure(str(exc)) from exc
        retry_after = _parse_retry_after(response.headers.get("retry-after"))
        if response.status_code != 200:
            return ProviderReply(status=response.status_code, retry_after=retry_after)
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportFailure(f"malformed provider response: {exc}") from exc
        return ProviderReply(status=200, content=content or "")

    def close(self) -> None:
        self._client.close()


def _parse_retry_after(raw: str | None) -> float | None:
    if raw is None:
        return None
    try:
        return max(0.0, float(raw))
    except ValueError:
        return None


# -- scripted test double ------------------------------------------------------


@dataclass(frozen=True)
class ScriptedReply:
    content: str


@dataclass(frozen=True)
class ScriptedHttpError:
    status: int
    retry_after: float | None = None


@dataclass(frozen=True)
class ScriptedTransportError:
    reason: str = "connection dropped"


ScriptedOutcome = ScriptedReply | ScriptedHttpError | ScriptedTransportError


@dataclass
class MockProvider:
    """Replays scripted outcomes in order and records every request.

    With cycle=True the script repeats forever (useful for serving a demo
    without a real provider); otherwise running past the end raises
    ScriptExhausted.
    """

    script: list[ScriptedOutcome]
    cycle: bool = False
    requests: list[dict] = field(default_factory=list)
    _cursor: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        if not self.script:
            raise ValueError("mock provider script must be nonempty")

    def send(self, payload: dict) -> ProviderReply:
        with self._lock:
            if self._cursor >= len(self.script):
                if not self.cycle:
                    raise ScriptExhausted(
                        f"script has {len(self.script)} outcomes; call "
                        f"{self._cursor + 1} arrived"
                    )
                self._cursor = 0
            outcome = self.script[self._cursor]
            self._cursor += 1
            self.requests.append(payload)
        if isinstance(outcome, ScriptedTransportError):
            raise TransportFailure(outcome.reason)
        if isinstance(outcome, ScriptedHttpError):
            return ProviderReply(status=outcome.status, retry_after=outcome.retry_after)
        return ProviderReply(status=200, content=outcome.content)


def mock_provider(script: list[ScriptedOutcome], cycle: bool = False) -> MockProvider:
    return MockProvider(script=script, cycle=cycle)


# Canonical error-redirection exchange, shipped for demos and tests: the
# student answers a bootstrap exercise with the z approximation at n = 20,
# and the tutor questions the assumptions instead of marking it wrong.
ERROR_REDIRECTION_STUDENT_ATTEMPT = (
    "I computed the 95% confidence interval for the proportion with the z "
    "approximation: p_hat +/- 1.96 * sqrt(p_hat*(1-p_hat)/20)."
)
ERROR_REDIRECTION_TUTOR_REPLY = (
    "You are using an approximation which is, under certain assumptions, "
    "acceptable, but check well. Do the assumptions here hold?"
)


def error_redirection_script() -> MockProvider:
    """Mock provider scripted with the canonical wrong-attempt exchange."""
    return MockProvider(script=[ScriptedReply(ERROR_REDIRECTION_TUTOR_REPLY)])


# -- completion with retries ---------------------------------------------------


def complete(
    bundle: PromptBundle,
    settings: ProviderSettings,
    provider: HttpProvider | MockProvider | None = None,
) -> CompletionResult:
    """Send a prompt bundle and return the first nonempty reply.

    Transport failures, 5xx, 429 and empty completions are retried up to
    settings.max_retries extra calls; total provider calls never exceed
    1 + max_retries. Other 4xx raise ProviderRejected without a retry.
    """
    if provider is None:
        provider = HttpProvider(settings)
    payload = build_payload(bundle)
    attempts = 0
    saw_empty = False
    last_failure = "no call made"
    retry_hint: float | None = None
    while attempts <= settings.max_retries:
        if attempts > 0:
            time.sleep(_backoff(settings, attempts - 1, retry_hint))
        retry_hint = None
        attempts += 1
        started = time.monotonic()
        try:
            reply = provider.send(payload)
        except TransportFailure as exc:
            last_failure = f"transport failure: {exc}"
            logger.warning("provider call %d failed: %s", attempts, last_failure)
            continue
        latency = time.monotonic() - started
        if reply.status == 200:
            if reply.content:
                logger.debug(
                    "completion ok on attempt %d (%.0f ms)", attempts, latency * 1000
                )
                return CompletionResult(
                    content=reply.content,
                    provider_latency=latency,
                    attempt_count=attempts,
                )
            saw_empty = True
            last_failure = "empty completion"
            logger.warning("provider call %d returned empty content", attempts)
            continue
        if reply.status == 429 or reply.status >= 500:
            last_failure = f"http {reply.status}"
            retry_hint = reply.retry_after
            logger.warning("provider call %d failed: %s", attempts, last_failure)
            continue
        raise ProviderRejected(f"provider returned http {reply.status}")
    if saw_empty:
        raise EmptyCompletion(f"no nonempty reply in {attempts} calls")
    raise ProviderUnavailable(f"retries exhausted after {attempts} calls: {last_failure}")


# Hard ceiling on a server-provided Retry-After so a misbehaving provider
# cannot stall a turn indefinitely.
MAX_RETRY_AFTER_HINT = 30.0


def _backoff(settings: ProviderSettings, attempt: int, hint: float | None) -> float:
    if hint is not None:
        return min(hint, MAX_RETRY_AFTER_HINT)
    return random.uniform(0, settings.backoff_base * (2**attempt))
