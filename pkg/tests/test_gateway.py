import logging
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llteacher.domain.models import Author, Mode, Role
from llteacher.errors import (
    EmptyCompletion,
    ProviderRejected,
    ProviderUnavailable,
    ScriptExhausted,
)
from llteacher.gateway import (
    ERROR_REDIRECTION_STUDENT_ATTEMPT,
    ERROR_REDIRECTION_TUTOR_REPLY,
    ProviderSettings,
    ScriptedHttpError,
    ScriptedReply,
    ScriptedTransportError,
    build_payload,
    complete,
    error_redirection_script,
    mock_provider,
)
from llteacher.prompting.assembly import assemble_prompt
from llteacher.prompting.config import TutorConfig

from conftest import make_homework, make_message, make_user, settings_for_tests

def _bundle(history=None):
    creator = make_user("prof", role=Role.INSTRUCTOR)
    homework = make_homework(
        creator,
        title="Bootstrap CI",
        statement="Compute a 95% confidence interval for a proportion when "
        "n = 20, using the method from class.",
        solution="Use the bootstrap: resample the 20 observations with "
        "replacement many times, compute the proportion each time, and take "
        "the 2.5 and 97.5 percentiles of those proportions.",
        mode=Mode.RECALL,
    )
    return assemble_prompt(TutorConfig(), homework, history or [])


class TestPayloadShape:
    def test_system_message_first_then_history(self):
        history = [
            make_message(1, Author.STUDENT, "hi"),
            make_message(2, Author.TUTOR, "hello"),
            make_message(3, Author.STUDENT, "next"),
        ]
        payload = build_payload(_bundle(history))
        roles = [m["role"] for m in payload["messages"]]
        assert roles == ["system", "user", "assistant", "user"]
        assert payload["messages"][1]["content"] == "hi"
        assert payload["model"] == TutorConfig().model_id
        assert payload["temperature"] == TutorConfig().temperature

    @given(n_turns=st.integers(min_value=0, max_value=12))
    @settings(max_examples=25, deadline=None)
    def test_message_count_is_one_plus_history(self, n_turns):
        history = []
        for k in range(n_turns):
            author = Author.STUDENT if k % 2 == 0 else Author.TUTOR
            history.append(make_message(k + 1, author, f"turn {k}"))
        bundle = _bundle(history)
        payload = build_payload(bundle)
        assert len(payload["messages"]) == 1 + len(bundle.history)
        for wire, (role, content) in zip(payload["messages"][1:], bundle.history):
            assert wire["content"] == content
            assert wire["role"] == {"student": "user", "tutor": "assistant"}[role]


class TestMockProvider:
    def test_replays_in_order(self):
        provider = mock_provider([ScriptedReply("hello")])
        result = complete(_bundle(), settings_for_tests(), provider)
        assert result.content == "hello"
        assert result.attempt_count == 1

    def test_script_exhaustion(self):
        provider = mock_provider([ScriptedReply("A")])
        complete(_bundle(), settings_for_tests(), provider)
        with pytest.raises(ScriptExhausted):
            complete(_bundle(), settings_for_tests(), provider)

    def test_records_requests_for_assertion(self):
        """The shipped wrong-attempt fixture: tutor redirects, never corrects."""
        provider = error_redirection_script()
        history = [make_message(1, Author.STUDENT, ERROR_REDIRECTION_STUDENT_ATTEMPT)]
        result = complete(_bundle(history), settings_for_tests(), provider)
        assert result.content == ERROR_REDIRECTION_TUTOR_REPLY
        assert len(provider.requests) == 1
        recorded = provider.requests[0]
        system_prompt = recorded["messages"][0]["content"]
        assert "Never directly provide the solution" in system_prompt
        assert recorded["messages"][1]["content"] == ERROR_REDIRECTION_STUDENT_ATTEMPT

    def test_empty_script_rejected(self):
        with pytest.raises(ValueError):
            mock_provider([])

    def test_cycle_mode_replays_forever(self):
        provider = mock_provider([ScriptedReply("loop")], cycle=True)
        for _ in range(5):
            assert complete(_bundle(), settings_for_tests(), provider).content == "loop"


class TestRetries:
    def test_retry_after_transient_503(self):
        provider = mock_provider(
            [ScriptedHttpError(503), ScriptedReply("recovered")]
        )
        result = complete(_bundle(), settings_for_tests(), provider)
        assert result.content == "recovered"
        assert result.attempt_count == 2

    def test_exhaustion_raises_provider_unavailable(self):
        provider = mock_provider([ScriptedHttpError(503)] * 3)
        with pytest.raises(ProviderUnavailable):
            complete(_bundle(), settings_for_tests(max_retries=2), provider)
        assert len(provider.requests) == 3  # 1 + max_retries

    def test_transport_errors_are_retried(self):
        provider = mock_provider(
            [ScriptedTransportError(), ScriptedReply("after drop")]
        )
        result = complete(_bundle(), settings_for_tests(), provider)
        assert result.content == "after drop"
        assert result.attempt_count == 2

    def test_429_is_retried_with_hint(self):
        provider = mock_provider(
            [ScriptedHttpError(429, retry_after=0.05), ScriptedReply("ok")]
        )
        started = time.monotonic()
        result = complete(_bundle(), settings_for_tests(), provider)
        assert result.content == "ok"
        assert time.monotonic() - started >= 0.05

    def test_retry_hint_is_capped(self):
        from llteacher.gateway import MAX_RETRY_AFTER_HINT, _backoff

        settings = settings_for_tests()
        assert _backoff(settings, 0, 9999.0) == MAX_RETRY_AFTER_HINT
        assert _backoff(settings, 0, 0.01) == 0.01

    def test_plain_4xx_not_retried(self):
        provider = mock_provider([ScriptedHttpError(400)])
        with pytest.raises(ProviderRejected):
            complete(_bundle(), settings_for_tests(), provider)
        assert len(provider.requests) == 1

    def test_empty_content_retried_then_empty_completion(self):
        provider = mock_provider([ScriptedReply("")] * 3)
        with pytest.raises(EmptyCompletion):
            complete(_bundle(), settings_for_tests(max_retries=2), provider)
        assert len(provider.requests) == 3

    def test_first_nonempty_reply_wins(self):
        provider = mock_provider([ScriptedReply(""), ScriptedReply("real")])
        result = complete(_bundle(), settings_for_tests(), provider)
        assert result.content == "real"
        assert result.attempt_count == 2

    @given(
        failures=st.integers(min_value=0, max_value=5),
        max_retries=st.integers(min_value=0, max_value=3),
    )
    @settings(max_examples=30, deadline=None)
    def test_retry_budget_never_exceeded(self, failures, max_retries):
        script = [ScriptedHttpError(503)] * failures + [ScriptedReply("done")] * 4
        provider = mock_provider(script)
        try:
            complete(
                _bundle(), settings_for_tests(max_retries=max_retries), provider
            )
        except ProviderUnavailable:
            pass
        assert len(provider.requests) <= 1 + max_retries


class TestSecretHygiene:
    def test_api_key_never_logged(self, caplog):
        secret = "sk-super-secret-value-42"
        provider = mock_provider(
            [ScriptedHttpError(503), ScriptedTransportError(), ScriptedReply("fine")]
        )
        with caplog.at_level(logging.DEBUG, logger="llteacher.gateway"):
            complete(
                _bundle(),
                settings_for_tests(api_key=secret, max_retries=2),
                provider,
            )
        assert caplog.records, "expected gateway log output"
        assert secret not in caplog.text

    def test_api_key_not_in_recorded_requests(self):
        secret = "sk-another-secret"
        provider = mock_provider([ScriptedReply("x")])
        complete(_bundle(), settings_for_tests(api_key=secret), provider)
        assert secret not in repr(provider.requests)


class TestHttpProvider:
    def _provider(self, handler, **overrides):
        import httpx

        from llteacher.gateway import HttpProvider

        settings = settings_for_tests(**overrides)
        client = httpx.Client(transport=httpx.MockTransport(handler))
        return HttpProvider(settings, client=client), settings

    def test_posts_to_chat_completions_with_bearer(self):
        import httpx

        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["url"] = str(request.url)
            seen["auth"] = request.headers.get("authorization")
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "wire reply"}}]}
            )

        provider, settings = self._provider(handler)
        result = complete(_bundle(), settings, provider)
        assert result.content == "wire reply"
        assert seen["url"] == "http://provider.test/chat/completions"
        assert seen["auth"] == f"Bearer {settings.api_key}"

    def test_retry_after_header_is_parsed(self):
        import httpx

        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            if calls["n"] == 1:
                return httpx.Response(429, headers={"retry-after": "0.05"})
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "after 429"}}]}
            )

        provider, settings = self._provider(handler)
        started = time.monotonic()
        result = complete(_bundle(), settings, provider)
        assert result.content == "after 429"
        assert result.attempt_count == 2
        assert time.monotonic() - started >= 0.05

    def test_malformed_body_is_retried_as_transport_failure(self):
        import httpx

        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            if calls["n"] == 1:
                return httpx.Response(200, json={"unexpected": True})
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "fixed"}}]}
            )

        provider, settings = self._provider(handler)
        assert complete(_bundle(), settings, provider).content == "fixed"

    def test_connection_error_exhausts_to_unavailable(self):
        import httpx

        def handler(request: httpx.Request) -> httpx.Response:
            raise httpx.ConnectError("refused")

        provider, settings = self._provider(handler, max_retries=1)
        with pytest.raises(ProviderUnavailable):
            complete(_bundle(), settings, provider)


class TestSettings:
    def test_from_env_requires_key(self, monkeypatch):
        monkeypatch.delenv("LLTEACHER_API_KEY", raising=False)
        monkeypatch.setenv("LLTEACHER_BASE_URL", "http://provider.test")
        with pytest.raises(ProviderRejected, match="LLTEACHER_API_KEY"):
            ProviderSettings.from_env()

    def test_from_env_reads_both(self, monkeypatch):
        monkeypatch.setenv("LLTEACHER_API_KEY", "k")
        monkeypatch.setenv("LLTEACHER_BASE_URL", "http://provider.test")
        settings = ProviderSettings.from_env()
        assert settings.base_url == "http://provider.test"
        assert settings.api_key == "k"
        assert settings.max_retries == 2
