"""Credential hashing and bearer-token registry."""

from __future__ import annotations

import hashlib
import hmac
import os
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta

from llteacher.domain.models import utcnow

_SALT_BYTES = 16
_ITERATIONS = 60_000


def hash_credential(plain: str, salt: bytes | None = None) -> bytes:
    """Salted PBKDF2 digest, salt stored in the first 16 bytes."""
    salt = salt if salt is not None else os.urandom(_SALT_BYTES)
    digest = hashlib.pbkdf2_hmac("sha256", plain.encode("utf-8"), salt, _ITERATIONS)
    return salt + digest


def verify_credential(plain: str, stored: bytes) -> bool:
    salt = stored[:_SALT_BYTES]
    return hmac.compare_digest(hash_credential(plain, salt), stored)


@dataclass(frozen=True)
class AuthToken:
    token: str
    user_id: str
    expires_at: datetime


class TokenRegistry:
    """In-memory bearer tokens with expiry. Thread-safe."""

    def __init__(self, ttl_seconds: float = 12 * 3600):
        self._ttl = ttl_seconds
        self._tokens: dict[str, AuthToken] = {}
        self._lock = threading.Lock()

    def issue(self, user_id: str) -> AuthToken:
        token = AuthToken(
            token=secrets.token_urlsafe(32),
            user_id=user_id,
            expires_at=utcnow() + timedelta(seconds=self._ttl),
        )
        with self._lock:
            self._tokens[token.token] = token
        return token

    def resolve(self, token: str) -> str | None:
        """User id for a live token, None for unknown or expired ones."""
        with self._lock:
            entry = self._tokens.get(token)
            if entry is None:
                return None
            if entry.expires_at <= utcnow():
                del self._tokens[token]
                return None
            return entry.user_id

    def expire_now(self, token: str) -> None:
        """Force-expire a token (used by tests and logout)."""
        with self._lock:
            self._tokens.pop(token, None)
