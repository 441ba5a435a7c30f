"""
Completion Clients Module

This module defines the completion-service contract the annotator talks to:
a structured request document goes in, a text response comes out. Two
transports are bundled: a deterministic scripted stub and an HTTP client.

Classes:
- CompletionClient: The contract.
- ScriptedCompletionClient: Answers from a template, with a scripted failure schedule.
- HttpCompletionClient: POSTs request documents to a completion endpoint.

Functions:
- make_client: Builds the client named in the annotator config.

Dependencies:
- requests: HTTP transport of the HTTP client.
"""
import json
import logging
import os
import threading
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import requests

from guicorpus.exceptions import ClientError, ConfigError, TransientClientError
from guicorpus.records import text_digest

logger = logging.getLogger(__name__)

DEFAULT_STUB_TEMPLATE = "click mark {acted_mark}"


class CompletionClient(ABC):
    """
    Sends one annotation request document and returns the raw response text.

    Implementations raise TransientClientError for failures worth retrying
    and ClientError for anything else.
    """

    @abstractmethod
    def complete(self, document: Dict[str, Any]) -> str:
        raise NotImplementedError


class ScriptedCompletionClient(CompletionClient):
    """
    Deterministic stand-in for a completion service.

    The response is the template formatted with the request document's
    fields (instruction, before_ref, after_ref, acted_mark, acted_label).
    Every distinct request first fails transiently 'transient_failures'
    times; with 'always_fail' set it never succeeds.
    """

    def __init__(self, template: str = DEFAULT_STUB_TEMPLATE, transient_failures: int = 0,
                 always_fail: bool = False):
        self.template = template
        self.transient_failures = transient_failures
        self.always_fail = always_fail
        self.calls = 0
        self._attempts: Dict[str, int] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_script(cls, path: str) -> "ScriptedCompletionClient":
        """
        Loads a stub script: {"template": ..., "transient_failures": n, "always_fail": bool}.
        """
        if not os.path.exists(path):
            raise ConfigError(f"Stub script not found: {path}")
        with open(path, "r", encoding="utf-8") as script_file:
            try:
                script = json.load(script_file)
            except json.JSONDecodeError as error:
                raise ConfigError(f"{path}: invalid JSON ({error})") from error
        return cls(script.get("template", DEFAULT_STUB_TEMPLATE), int(script.get("transient_failures", 0)),
                   bool(script.get("always_fail", False)))

    def complete(self, document: Dict[str, Any]) -> str:
        key = text_digest(json.dumps(document, sort_keys=True))
        with self._lock:
            self.calls += 1
            attempt = self._attempts.get(key, 0) + 1
            self._attempts[key] = attempt
        if self.always_fail or attempt <= self.transient_failures:
            raise TransientClientError(f"scripted failure on attempt {attempt}")
        try:
            return self.template.format(**document)
        except (KeyError, IndexError) as error:
            raise ConfigError(f"Stub template refers to unknown field {error}") from error


class HttpCompletionClient(CompletionClient):
    """
    Posts request documents as JSON and reads {"sub_instruction": ...} back.
    """

    def __init__(self, url: str, timeout: float = 30, session: Optional[requests.Session] = None):
        if not url:
            raise ConfigError("annotator.url is required for the http client")
        self.url = url
        self.timeout = timeout
        self.session = session or requests.Session()

    def complete(self, document: Dict[str, Any]) -> str:
        try:
            response = self.session.post(self.url, json=document, timeout=self.timeout)
        except (requests.ConnectionError, requests.Timeout) as error:
            raise TransientClientError(f"{self.url}: {error}") from error
        if response.status_code >= 500 or response.status_code == 429:
            raise TransientClientError(f"{self.url}: HTTP {response.status_code}")
        if response.status_code != 200:
            raise ClientError(f"{self.url}: HTTP {response.status_code}")
        try:
            return str(response.json()["sub_instruction"])
        except (ValueError, KeyError, TypeError) as error:
            raise ClientError(f"{self.url}: malformed response ({error})") from error


def make_client(section: Dict[str, Any], base_dir: str = ".") -> CompletionClient:
    kind = section.get("client", "stub")
    if kind == "stub":
        script = section.get("script")
        if script:
            return ScriptedCompletionClient.from_script(os.path.join(base_dir, script))
        return ScriptedCompletionClient()
    if kind == "http":
        return HttpCompletionClient(section.get("url"), section.get("timeout", 30))
    raise ConfigError(f"Unknown annotator client {kind!r}")
