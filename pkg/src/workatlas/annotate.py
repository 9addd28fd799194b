"""Pluggable annotators that propose taxonomy paths for task instructions.

An annotator receives a natural-language instruction plus a flattened
taxonomy rendering and returns raw text containing candidate label
sequences. The candidate grammar is deliberately narrow so parsing stays
deterministic: either a JSON array of label sequences, or one sequence per
line with labels joined by ``>``. Anything else is a parse failure for that
candidate.

Three implementations cover the production and test paths: a remote HTTP
annotator (endpoint and credential from ``ATLAS_ANNOTATOR_URL`` /
``ATLAS_ANNOTATOR_KEY``), a deterministic keyword annotator, and a replay
annotator that serves recorded outputs.
"""

from __future__ import annotations

import json
import os
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence, runtime_checkable

ANNOTATOR_URL_ENV = "ATLAS_ANNOTATOR_URL"
ANNOTATOR_KEY_ENV = "ATLAS_ANNOTATOR_KEY"

SEQUENCE_SEPARATOR = ">"


class AnnotatorTransportError(RuntimeError):
    """Raised when the annotator endpoint stays unreachable after retries."""

    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"{message} (after {attempts} attempts)")


@runtime_checkable
class Annotator(Protocol):
    """Behavioral contract: text in, candidate text out."""

    annotator_id: str

    def annotate(self, instruction: str, taxonomy_text: str) -> str:
        ...


def parse_candidates(raw: str) -> tuple[list[list[str]], int]:
    """Parse raw annotator output into candidate label sequences.

    Returns ``(sequences, failed)`` where ``failed`` counts candidates that
    were present but unparseable. Empty output (or an empty JSON array)
    yields ``([], 0)``, which callers treat as "no candidates" rather than
    as a failure.
    """
    text = raw.strip()
    if not text:
        return [], 0

    # Structured form: a JSON array whose items are label arrays (or single
    # separator-joined strings).
    if text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = None
        if isinstance(data, list):
            sequences: list[list[str]] = []
            failed = 0
            for item in data:
                if isinstance(item, list) and item and all(
                    isinstance(x, str) and x.strip() for x in item
                ):
                    sequences.append([x.strip() for x in item])
                elif isinstance(item, str) and item.strip():
                    sequences.append(_split_line(item))
                else:
                    failed += 1
            return sequences, failed

    # Line form: one candidate per non-empty line.
    sequences = []
    failed = 0
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        labels = _split_line(line)
        if labels:
            sequences.append(labels)
        else:
            failed += 1
    return sequences, failed


def _split_line(line: str) -> list[str]:
    return [part.strip() for part in line.split(SEQUENCE_SEPARATOR) if part.strip()]


def format_candidates(sequences: Iterable[Sequence[str]]) -> str:
    """Render label sequences in the structured candidate grammar."""
    return json.dumps([list(seq) for seq in sequences])


@dataclass(frozen=True)
class KeywordRule:
    keyword: str
    labels: tuple[str, ...]


class KeywordAnnotator:
    """Deterministic annotator: substring keyword rules fire label sequences.

    Matching is case-insensitive; rules fire in declaration order and the
    output is the structured candidate grammar, so repeated calls are
    byte-identical. Stateless, hence safe for concurrent use.
    """

    def __init__(self, rules: Iterable[KeywordRule], annotator_id: str = "keyword"):
        self.rules = tuple(rules)
        self.annotator_id = annotator_id

    @classmethod
    def from_file(cls, path: str | Path, annotator_id: str | None = None) -> "KeywordAnnotator":
        """Load rules from a JSON array of ``{keyword, labels}`` objects."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        rules = [KeywordRule(r["keyword"], tuple(r["labels"])) for r in data]
        return cls(rules, annotator_id or f"keyword:{Path(path).stem}")

    def annotate(self, instruction: str, taxonomy_text: str) -> str:
        lowered = instruction.lower()
        hits = [rule.labels for rule in self.rules if rule.keyword.lower() in lowered]
        if not hits:
            return "[]"
        return format_candidates(hits)


class ReplayAnnotator:
    """Serves previously recorded raw outputs, keyed by instruction text.

    Bit-deterministic by construction: the same instruction always yields
    the same recorded bytes. Unknown instructions raise ``KeyError`` so a
    stale recording is loud rather than silently empty.
    """

    def __init__(self, recorded: Mapping[str, str], annotator_id: str = "replay"):
        self._recorded = dict(recorded)
        self.annotator_id = annotator_id

    @classmethod
    def from_records(
        cls,
        examples: Iterable,
        mappings: Iterable,
        annotator_id: str = "replay",
    ) -> "ReplayAnnotator":
        """Join persisted examples and mapping records on (benchmark, example_id).

        ``examples`` supply instructions, ``mappings`` supply the retained
        raw annotator output for those examples.
        """
        instruction_by_key = {(e.benchmark, e.example_id): e.instruction for e in examples}
        recorded: dict[str, str] = {}
        for m in mappings:
            key = (m.benchmark, m.example_id)
            if key in instruction_by_key:
                recorded[instruction_by_key[key]] = m.raw_annotator_output
        return cls(recorded, annotator_id)

    def annotate(self, instruction: str, taxonomy_text: str) -> str:
        return self._recorded[instruction]


class RemoteAnnotator:
    """HTTP annotator: POSTs instruction + flattened taxonomy, body is the
    candidate text.

    Transport failures are retried with exponential backoff (3 attempts by
    default) and surfaced as :class:`AnnotatorTransportError` with the
    attempt count. HTTP 4xx responses are not retried: they indicate a
    request problem, not a transient fault.
    """

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        annotator_id: str = "remote",
        max_attempts: int = 3,
        backoff_base: float = 0.5,
        timeout: float = 60.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.url = url or os.environ.get(ANNOTATOR_URL_ENV)
        if not self.url:
            raise ValueError(f"no annotator endpoint: pass url= or set {ANNOTATOR_URL_ENV}")
        self.api_key = api_key if api_key is not None else os.environ.get(ANNOTATOR_KEY_ENV)
        self.annotator_id = annotator_id
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._sleep = sleep

    def annotate(self, instruction: str, taxonomy_text: str) -> str:
        payload = json.dumps(
            {"instruction": instruction, "taxonomy": taxonomy_text}
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            request = urllib.request.Request(self.url, data=payload, headers=headers)
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                    return resp.read().decode("utf-8")
            except urllib.error.HTTPError as err:
                if 400 <= err.code < 500:
                    raise AnnotatorTransportError(
                        f"annotator rejected request with HTTP {err.code}", attempt
                    ) from err
                last_error = err
            except (urllib.error.URLError, TimeoutError, OSError) as err:
                last_error = err
            if attempt < self.max_attempts:
                self._sleep(self.backoff_base * (2 ** (attempt - 1)))
        raise AnnotatorTransportError(
            f"annotator endpoint {self.url} unreachable: {last_error}", self.max_attempts
        ) from last_error
