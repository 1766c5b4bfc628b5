"""Document parsing and text normalization.

Input corpora are NDJSON streams, one document per line with fields
``id``, ``timestamp`` (ISO 8601), ``text`` and optional ``kind``
("original" | "reply" | "retweet", defaulting to "original").
Normalization strips URLs, @-mentions and punctuation, splits hashtags
into constituent words, and lowercases; accented letters survive.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import re
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union

__all__ = [
    "DocumentKind",
    "Document",
    "RecordError",
    "TokenList",
    "parse_documents",
    "preprocess_text",
    "filter_kinds",
]

TokenList = list[str]


class DocumentKind(enum.Enum):
    ORIGINAL = "original"
    REPLY = "reply"
    RETWEET = "retweet"


@dataclass(frozen=True)
class Document:
    id: str
    timestamp: dt.datetime  # timezone-aware, UTC
    text: str
    kind: DocumentKind

    @property
    def date(self) -> dt.date:
        return self.timestamp.date()


@dataclass(frozen=True)
class RecordError:
    """A malformed input line; parsing continues past it."""

    line: int
    reason: str


_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w+)")
_TOKEN_RE = re.compile(r"[^\W_]+")  # unicode letters and digits, no underscore


def _split_hashtag_body(body: str) -> str:
    """Split a hashtag body on case transitions (aB), letter<->digit
    boundaries, and underscores. No dictionary segmentation is attempted."""
    out: list[str] = []
    prev = ""
    for ch in body:
        if ch == "_":
            out.append(" ")
        elif prev and (
            (prev.islower() and ch.isupper())
            or (prev.isalpha() and ch.isdigit())
            or (prev.isdigit() and ch.isalpha())
        ):
            out.append(" ")
            out.append(ch)
        else:
            out.append(ch)
        prev = ch
    return "".join(out)


def preprocess_text(text: str) -> TokenList:
    """Normalize raw text into lowercase word tokens.

    URLs and @-mentions are removed, hashtags are split into their
    constituent words, everything else is lowercased and stripped to
    letter/digit runs. Total function: any input yields a (possibly
    empty) token list.
    """
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = _HASHTAG_RE.sub(lambda m: " " + _split_hashtag_body(m.group(1)) + " ", text)
    return _TOKEN_RE.findall(text.lower())


def _parse_timestamp(raw: str) -> dt.datetime:
    # Python 3.10's fromisoformat rejects a trailing Z.
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = dt.datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=dt.timezone.utc)
    return ts.astimezone(dt.timezone.utc)


def _parse_record(obj: dict) -> Document:
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise ValueError("missing or empty id")
    raw_ts = obj.get("timestamp")
    if not isinstance(raw_ts, str):
        raise ValueError("missing timestamp")
    try:
        ts = _parse_timestamp(raw_ts)
    except ValueError:
        raise ValueError(f"invalid timestamp {raw_ts!r}")
    text = obj.get("text")
    if not isinstance(text, str):
        raise ValueError("missing text")
    raw_kind = obj.get("kind", "original")
    try:
        kind = DocumentKind(raw_kind)
    except ValueError:
        raise ValueError(f"invalid kind {raw_kind!r}")
    return Document(id=doc_id, timestamp=ts, text=text, kind=kind)


def parse_documents(
    stream: Union[IO[bytes], IO[str], Iterable[Union[bytes, str]]],
) -> Iterator[Union[Document, RecordError]]:
    """Parse an NDJSON stream into Documents, reporting bad lines in place.

    Malformed lines become :class:`RecordError` items (1-based line
    numbers) without stopping the stream; blank lines are skipped. Input
    may be a binary or text file object, or any iterable of lines.
    """
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                yield RecordError(lineno, "invalid UTF-8")
                continue
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield RecordError(lineno, f"invalid JSON: {exc.msg}")
            continue
        if not isinstance(obj, dict):
            yield RecordError(lineno, "record is not a JSON object")
            continue
        try:
            yield _parse_record(obj)
        except ValueError as exc:
            yield RecordError(lineno, str(exc))


def filter_kinds(docs: Iterable[Document]) -> Iterator[Document]:
    """Keep originals and replies; drop retweets. Order preserved."""
    return (d for d in docs if d.kind is not DocumentKind.RETWEET)
