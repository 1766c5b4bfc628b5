"""Marker lexicons, dimension configs, and daily prevalence counting.

A lexicon maps marker names to word sets; a dimension names an ordered
combination of markers. Prevalence for a marker on a day is the
percentage of that day's documents containing at least one of its words
(multi-word entries must appear as consecutive tokens).
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .corpus import Document, TokenList
from .errors import LexiconFormatError, MissingDayError
from .series import ONE_DAY, DailySeries

__all__ = [
    "Lexicon",
    "DimensionSpec",
    "DayCounts",
    "load_lexicon",
    "load_dimensions",
    "builtin_dimensions_path",
    "match_markers",
    "count_documents",
    "merge_counts",
    "prevalence_from_counts",
    "daily_prevalence",
]


@dataclass(frozen=True)
class Lexicon:
    """Immutable marker -> word-set mapping, lowercased.

    Entries containing whitespace are phrase entries and match only as
    consecutive token runs.
    """

    markers: dict[str, frozenset[str]]
    _singles: dict[str, frozenset[str]] = field(repr=False, default_factory=dict)
    _phrases: dict[str, tuple[tuple[str, ...], ...]] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.markers:
            raise LexiconFormatError("lexicon has no markers")
        singles: dict[str, frozenset[str]] = {}
        phrases: dict[str, tuple[tuple[str, ...], ...]] = {}
        for name, words in self.markers.items():
            if not name:
                raise LexiconFormatError("empty marker name")
            if not words:
                raise LexiconFormatError(f"marker {name!r} has an empty word list")
            s = set()
            ph = []
            for w in words:
                if not w or w != w.lower():
                    raise LexiconFormatError(
                        f"marker {name!r} has a non-lowercase or empty word {w!r}"
                    )
                parts = tuple(w.split())
                if len(parts) > 1:
                    ph.append(parts)
                else:
                    s.add(w)
            singles[name] = frozenset(s)
            phrases[name] = tuple(sorted(ph))
        object.__setattr__(self, "_singles", singles)
        object.__setattr__(self, "_phrases", phrases)

    @property
    def marker_names(self) -> list[str]:
        return list(self.markers)


@dataclass(frozen=True)
class DimensionSpec:
    """A named, ordered combination of at least two markers."""

    name: str
    markers: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "markers", tuple(self.markers))
        if len(self.markers) < 2:
            raise LexiconFormatError(
                f"dimension {self.name!r} needs at least 2 markers"
            )
        if len(set(self.markers)) != len(self.markers):
            raise LexiconFormatError(f"dimension {self.name!r} repeats a marker")

    def validate_against(self, lexicon: Lexicon) -> None:
        missing = [m for m in self.markers if m not in lexicon.markers]
        if missing:
            raise LexiconFormatError(
                f"dimension {self.name!r} references unknown markers: {missing}"
            )


def _reject_duplicate_keys(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise LexiconFormatError(f"duplicate key {key!r}")
        obj[key] = value
    return obj


def _load_json_object(path: str | Path) -> dict:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconFormatError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(raw, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise LexiconFormatError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise LexiconFormatError(f"{path}: top level must be a JSON object")
    return obj


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a JSON lexicon {marker: [word, ...]}; words are lowercased."""
    obj = _load_json_object(path)
    markers: dict[str, frozenset[str]] = {}
    for name, words in obj.items():
        if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
            raise LexiconFormatError(f"marker {name!r}: word list must be an array of strings")
        cleaned = [w.strip().lower() for w in words]
        if any(not w for w in cleaned):
            raise LexiconFormatError(f"marker {name!r} contains an empty word")
        if not cleaned:
            raise LexiconFormatError(f"marker {name!r} has an empty word list")
        markers[name] = frozenset(cleaned)
    return Lexicon(markers=markers)


def load_dimensions(path: str | Path, lexicon: Lexicon | None = None) -> dict[str, DimensionSpec]:
    """Load a JSON dimension config {dimension: [marker, ...]}."""
    obj = _load_json_object(path)
    dims: dict[str, DimensionSpec] = {}
    for name, markers in obj.items():
        if not isinstance(markers, list) or not all(isinstance(m, str) for m in markers):
            raise LexiconFormatError(f"dimension {name!r}: marker list must be an array of strings")
        spec = DimensionSpec(name=name, markers=tuple(markers))
        if lexicon is not None:
            spec.validate_against(lexicon)
        dims[name] = spec
    return dims


def builtin_dimensions_path(variant: str = "default") -> Path:
    """Path of a dimension config shipped with the package.

    ``default`` uses the surprise-bearing emotion lists; ``alternate``
    swaps in the love/hate variant of the emotion dimensions.
    """
    name = {"default": "dimensions.json", "alternate": "dimensions_alternate.json"}.get(variant)
    if name is None:
        raise ValueError(f"unknown variant {variant!r}")
    return Path(__file__).parent / "data" / name


def match_markers(tokens: TokenList, lexicon: Lexicon) -> set[str]:
    """Markers with at least one word (or consecutive phrase) in ``tokens``."""
    token_set = set(tokens)
    matched = set()
    for name in lexicon.markers:
        if token_set & lexicon._singles[name]:
            matched.add(name)
            continue
        for phrase in lexicon._phrases[name]:
            plen = len(phrase)
            if plen > len(tokens):
                continue
            if any(
                tuple(tokens[i : i + plen]) == phrase
                for i in range(len(tokens) - plen + 1)
            ):
                matched.add(name)
                break
    return matched


# --- Counting (commutative-monoid contract for parallel ingestion) ----------


@dataclass
class DayCounts:
    """Per-day (total, per-marker match) counts; merge is elementwise addition."""

    total: int = 0
    matches: dict[str, int] = field(default_factory=dict)


def count_documents(
    docs: Iterable[tuple[Document, TokenList]], lexicon: Lexicon
) -> dict[dt.date, DayCounts]:
    """Count totals and marker matches per UTC day.

    A document matching several words of one marker counts once for that
    marker; matching several markers counts once for each.
    """
    counts: dict[dt.date, DayCounts] = {}
    for doc, tokens in docs:
        day = counts.setdefault(doc.date, DayCounts())
        day.total += 1
        for marker in match_markers(tokens, lexicon):
            day.matches[marker] = day.matches.get(marker, 0) + 1
    return counts


def merge_counts(
    *partials: Mapping[dt.date, DayCounts],
) -> dict[dt.date, DayCounts]:
    """Merge independently counted partitions (order never matters)."""
    merged: dict[dt.date, DayCounts] = {}
    for part in partials:
        for date, day in part.items():
            acc = merged.setdefault(date, DayCounts())
            acc.total += day.total
            for marker, k in day.matches.items():
                acc.matches[marker] = acc.matches.get(marker, 0) + k
    return merged


def prevalence_from_counts(
    counts: Mapping[dt.date, DayCounts],
    lexicon: Lexicon,
    date_range: tuple[dt.date, dt.date],
    fill: str = "error",
) -> dict[str, DailySeries]:
    """Turn merged day counts into one percent-prevalence series per marker.

    ``fill`` controls days with zero documents inside the range:
    ``"error"`` raises ``MissingDayError``; ``"interpolate"`` fills
    linearly between the nearest non-missing days (boundary gaps cannot
    be extrapolated and raise).
    """
    start, end = date_range
    if end < start:
        raise ValueError("empty date range")
    if fill not in ("error", "interpolate"):
        raise ValueError(f"unknown fill policy {fill!r}")
    n_days = (end - start).days + 1
    dates = [start + k * ONE_DAY for k in range(n_days)]
    totals = np.array([counts[d].total if d in counts else 0 for d in dates], dtype=np.float64)
    missing = totals == 0
    if fill == "error" and missing.any():
        raise MissingDayError(dates[int(np.flatnonzero(missing)[0])])
    if missing.any() and (missing[0] or missing[-1]):
        bad = dates[0] if missing[0] else dates[-1]
        raise MissingDayError(bad, f"cannot extrapolate: boundary day {bad} has no documents")

    out: dict[str, DailySeries] = {}
    for marker in lexicon.markers:
        hits = np.array(
            [counts[d].matches.get(marker, 0) if d in counts else 0 for d in dates],
            dtype=np.float64,
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = 100.0 * hits / totals
        if missing.any():
            vals[missing] = np.nan
            idx = np.arange(n_days)
            present = ~missing
            vals[missing] = np.interp(idx[missing], idx[present], vals[present])
        out[marker] = DailySeries(start, vals, unit="percent")
    return out


def daily_prevalence(
    docs: Iterable[tuple[Document, TokenList]],
    lexicon: Lexicon,
    date_range: tuple[dt.date, dt.date],
    fill: str = "error",
) -> dict[str, DailySeries]:
    """Daily percent prevalence per marker over ``date_range`` (inclusive).

    Documents dated outside the range are ignored. Equivalent to
    ``prevalence_from_counts(count_documents(docs, lexicon), ...)``; the
    counting step may be partitioned arbitrarily and merged.
    """
    return prevalence_from_counts(count_documents(docs, lexicon), lexicon, date_range, fill)
