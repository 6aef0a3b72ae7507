"""The permanent semantic lexicon: reviewer decisions, judge ratings, and the
cumulative acquisition curves used to evaluate a ranking.

Ratings run 0-5: 5 core member, 4 subpart of a member, 3 strongly associated,
2 weakly associated, 1 no association, 0 unknown word. A zero can later be
overridden with a real rating; until then it is excluded from aggregation.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .bootstrap import RankedList
from .util import atomic_write_text

log = logging.getLogger(__name__)

STORE_FORMAT = "seedlex-lexicon"
STORE_VERSION = 1

VERDICTS = ("accept", "reject", "defer")
SOURCES = ("manual", "bootstrap-accepted")

RATING_GUIDE = {
    5: "core member of the category",
    4: "subpart of a member of the category",
    3: "strongly associated with the category",
    2: "weakly associated with the category",
    1: "no association with the category",
    0: "unknown word",
}


class RatingsFormatError(Exception):
    pass


class CoverageError(Exception):
    """A rating is missing for a word inside the prefix being evaluated."""

    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__("unrated words in prefix: " + ", ".join(missing))


class UnknownCategoryError(KeyError):
    pass


class UnknownWordError(KeyError):
    pass


@dataclass(frozen=True)
class Rating:
    word: str
    category: str
    judge_id: str
    value: int
    override: int | None = None

    def __post_init__(self):
        if not 0 <= self.value <= 5:
            raise ValueError(f"rating value {self.value} outside 0-5")
        if self.override is not None:
            if self.value != 0:
                raise ValueError("override is only allowed on zero ratings")
            if not 1 <= self.override <= 5:
                raise ValueError(f"override {self.override} outside 1-5")

    @property
    def needs_override(self) -> bool:
        return self.value == 0 and self.override is None

    def effective(self) -> int | None:
        """The rating that counts: the override if present, else the value;
        None for an unresolved zero."""
        if self.override is not None:
            return self.override
        return self.value if self.value != 0 else None


def import_ratings(path: str | Path) -> list[Rating]:
    """Load a ratings TSV: ``word<TAB>category<TAB>judge<TAB>rating[<TAB>override]``.

    ``#`` comment lines are skipped. Duplicate (word, category, judge) rows
    keep the last one, with a warning. Malformed rows raise with their line
    number.
    """
    ratings: dict[tuple[str, str, str], Rating] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\n").split("\t")
        if len(parts) not in (4, 5):
            raise RatingsFormatError(
                f"{path}:{lineno}: expected 4 or 5 tab-separated fields, got {len(parts)}")
        word, category, judge, value_s = (p.strip() for p in parts[:4])
        if not word or not category or not judge:
            raise RatingsFormatError(f"{path}:{lineno}: empty word, category, or judge")
        try:
            value = int(value_s)
        except ValueError:
            raise RatingsFormatError(f"{path}:{lineno}: rating {value_s!r} is not an integer")
        override = None
        if len(parts) == 5 and parts[4].strip():
            try:
                override = int(parts[4])
            except ValueError:
                raise RatingsFormatError(f"{path}:{lineno}: override {parts[4]!r} is not an integer")
        try:
            rating = Rating(word=word.casefold(), category=category, judge_id=judge,
                            value=value, override=override)
        except ValueError as exc:
            raise RatingsFormatError(f"{path}:{lineno}: {exc}")
        key = (rating.word, rating.category, rating.judge_id)
        if key in ratings:
            log.warning("%s:%d: duplicate rating for %s, keeping the later row",
                        path, lineno, key)
        ratings[key] = rating
    return list(ratings.values())


@dataclass(frozen=True)
class AcquisitionCurve:
    category: str
    threshold: int
    step: int
    points: tuple[tuple[int, int], ...]

    def to_tsv(self) -> str:
        lines = ["words_reviewed\tcount"]
        lines.extend(f"{n}\t{c}" for n, c in self.points)
        return "\n".join(lines) + "\n"


def best_ratings(ratings) -> dict[tuple[str, str], int]:
    """Per (category, word): the maximum effective rating across judges.

    Unresolved zeros contribute nothing; a word rated only 0 is absent.
    """
    best: dict[tuple[str, str], int] = {}
    for r in ratings:
        eff = r.effective()
        if eff is None:
            continue
        key = (r.category, r.word)
        if eff > best.get(key, 0):
            best[key] = eff
    return best


def acquisition_curve(ranked: RankedList, ratings, threshold: int, step: int = 20,
                      limit: int | None = None) -> AcquisitionCurve:
    """Cumulative count of words rated at or above the threshold, sampled every
    ``step`` words down the ranking.

    ``limit`` is how far down the list to go (default: the whole ranking,
    floored to a multiple of ``step``). Every word inside the prefix must carry
    at least one rating row, or a CoverageError lists the gaps.
    """
    if threshold not in (2, 3, 4, 5):
        raise ValueError(f"threshold must be 2-5, got {threshold}")
    if step < 1:
        raise ValueError("step must be >= 1")
    words = ranked.norms()
    if limit is None:
        limit = len(words) - len(words) % step
    limit = min(limit, len(words))

    rated_words = {(r.category, r.word) for r in ratings}
    missing = [w for w in words[:limit] if (ranked.category, w) not in rated_words]
    if missing:
        raise CoverageError(missing)

    best = best_ratings(ratings)
    points = []
    count = 0
    for i, word in enumerate(words[:limit], start=1):
        if best.get((ranked.category, word), 0) >= threshold:
            count += 1
        if i % step == 0:
            points.append((i, count))
    return AcquisitionCurve(category=ranked.category, threshold=threshold,
                            step=step, points=tuple(points))


def shuffle_for_review(ranked: RankedList, n: int, rng_seed: int) -> list[str]:
    """A reproducible uniform permutation of the top n words, for blind review."""
    import random

    words = ranked.norms()
    if n > len(words):
        log.warning("requested %d words but ranking has %d; clamping", n, len(words))
        n = len(words)
    head = words[:n]
    random.Random(rng_seed).shuffle(head)
    return head


@dataclass(frozen=True)
class ReviewDecision:
    word: str
    category: str
    verdict: str
    rating: int | None = None
    timestamp: str = ""
    reviewer: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        if self.rating is not None and not 1 <= self.rating <= 5:
            raise ValueError(f"rating {self.rating} outside 1-5")


@dataclass(frozen=True)
class LexiconEntry:
    rating: int
    source: str
    provenance: str = ""


@dataclass
class LexiconStore:
    """Accepted category members plus the append-only decision log and imported
    judge ratings. Persisted as a single human-diffable JSON file, written
    atomically."""

    path: Path | None = None
    acceptance_threshold: int = 3
    rankings: dict[str, dict] = field(default_factory=dict)
    entries: dict[str, dict[str, LexiconEntry]] = field(default_factory=dict)
    decisions: list[ReviewDecision] = field(default_factory=list)
    ratings: list[Rating] = field(default_factory=list)

    def categories(self) -> list[str]:
        return sorted(set(self.rankings) | set(self.entries))

    def register_ranking(self, category: str, run_id: str, words) -> None:
        """Attach the candidate list a review works against for one category."""
        self.rankings[category] = {"run_id": run_id, "words": list(words)}

    def record_decision(self, d: ReviewDecision) -> None:
        """Apply a review decision: accept upserts an entry, reject removes it,
        defer only logs. Identical repeated decisions are no-ops."""
        ranking = self.rankings.get(d.category)
        if ranking is None:
            raise UnknownCategoryError(f"unknown category {d.category!r}")
        if d.word not in ranking["words"]:
            raise UnknownWordError(
                f"{d.word!r} is not in the ranked list of run {ranking['run_id']}")
        if d.verdict == "accept":
            if d.rating is None:
                raise ValueError("accepting a word requires a rating")
            if d.rating < self.acceptance_threshold:
                raise ValueError(
                    f"rating {d.rating} below acceptance threshold {self.acceptance_threshold}")

        last = self._last_decision(d.category, d.word)
        if last is not None and (last.verdict, last.rating) == (d.verdict, d.rating):
            return
        self.decisions.append(d)
        if d.verdict == "accept":
            self.entries.setdefault(d.category, {})[d.word] = LexiconEntry(
                rating=d.rating, source="bootstrap-accepted", provenance=ranking["run_id"])
        elif d.verdict == "reject":
            self.entries.get(d.category, {}).pop(d.word, None)

    def _last_decision(self, category: str, word: str) -> ReviewDecision | None:
        for d in reversed(self.decisions):
            if d.category == category and d.word == word:
                return d
        return None

    def add_entry(self, category: str, word: str, rating: int,
                  source: str = "manual", provenance: str = "") -> None:
        if source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")
        self.entries.setdefault(category, {})[word.casefold()] = LexiconEntry(
            rating=rating, source=source, provenance=provenance)

    def add_ratings(self, ratings) -> None:
        self.ratings.extend(ratings)

    # --- persistence ---

    def save(self, path: str | Path | None = None) -> None:
        path = Path(path) if path is not None else self.path
        if path is None:
            raise ValueError("no path to save the store to")
        self.path = path
        payload = {
            "format": STORE_FORMAT,
            "version": STORE_VERSION,
            "acceptance_threshold": self.acceptance_threshold,
            "rankings": {c: {"run_id": r["run_id"], "words": r["words"]}
                         for c, r in sorted(self.rankings.items())},
            "entries": {
                c: {w: {"rating": e.rating, "source": e.source, "provenance": e.provenance}
                    for w, e in sorted(words.items())}
                for c, words in sorted(self.entries.items())
            },
            "decisions": [
                {"word": d.word, "category": d.category, "verdict": d.verdict,
                 "rating": d.rating, "timestamp": d.timestamp, "reviewer": d.reviewer}
                for d in self.decisions
            ],
            "ratings": [
                {"word": r.word, "category": r.category, "judge_id": r.judge_id,
                 "value": r.value, "override": r.override}
                for r in self.ratings
            ],
        }
        atomic_write_text(path, json.dumps(payload, ensure_ascii=False, sort_keys=True,
                                           indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "LexiconStore":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != STORE_FORMAT:
            raise ValueError(f"not a lexicon store: {path}")
        store = cls(path=path, acceptance_threshold=payload.get("acceptance_threshold", 3))
        store.rankings = {c: {"run_id": r["run_id"], "words": list(r["words"])}
                          for c, r in payload.get("rankings", {}).items()}
        store.entries = {
            c: {w: LexiconEntry(rating=e["rating"], source=e["source"],
                                provenance=e.get("provenance", ""))
                for w, e in words.items()}
            for c, words in payload.get("entries", {}).items()
        }
        store.decisions = [
            ReviewDecision(word=d["word"], category=d["category"], verdict=d["verdict"],
                           rating=d.get("rating"), timestamp=d.get("timestamp", ""),
                           reviewer=d.get("reviewer", ""))
            for d in payload.get("decisions", [])
        ]
        store.ratings = [
            Rating(word=r["word"], category=r["category"], judge_id=r["judge_id"],
                   value=r["value"], override=r.get("override"))
            for r in payload.get("ratings", [])
        ]
        return store


def record_decision(store: LexiconStore, d: ReviewDecision) -> LexiconStore:
    store.record_decision(d)
    return store


EXPORT_TSV_HEADER = "word\tcategory\trating\tsource"


def export_lexicon(store: LexiconStore, category: str, format: str = "tsv") -> str:
    """Serialize one category's accepted entries, ordered by word."""
    if category not in store.categories():
        raise UnknownCategoryError(f"unknown category {category!r}")
    entries = sorted(store.entries.get(category, {}).items())
    if format == "tsv":
        lines = [EXPORT_TSV_HEADER]
        lines.extend(f"{w}\t{category}\t{e.rating}\t{e.source}" for w, e in entries)
        return "\n".join(lines) + "\n"
    if format == "structured":
        payload = {
            "format": "seedlex-lexicon-export",
            "version": 1,
            "category": category,
            "entries": [
                {"word": w, "rating": e.rating, "source": e.source, "provenance": e.provenance}
                for w, e in entries
            ],
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown export format {format!r}")
