"""The bootstrapping loop: context windows around seed head nouns, category
scoring, filtering, ranking, and iterative seed promotion.

A category score is the exact ratio of a word's occurrences inside the
category's context windows to its total corpus frequency. One token occurrence
can fall inside several windows (it may be the right noun of one seed and the
left noun of another), so scores can exceed 1. Scores are kept as rationals so
ties and comparisons are exact.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .corpus import CorpusIndex, Sentence, normalize, sentences_containing
from .shallow_parser import (
    ChunkedSentence,
    PosLexicon,
    chunk,
    head_noun,
    is_number,
    tag_tokens,
)

log = logging.getLogger(__name__)

RANKING_FORMAT = "seedlex-ranking"
RANKING_VERSION = 1

SHIPPED_CATEGORIES = ("energy", "financial", "military", "vehicle", "weapon")


def load_word_list(path: str | Path) -> list[str]:
    """Read a word-per-line file (``#`` comments, blank lines ignored), normalized."""
    words = []
    seen = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        word = raw.split("#", 1)[0].strip()
        if not word:
            continue
        norm = normalize(word)
        if norm not in seen:
            seen.add(norm)
            words.append(norm)
    return words


def default_stoplist() -> frozenset[str]:
    with resources.as_file(resources.files("seedlex") / "data" / "stopwords.txt") as p:
        return frozenset(load_word_list(p))


def default_seed_path(category: str) -> Path:
    if category not in SHIPPED_CATEGORIES:
        raise KeyError(f"no shipped seed list for category {category!r}; "
                       f"choose one of {', '.join(SHIPPED_CATEGORIES)} or pass a seed file")
    with resources.as_file(resources.files("seedlex") / "data" / "seeds" / f"{category}.txt") as p:
        return p


@dataclass(frozen=True)
class SeedList:
    """Seed words for one category: the user-supplied originals plus the words
    promoted by bootstrapping iterations, each tagged with its iteration number."""

    category: str
    original: tuple[str, ...]
    promoted: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        overlap = set(self.original) & {w for w, _ in self.promoted}
        if overlap:
            raise ValueError(f"words promoted over original seeds: {sorted(overlap)}")

    def members(self) -> frozenset[str]:
        return frozenset(self.original) | {w for w, _ in self.promoted}

    def promoted_words(self) -> frozenset[str]:
        return frozenset(w for w, _ in self.promoted)

    def with_promotions(self, words, iteration: int) -> "SeedList":
        current = self.members()
        new = tuple((w, iteration) for w in words if w not in current)
        return replace(self, promoted=self.promoted + new)

    @classmethod
    def from_file(cls, category: str, path: str | Path) -> "SeedList":
        words = load_word_list(path)
        if not words:
            raise ValueError(f"seed file {path} contains no words")
        return cls(category=category, original=tuple(words))


@dataclass(frozen=True)
class ContextWindow:
    """The nearest noun on each side of one seed occurrence as an NP head.

    Positions index tokens within the anchor's sentence; either side may be
    absent when no noun exists on that side of the sentence.
    """

    doc_id: str
    sentence_index: int
    anchor: str
    anchor_pos: int
    left: str | None = None
    left_pos: int | None = None
    right: str | None = None
    right_pos: int | None = None


@dataclass(frozen=True)
class ScoredWord:
    word: str
    display: str
    window_count: int
    corpus_freq: int
    score: Fraction
    was_original_seed: bool = False
    was_promoted_seed: bool = False


@dataclass(frozen=True)
class BootstrapConfig:
    iterations: int = 8
    promote_per_iteration: int = 5
    min_corpus_freq: int = 5
    stoplist: frozenset[str] = field(default_factory=default_stoplist)
    number_filter: str = "strict"
    freq_nouns_only: bool = False
    left_nouns: int = 1
    right_nouns: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.promote_per_iteration < 0:
            raise ValueError("promote_per_iteration must be >= 0")
        if self.left_nouns != 1 or self.right_nouns != 1:
            raise ValueError("window width is fixed at one noun per side")
        if self.number_filter == "paper_faithful":
            object.__setattr__(self, "number_filter", "paper")
        if self.number_filter not in ("strict", "paper"):
            raise ValueError(f"number_filter must be 'strict' or 'paper', "
                             f"got {self.number_filter!r}")

    def snapshot(self) -> dict:
        return {
            "iterations": self.iterations,
            "promote_per_iteration": self.promote_per_iteration,
            "min_corpus_freq": self.min_corpus_freq,
            "stoplist": sorted(self.stoplist),
            "number_filter": self.number_filter,
            "freq_nouns_only": self.freq_nouns_only,
            "left_nouns": self.left_nouns,
            "right_nouns": self.right_nouns,
        }


@dataclass(frozen=True)
class RankedList:
    """Scored, filtered candidates of the final iteration, strictly ordered by
    (score desc, corpus frequency desc, word asc)."""

    category: str
    words: tuple[ScoredWord, ...]
    config: BootstrapConfig | None = None
    promotions: tuple[tuple[int, tuple[str, ...]], ...] = ()
    warning: str | None = None

    def norms(self) -> list[str]:
        return [w.word for w in self.words]


def extract_windows(chunked_sentences, seeds: SeedList) -> list[ContextWindow]:
    """One window per occurrence of a seed word as the head noun of an NP.

    The window holds the nearest noun-tagged token before and after the
    anchor within the same sentence, skipping over non-noun tokens. A seed
    occurring inside an NP but not as its head yields no window.
    """
    members = seeds.members()
    windows = []
    for cs in chunked_sentences:
        tagged = [t for c in cs.chunks for t in c.tokens]
        noun_positions = [i for i, t in enumerate(tagged) if t.tag == "noun"]
        for np in cs.noun_phrases():
            head = head_noun(np)
            if head.norm not in members:
                continue
            anchor_pos = np.start + np.head
            left_pos = max((p for p in noun_positions if p < anchor_pos), default=None)
            right_pos = min((p for p in noun_positions if p > anchor_pos), default=None)
            windows.append(ContextWindow(
                doc_id=cs.doc_id,
                sentence_index=cs.sentence_index,
                anchor=head.norm,
                anchor_pos=anchor_pos,
                left=tagged[left_pos].norm if left_pos is not None else None,
                left_pos=left_pos,
                right=tagged[right_pos].norm if right_pos is not None else None,
                right_pos=right_pos,
            ))
    return windows


class ScoreConsistencyError(Exception):
    """A window captured a word the frequency source has never seen."""


def score_words(windows, index: CorpusIndex, seeds: SeedList | None = None,
                freq_map: dict[str, int] | None = None) -> list[ScoredWord]:
    """Score every word appearing in the windows: window slots over corpus frequency.

    A word's window count is the number of (window, side) slots holding it, so
    one token occurrence counts once per window that captured it.
    """
    counts: Counter[str] = Counter()
    for w in windows:
        if w.left is not None:
            counts[w.left] += 1
        if w.right is not None:
            counts[w.right] += 1

    original = set(seeds.original) if seeds else set()
    promoted = seeds.promoted_words() if seeds else set()
    scored = []
    for norm in sorted(counts):
        freq = freq_map.get(norm, 0) if freq_map is not None else index.frequency(norm)
        if freq <= 0:
            raise ScoreConsistencyError(
                f"{norm!r} appears in context windows but has corpus frequency 0")
        scored.append(ScoredWord(
            word=norm,
            display=index.display_form(norm),
            window_count=counts[norm],
            corpus_freq=freq,
            score=Fraction(counts[norm], freq),
            was_original_seed=norm in original,
            was_promoted_seed=norm in promoted,
        ))
    return scored


def filter_candidates(scored, cfg: BootstrapConfig) -> list[ScoredWord]:
    """Drop stopwords, numbers, and words at or below the corpus-frequency floor."""
    return [
        s for s in scored
        if s.word not in cfg.stoplist
        and not is_number(s.word, cfg.number_filter)
        and s.corpus_freq > cfg.min_corpus_freq
    ]


def _rank_key(s: ScoredWord):
    return (-s.score, -s.corpus_freq, s.word)


def rank(scored, category: str = "", config: BootstrapConfig | None = None) -> RankedList:
    """Total order: score desc, then corpus frequency desc, then word asc."""
    return RankedList(category=category, words=tuple(sorted(scored, key=_rank_key)),
                      config=config)


def promote_seeds(ranked: RankedList, seeds: SeedList, k: int,
                  iteration: int | None = None) -> SeedList:
    """Add the top k ranked words that are not already seeds.

    Walks the ranking top-down; if fewer than k new words exist, adds them all.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if iteration is None:
        iteration = max((it for _, it in seeds.promoted), default=0) + 1
    current = seeds.members()
    picked = []
    for s in ranked.words:
        if len(picked) >= k:
            break
        if s.word not in current:
            picked.append(s.word)
    return seeds.with_promotions(picked, iteration)


def noun_frequency_map(index: CorpusIndex, lex: PosLexicon,
                       number_mode: str = "strict", jobs: int = 1) -> dict[str, int]:
    """Occurrence counts restricted to noun-tagged tokens, for the optional
    nouns-only frequency denominator."""
    def count(sentence: Sentence) -> Counter:
        c: Counter[str] = Counter()
        for t in tag_tokens(sentence.tokens, lex, number_mode):
            if t.tag == "noun":
                c[t.norm] += 1
        return c

    total: Counter[str] = Counter()
    for c in _map_sentences(count, index.sentences, jobs):
        total.update(c)
    return dict(total)


def _map_sentences(fn, sentences, jobs: int):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, sentences))
    return [fn(s) for s in sentences]


def run_bootstrap(index: CorpusIndex, seeds: SeedList, lex: PosLexicon,
                  cfg: BootstrapConfig | None = None, jobs: int = 1,
                  confirm=None) -> RankedList:
    """Run the full loop: select seed sentences, chunk, collect windows, score,
    filter, rank, then promote the top new words and repeat.

    Returns the final iteration's ranking with the per-iteration promotion log.
    If an iteration produces no context windows the loop stops early and the
    last ranking is returned with a warning. ``confirm``, when given, is called
    with each promotion candidate and may veto it (the optional human check
    between iterations).
    """
    cfg = cfg or BootstrapConfig()
    freq_map = None
    if cfg.freq_nouns_only:
        freq_map = noun_frequency_map(index, lex, cfg.number_filter, jobs=jobs)

    chunk_cache: dict[tuple[str, int], ChunkedSentence] = {}

    def chunked(sentence: Sentence) -> ChunkedSentence:
        key = (sentence.doc_id, sentence.index)
        if key not in chunk_cache:
            tagged = tag_tokens(sentence.tokens, lex, cfg.number_filter)
            chunk_cache[key] = chunk(tagged, doc_id=sentence.doc_id,
                                     sentence_index=sentence.index)
        return chunk_cache[key]

    current = seeds
    vetoed: set[str] = set()
    promotions: list[tuple[int, tuple[str, ...]]] = []
    last_ranking: RankedList | None = None
    warning = None

    for iteration in range(1, cfg.iterations + 1):
        selected = sentences_containing(index, current.members())
        # cache fills under the worker pool; reads after that are sequential
        _map_sentences(chunked, selected, jobs)
        windows = extract_windows([chunked(s) for s in selected], current)
        if not windows:
            warning = (f"no context windows at iteration {iteration}; "
                       f"stopped early after {iteration - 1} completed iterations")
            log.warning("%s: %s", seeds.category, warning)
            break
        scored = score_words(windows, index, seeds=current, freq_map=freq_map)
        ranking = rank(filter_candidates(scored, cfg), category=seeds.category, config=cfg)

        picked = []
        members = current.members()
        for s in ranking.words:
            if len(picked) >= cfg.promote_per_iteration:
                break
            if s.word in members or s.word in vetoed:
                continue
            if confirm is not None and not confirm(s.word):
                vetoed.add(s.word)
                continue
            picked.append(s.word)
        current = current.with_promotions(picked, iteration)
        promotions.append((iteration, tuple(picked)))
        last_ranking = ranking

    if last_ranking is None:
        last_ranking = RankedList(category=seeds.category, words=(), config=cfg)
    return replace(last_ranking, promotions=tuple(promotions), warning=warning)


def format_score(score: Fraction) -> str:
    return f"{float(score):.6f}"


RANKING_TSV_HEADER = "rank\tword\tscore\twindow_count\tcorpus_freq\tseed_flag"


def _seed_flag(s: ScoredWord) -> str:
    if s.was_original_seed:
        return "original"
    if s.was_promoted_seed:
        return "promoted"
    return "-"


def ranking_to_tsv(ranked: RankedList) -> str:
    """Tab-separated ranking table, one candidate per line."""
    lines = [RANKING_TSV_HEADER]
    for i, s in enumerate(ranked.words, start=1):
        lines.append("\t".join([
            str(i), s.display, format_score(s.score),
            str(s.window_count), str(s.corpus_freq), _seed_flag(s),
        ]))
    return "\n".join(lines) + "\n"


def ranking_to_json(ranked: RankedList, run_id: str | None = None) -> str:
    """Structured ranking export: versioned, with config snapshot and promotion log."""
    payload = {
        "format": RANKING_FORMAT,
        "version": RANKING_VERSION,
        "run_id": run_id,
        "category": ranked.category,
        "warning": ranked.warning,
        "config": ranked.config.snapshot() if ranked.config else None,
        "promotions": [
            {"iteration": it, "words": list(words)} for it, words in ranked.promotions
        ],
        "words": [
            {
                "rank": i,
                "word": s.word,
                "display": s.display,
                "score": f"{s.score.numerator}/{s.score.denominator}",
                "score_decimal": format_score(s.score),
                "window_count": s.window_count,
                "corpus_freq": s.corpus_freq,
                "seed_flag": _seed_flag(s),
            }
            for i, s in enumerate(ranked.words, start=1)
        ],
    }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def ranking_from_json(path: str | Path) -> tuple[RankedList, dict]:
    """Load a structured ranking export; returns the ranking and the raw payload."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != RANKING_FORMAT:
        raise ValueError(f"not a ranking export: {path}")
    words = tuple(
        ScoredWord(
            word=w["word"],
            display=w["display"],
            window_count=w["window_count"],
            corpus_freq=w["corpus_freq"],
            score=Fraction(*[int(p) for p in w["score"].split("/")]),
            was_original_seed=w["seed_flag"] == "original",
            was_promoted_seed=w["seed_flag"] == "promoted",
        )
        for w in payload["words"]
    )
    promotions = tuple(
        (p["iteration"], tuple(p["words"])) for p in payload.get("promotions", [])
    )
    return RankedList(category=payload["category"], words=words,
                      promotions=promotions, warning=payload.get("warning")), payload
