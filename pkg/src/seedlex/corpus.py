"""Corpus loading: sentence splitting, tokenization, frequency and inverted indexes.

A corpus is a directory of plain UTF-8 ``.txt`` files, one document per file.
Matching throughout the toolkit is case-insensitive: every token keeps its
original surface form plus a case-folded ``norm`` used as the index key.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .util import atomic_write_text

log = logging.getLogger(__name__)

INDEX_FORMAT = "seedlex-corpus-index"
INDEX_VERSION = 1

# Words that keep a following period from ending a sentence. A single capital
# letter before the period (an initial) is guarded by rule, not by this list.
DEFAULT_ABBREVIATIONS = frozenset({
    "mr", "mrs", "ms", "dr", "prof", "gen", "col", "lt", "capt", "maj",
    "sgt", "cpl", "adm", "gov", "sen", "rep", "st", "mt", "ft",
    "u.s", "u.n", "u.k", "d.c",
    "inc", "co", "corp", "ltd", "dept", "est", "no", "fig", "vol",
    "vs", "etc", "e.g", "i.e", "jr", "sr",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
})


@dataclass(frozen=True)
class TokenizerConfig:
    """Knobs for text segmentation. Token rules themselves are fixed in v1."""

    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS

    @classmethod
    def with_abbreviation_file(cls, path: str | Path) -> "TokenizerConfig":
        """Extend the built-in abbreviation guard with one entry per line from a file."""
        extra = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            word = line.split("#", 1)[0].strip().rstrip(".").casefold()
            if word:
                extra.add(word)
        return cls(abbreviations=DEFAULT_ABBREVIATIONS | frozenset(extra))


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str
    sent_pos: int


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    tokens: tuple[Token, ...]

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Document:
    id: str
    source_path: str
    text: str


@dataclass
class LoadReport:
    """What happened during a directory load; skipped files never enter the index."""

    loaded: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"documents loaded: {self.loaded}", f"files skipped: {len(self.skipped)}"]
        out.extend(f"skipped {path}: {reason}" for path, reason in self.skipped)
        return out


class CorpusError(Exception):
    """Unusable corpus input (missing directory, no readable documents)."""


def normalize(surface: str) -> str:
    """Index key for a surface form: the surface unchanged except case-folded."""
    return surface.casefold()


# Token shapes, tried in order: numbers with thousands separators, decimals,
# dotted acronyms (optionally hyphen-extended, e.g. U.S.-made), words with
# internal hyphens or underscores (AK-47, Boeing_727), then any single
# non-space character as punctuation.
_TOKEN_RE = re.compile(
    r"\d{1,3}(?:,\d{3})+(?:\.\d+)?"
    r"|\d+\.\d+"
    r"|(?:[A-Za-z]\.){2,}(?:-\w+(?:-\w+)*)?"
    r"|\w+(?:-\w+)*"
    r"|\S"
)

_SENT_PUNCT_RE = re.compile(r"[.!?]")
_ABBREV_BEFORE_RE = re.compile(r"([A-Za-z]+(?:\.[A-Za-z]+)*)$")


def tokenize(sentence_text: str, cfg: TokenizerConfig | None = None) -> list[Token]:
    """Split one sentence into tokens.

    Hyphenated alphanumerics, underscore compounds, and numbers (with or
    without commas) stay single tokens; punctuation is split off.
    """
    tokens = []
    for pos, match in enumerate(_TOKEN_RE.finditer(sentence_text)):
        surface = match.group()
        tokens.append(Token(surface=surface, norm=normalize(surface), sent_pos=pos))
    return tokens


def _is_guarded_abbreviation(text: str, dot_pos: int, cfg: TokenizerConfig) -> bool:
    m = _ABBREV_BEFORE_RE.search(text, 0, dot_pos)
    if not m:
        return False
    word = m.group(1)
    if len(word) == 1 and word.isupper():
        return True
    return word.casefold() in cfg.abbreviations


def split_sentences(text: str, cfg: TokenizerConfig | None = None) -> list[tuple[int, int]]:
    """Return (start, end) character spans of sentences, covering all non-whitespace.

    A boundary is ``.``, ``!`` or ``?`` followed by whitespace and a capital
    letter, or by end of text; a ``.`` after a known abbreviation or a single
    capital initial does not end the sentence.
    """
    cfg = cfg or TokenizerConfig()
    boundaries = []
    for m in _SENT_PUNCT_RE.finditer(text):
        rest = text[m.end():]
        stripped = rest.lstrip()
        if stripped:
            if not rest[0].isspace() or not stripped[0].isupper():
                continue
        if m.group() == "." and _is_guarded_abbreviation(text, m.start(), cfg):
            continue
        boundaries.append(m.end())

    spans = []
    pos = 0
    for b in boundaries:
        segment = text[pos:b]
        if segment.strip():
            spans.append((pos + len(segment) - len(segment.lstrip()), b))
        pos = b
    tail = text[pos:]
    if tail.strip():
        lead = len(tail) - len(tail.lstrip())
        spans.append((pos + lead, pos + len(tail.rstrip())))
    return spans


def _parse_document(doc: Document, cfg: TokenizerConfig) -> list[Sentence]:
    sentences = []
    for idx, (start, end) in enumerate(split_sentences(doc.text, cfg)):
        tokens = tokenize(doc.text[start:end], cfg)
        if tokens:
            sentences.append(Sentence(doc_id=doc.id, index=len(sentences), tokens=tuple(tokens)))
    return sentences


class CorpusIndex:
    """Immutable tokenized corpus with token frequencies and an inverted sentence index."""

    def __init__(self, documents: tuple[Document, ...], sentences: tuple[Sentence, ...],
                 report: LoadReport | None = None):
        self.documents = tuple(documents)
        self.sentences = tuple(sentences)
        self.report = report if report is not None else LoadReport(loaded=len(self.documents))
        self.freq: Counter[str] = Counter()
        self.postings: dict[str, set[tuple[str, int]]] = defaultdict(set)
        self._surfaces: dict[str, Counter[str]] = defaultdict(Counter)
        self._by_key: dict[tuple[str, int], Sentence] = {}
        for s in self.sentences:
            self._by_key[(s.doc_id, s.index)] = s
            for t in s.tokens:
                self.freq[t.norm] += 1
                self.postings[t.norm].add((s.doc_id, s.index))
                self._surfaces[t.norm][t.surface] += 1

    def frequency(self, word: str) -> int:
        return self.freq.get(normalize(word), 0)

    def display_form(self, norm: str) -> str:
        """Most frequent surface form of a norm (ties broken alphabetically)."""
        surfaces = self._surfaces.get(norm)
        if not surfaces:
            return norm
        return min(surfaces.items(), key=lambda kv: (-kv[1], kv[0]))[0]

    def sentence(self, doc_id: str, index: int) -> Sentence:
        return self._by_key[(doc_id, index)]

    def sentences_with(self, words) -> list[Sentence]:
        keys = set()
        for w in words:
            keys.update(self.postings.get(normalize(w), ()))
        return [self._by_key[k] for k in sorted(keys)]


def load_corpus(corpus_dir: str | Path, cfg: TokenizerConfig | None = None,
                jobs: int = 1) -> CorpusIndex:
    """Index every ``.txt`` file under a directory.

    Document order is lexicographic by relative path, so identical directory
    contents always build the identical index regardless of filesystem order
    or the ``jobs`` worker count. Unreadable files are skipped and recorded in
    the index's load report.
    """
    cfg = cfg or TokenizerConfig()
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise CorpusError(f"not a readable directory: {corpus_dir}")

    report = LoadReport()
    documents = []
    for path in sorted(corpus_dir.rglob("*.txt"), key=lambda p: p.relative_to(corpus_dir).as_posix()):
        rel = path.relative_to(corpus_dir).as_posix()
        try:
            text = path.read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError) as exc:
            log.warning("skipping %s: %s", path, exc)
            report.skipped.append((rel, str(exc)))
            continue
        if not text.strip():
            log.warning("skipping %s: empty file", path)
            report.skipped.append((rel, "empty file"))
            continue
        documents.append(Document(id=rel, source_path=str(path), text=text))

    if not documents:
        raise CorpusError(f"no documents in {corpus_dir}")
    report.loaded = len(documents)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_doc = list(pool.map(lambda d: _parse_document(d, cfg), documents))
    else:
        per_doc = [_parse_document(d, cfg) for d in documents]

    sentences = []
    for doc_sentences in per_doc:
        sentences.extend(doc_sentences)
    return CorpusIndex(tuple(documents), tuple(sentences), report)


def corpus_frequency(index: CorpusIndex, word: str) -> int:
    """Total occurrence count of a word in the corpus; 0 if absent."""
    return index.frequency(word)


def sentences_containing(index: CorpusIndex, words) -> list[Sentence]:
    """All sentences containing at least one of the words, ordered by (doc_id, index).

    Each sentence appears once even when it contains several of the words.
    """
    return index.sentences_with(words)


def save_index(index: CorpusIndex, path: str | Path) -> None:
    """Serialize the index to a versioned, self-describing cache file (JSON)."""
    payload = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "documents": [
            {"id": d.id, "source_path": d.source_path, "text": d.text}
            for d in index.documents
        ],
        "sentences": [
            {"doc_id": s.doc_id, "index": s.index, "tokens": [t.surface for t in s.tokens]}
            for s in index.sentences
        ],
    }
    atomic_write_text(path, json.dumps(payload, ensure_ascii=False, sort_keys=True,
                                       separators=(",", ":")))


def load_index(path: str | Path) -> CorpusIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != INDEX_FORMAT:
        raise CorpusError(f"not a corpus index cache: {path}")
    if payload.get("version") != INDEX_VERSION:
        raise CorpusError(f"unsupported index cache version {payload.get('version')!r}")
    documents = tuple(
        Document(id=d["id"], source_path=d["source_path"], text=d["text"])
        for d in payload["documents"]
    )
    sentences = tuple(
        Sentence(
            doc_id=s["doc_id"],
            index=s["index"],
            tokens=tuple(
                Token(surface=surf, norm=normalize(surf), sent_pos=i)
                for i, surf in enumerate(s["tokens"])
            ),
        )
        for s in payload["sentences"]
    )
    return CorpusIndex(documents, sentences)
