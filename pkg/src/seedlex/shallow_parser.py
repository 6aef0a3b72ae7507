"""Dictionary-based POS tagging and flat NP/VP/PP chunking with head nouns.

The tagger is deliberately simple: a word gets the first tag listed for it in
the dictionary, unknown words default to noun, digit tokens are numbers and
punctuation is punctuation. No contextual disambiguation. The chunker builds
flat, non-recursive phrases; a noun phrase's head is its rightmost noun.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import Token, normalize

log = logging.getLogger(__name__)

TAGSET = frozenset({
    "noun", "verb", "adjective", "determiner", "pronoun", "preposition",
    "adverb", "conjunction", "number", "punctuation", "other",
})

NP = "NP"
VP = "VP"
PP = "PP"
OTHER = "OTHER"

_NP_TAGS = frozenset({"determiner", "adjective", "number", "noun"})
_VP_TAGS = frozenset({"verb", "adverb"})

# strict: anything made of digits with optional commas/periods/signs (2,000 / 3.5 / -7)
# paper:  plain digit runs only, so comma numbers slip through as ordinary words
_NUMBER_STRICT_RE = re.compile(r"[+-]?\d+(?:[,.]\d+)*")
_NUMBER_PAPER_RE = re.compile(r"\d+")

NUMBER_MODES = ("strict", "paper")


def is_number(norm: str, mode: str = "strict") -> bool:
    if mode == "strict":
        return _NUMBER_STRICT_RE.fullmatch(norm) is not None
    if mode == "paper":
        return _NUMBER_PAPER_RE.fullmatch(norm) is not None
    raise ValueError(f"unknown number mode: {mode!r}")


def _is_punctuation(surface: str) -> bool:
    return not any(ch.isalnum() for ch in surface)


@dataclass(frozen=True)
class PosLexicon:
    """Word dictionary: norm -> ordered candidate tags, most frequent first."""

    entries: dict[str, tuple[str, ...]]

    def first_tag(self, norm: str) -> str | None:
        tags = self.entries.get(norm)
        return tags[0] if tags else None


class LexiconFormatError(Exception):
    pass


def load_pos_lexicon(path: str | Path) -> PosLexicon:
    """Parse a dictionary file: ``word<TAB>tag[,tag...]`` per line, ``#`` comments.

    Duplicate words keep the first definition; later lines are ignored with a
    warning.
    """
    entries: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "\t" not in line:
            raise LexiconFormatError(f"{path}:{lineno}: expected 'word<TAB>tags', got {raw!r}")
        word, _, tag_field = line.partition("\t")
        word = normalize(word.strip())
        tags = tuple(t.strip() for t in tag_field.split(",") if t.strip())
        if not word or not tags:
            raise LexiconFormatError(f"{path}:{lineno}: empty word or tag list")
        for t in tags:
            if t not in TAGSET:
                raise LexiconFormatError(f"{path}:{lineno}: unknown tag {t!r}")
        if word in entries:
            log.warning("%s:%d: duplicate entry for %r ignored", path, lineno, word)
            continue
        entries[word] = tags
    return PosLexicon(entries=entries)


def default_pos_lexicon() -> PosLexicon:
    """The small dictionary of closed-class and common words shipped with the package."""
    with resources.as_file(resources.files("seedlex") / "data" / "pos_lexicon.txt") as p:
        return load_pos_lexicon(p)


@dataclass(frozen=True)
class TaggedToken:
    token: Token
    tag: str

    @property
    def norm(self) -> str:
        return self.token.norm

    @property
    def surface(self) -> str:
        return self.token.surface


def tag_tokens(tokens, lex: PosLexicon, number_mode: str = "strict") -> list[TaggedToken]:
    """Assign exactly one tag per token.

    Punctuation and number shapes are forced by rule; everything else takes
    its first dictionary tag, and unknown words default to noun. ``number_mode``
    selects which shapes count as numbers: under ``paper`` only plain digit
    runs do, so comma-grouped numbers like ``2,000`` fall through to the
    unknown-word rule and behave as nouns downstream.
    """
    tagged = []
    for tok in tokens:
        if _is_punctuation(tok.surface):
            tag = "punctuation"
        elif is_number(tok.norm, number_mode):
            tag = "number"
        else:
            tag = lex.first_tag(tok.norm) or "noun"
        tagged.append(TaggedToken(token=tok, tag=tag))
    return tagged


@dataclass(frozen=True)
class Chunk:
    """A flat phrase: a contiguous run of tagged tokens.

    ``start`` is the absolute position of the first token in the sentence;
    ``head`` is the span-relative index of the head noun (NP chunks only);
    ``object_np`` is the nested noun phrase of a PP.
    """

    kind: str
    tokens: tuple[TaggedToken, ...]
    start: int
    head: int | None = None
    object_np: "Chunk | None" = None

    @property
    def end(self) -> int:
        return self.start + len(self.tokens)

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class ChunkedSentence:
    chunks: tuple[Chunk, ...]
    doc_id: str = ""
    sentence_index: int = 0

    def noun_phrases(self):
        """All NPs in order, including the object NPs nested inside PPs."""
        for c in self.chunks:
            if c.kind == NP:
                yield c
            elif c.kind == PP and c.object_np is not None:
                yield c.object_np


def head_noun(c: Chunk) -> TaggedToken:
    """The head of a noun phrase: its rightmost noun-tagged token."""
    if c.kind != NP:
        raise ValueError(f"head_noun requires an NP chunk, got {c.kind}")
    return c.tokens[c.head]


def _np_run(tagged, start: int) -> tuple[int, int | None]:
    """Extend a maximal NP-able run from ``start``; return (end, relative head index)."""
    end = start
    head = None
    while end < len(tagged) and tagged[end].tag in _NP_TAGS:
        if tagged[end].tag == "noun":
            head = end - start
        end += 1
    return end, head


def chunk(tagged, doc_id: str = "", sentence_index: int = 0) -> ChunkedSentence:
    """Segment a tagged sentence into flat NP / VP / PP / OTHER chunks.

    NPs are maximal runs of determiner/adjective/number/noun containing at
    least one noun; VPs are maximal runs of verb/adverb; a preposition
    immediately followed by an NP forms a PP that keeps that NP as its object.
    Remaining tokens collect into OTHER chunks. Every token lands in exactly
    one top-level chunk.
    """
    tagged = list(tagged)
    chunks: list[Chunk] = []
    other_start: int | None = None

    def flush_other(upto: int) -> None:
        nonlocal other_start
        if other_start is not None:
            chunks.append(Chunk(kind=OTHER, tokens=tuple(tagged[other_start:upto]), start=other_start))
            other_start = None

    i = 0
    n = len(tagged)
    while i < n:
        tag = tagged[i].tag
        if tag == "preposition":
            np_end, head = _np_run(tagged, i + 1)
            if head is not None:
                flush_other(i)
                obj = Chunk(kind=NP, tokens=tuple(tagged[i + 1:np_end]), start=i + 1, head=head)
                chunks.append(Chunk(kind=PP, tokens=tuple(tagged[i:np_end]), start=i, object_np=obj))
                i = np_end
                continue
        elif tag in _NP_TAGS:
            np_end, head = _np_run(tagged, i)
            if head is not None:
                flush_other(i)
                chunks.append(Chunk(kind=NP, tokens=tuple(tagged[i:np_end]), start=i, head=head))
                i = np_end
                continue
            # a run of determiners/adjectives/numbers with no noun is not a phrase
            if other_start is None:
                other_start = i
            i = np_end
            continue
        elif tag in _VP_TAGS:
            flush_other(i)
            vp_end = i
            while vp_end < n and tagged[vp_end].tag in _VP_TAGS:
                vp_end += 1
            chunks.append(Chunk(kind=VP, tokens=tuple(tagged[i:vp_end]), start=i))
            i = vp_end
            continue
        if other_start is None:
            other_start = i
        i += 1
    flush_other(n)
    return ChunkedSentence(chunks=tuple(chunks), doc_id=doc_id, sentence_index=sentence_index)
