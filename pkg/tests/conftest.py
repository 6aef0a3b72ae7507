"""Shared fixtures."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from seedlex.corpus import CorpusIndex, Document, Sentence, load_corpus, tokenize
from seedlex.shallow_parser import default_pos_lexicon


@pytest.fixture(scope="session")
def pos_lex():
    return default_pos_lexicon()


@pytest.fixture
def make_corpus(tmp_path):
    """Factory: write {filename: text} into a fresh directory, return its path."""
    counter = {"n": 0}

    def _make(files: dict[str, str]) -> Path:
        counter["n"] += 1
        corpus_dir = tmp_path / f"corpus{counter['n']}"
        corpus_dir.mkdir()
        for name, text in files.items():
            (corpus_dir / name).write_text(text, encoding="utf-8")
        return corpus_dir

    return _make


def index_from_sentences(*texts: str) -> CorpusIndex:
    """An in-memory index over pre-split sentence strings (one doc)."""
    sentences = tuple(
        Sentence(doc_id="doc", index=i, tokens=tuple(tokenize(text)))
        for i, text in enumerate(texts)
    )
    doc = Document(id="doc", source_path="doc", text=" ".join(texts))
    return CorpusIndex((doc,), sentences)


@pytest.fixture
def m16_index() -> CorpusIndex:
    return index_from_sentences("I bought an AK-47 gun and an M-16 rifle.")
