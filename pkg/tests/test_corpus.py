"""Corpus loading, sentence splitting, tokenization, and index invariants."""

from __future__ import annotations

import re
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedlex.corpus import (
    CorpusError,
    TokenizerConfig,
    corpus_frequency,
    load_corpus,
    load_index,
    save_index,
    sentences_containing,
    split_sentences,
    tokenize,
)


# --- tokenize ---

@pytest.mark.parametrize("text,expected", [
    ("an AK-47 gun", ["an", "AK-47", "gun"]),
    ("Boeing_727 landed", ["Boeing_727", "landed"]),
    ("2,000 rounds", ["2,000", "rounds"]),
    ("a U.S.-made carbine", ["a", "U.S.-made", "carbine"]),
    ("the 9-mm pistol, loaded.", ["the", "9-mm", "pistol", ",", "loaded", "."]),
    ("costs 3.5 million", ["costs", "3.5", "million"]),
    ("car_bomb (destroyed)", ["car_bomb", "(", "destroyed", ")"]),
    ("200,000 barrels", ["200,000", "barrels"]),
], ids=["hyphen", "underscore", "comma-number", "dotted-acronym",
        "punct-split", "decimal", "parens", "big-number"])
def test_token_shapes(text, expected):
    assert [t.surface for t in tokenize(text)] == expected


def test_token_norms_casefold_and_positions():
    tokens = tokenize("The GUN The gun")
    assert [t.norm for t in tokens] == ["the", "gun", "the", "gun"]
    assert [t.sent_pos for t in tokens] == [0, 1, 2, 3]


# --- split_sentences ---

def test_split_two_plain_sentences():
    text = "I bought a gun. It was loaded."
    spans = split_sentences(text)
    assert [text[a:b] for a, b in spans] == ["I bought a gun.", "It was loaded."]


def test_abbreviation_guard_keeps_one_sentence():
    assert len(split_sentences("Mr. Cruz fled.")) == 1
    assert len(split_sentences("Gen. Diaz spoke. The army left.")) == 2


def test_single_initial_guard():
    assert len(split_sentences("J. Cruz fled to the U.S. Army base.")) == 1


def test_question_and_exclamation_boundaries():
    text = "Was it loaded? Yes! He fled."
    assert len(split_sentences(text)) == 3


def test_lowercase_after_period_does_not_split():
    assert len(split_sentences("the attack on u.s. soil continued")) == 1


def test_empty_text():
    assert split_sentences("") == []
    assert split_sentences("   \n  ") == []


def test_spans_cover_all_non_whitespace():
    text = "One shot.  Two shots!   Done"
    spans = split_sentences(text)
    covered = set()
    for a, b in spans:
        covered.update(range(a, b))
    for i, ch in enumerate(text):
        if not ch.isspace():
            assert i in covered


_sentence_texts = st.lists(
    st.sampled_from(["He fled.", "The gun fired!", "Was it loaded?",
                     "Mr. Cruz spoke.", "Dr. Gil saw 2,000 men.", "Oil costs 3.5 now."]),
    min_size=0, max_size=8,
)


@given(_sentence_texts)
@settings(max_examples=60)
def test_split_spans_ordered_and_disjoint(parts):
    text = " ".join(parts)
    spans = split_sentences(text)
    for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
        assert b1 <= a2
    for a, b in spans:
        assert a < b
        assert not text[a].isspace()


@given(_sentence_texts)
@settings(max_examples=60)
def test_split_never_cuts_inside_a_token(parts):
    text = " ".join(parts)
    boundaries = {b for _, b in split_sentences(text)}
    for m in re.finditer(r"\S+", text):
        for cut in boundaries:
            inside = m.start() < cut < m.end()
            if inside:
                # a boundary may only fall right after a token's final
                # punctuation mark, never inside the word part
                tail = text[cut - 1]
                assert tail in ".!?"


# --- load_corpus ---

def test_load_single_file(make_corpus):
    d = make_corpus({"a.txt": "Dogs bark. Cats meow."})
    index = load_corpus(d)
    assert len(index.sentences) == 2
    assert index.frequency("dogs") == 1


def test_load_empty_directory(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(CorpusError, match="no documents"):
        load_corpus(empty)


def test_load_missing_directory(tmp_path):
    with pytest.raises(CorpusError, match="not a readable"):
        load_corpus(tmp_path / "absent")


def test_frequency_sums_across_documents(make_corpus):
    d = make_corpus({
        "a.txt": "The gun fired. Another gun appeared.",
        "b.txt": "He sold the gun and a rifle.",
    })
    index = load_corpus(d)
    # independent recount: raw regex scan over the same files
    blob = (d / "a.txt").read_text() + " " + (d / "b.txt").read_text()
    naive = Counter(w.casefold() for w in re.findall(r"[\w,.-]*\w", blob))
    assert index.frequency("gun") == naive["gun"] == 3
    assert index.frequency("rifle") == naive["rifle"] == 1


def test_undecodable_file_skipped_with_report(make_corpus):
    d = make_corpus({"good.txt": "A gun."})
    (d / "bad.txt").write_bytes(b"\xff\xfe\x00 garbage \xff")
    index = load_corpus(d)
    assert index.report.loaded == 1
    assert len(index.report.skipped) == 1
    assert index.report.skipped[0][0] == "bad.txt"
    assert any("bad.txt" in line for line in index.report.lines())


def test_document_order_is_lexicographic(make_corpus):
    d = make_corpus({"b.txt": "Beta gun.", "a.txt": "Alpha gun.", "c.txt": "Gamma gun."})
    index = load_corpus(d)
    assert [doc.id for doc in index.documents] == ["a.txt", "b.txt", "c.txt"]


def test_parallel_load_identical(make_corpus):
    files = {f"doc{i}.txt": f"The gun number {i} fired. A rifle number {i} appeared."
             for i in range(8)}
    d = make_corpus(files)
    seq = load_corpus(d, jobs=1)
    par = load_corpus(d, jobs=4)
    assert seq.sentences == par.sentences
    assert seq.freq == par.freq


def test_freq_invariant_matches_per_sentence_counts(make_corpus):
    d = make_corpus({"a.txt": "Gun gun gun. The gun, a gun."})
    index = load_corpus(d)
    per_sentence = sum(
        sum(1 for t in s.tokens if t.norm == "gun") for s in index.sentences
    )
    assert index.frequency("gun") == per_sentence == 5


# --- corpus_frequency ---

def test_frequency_counts_repeats_in_one_sentence(make_corpus):
    index = load_corpus(make_corpus({"a.txt": "gun gun rifle."}))
    assert corpus_frequency(index, "gun") == 2
    assert corpus_frequency(index, "absent") == 0
    assert corpus_frequency(index, "GUN") == 2  # case-insensitive


# --- sentences_containing ---

def test_sentences_containing_basics(make_corpus):
    d = make_corpus({"a.txt": "No weapons here. The gun fired. Nothing else."})
    index = load_corpus(d)
    hits = sentences_containing(index, {"gun"})
    assert [s.index for s in hits] == [1]


def test_sentence_with_two_seeds_appears_once(make_corpus):
    d = make_corpus({"a.txt": "The gun and the rifle fired."})
    index = load_corpus(d)
    assert len(sentences_containing(index, {"gun", "rifle"})) == 1


def test_sentences_containing_matches_linear_scan(make_corpus):
    import random

    rng = random.Random(7)
    vocab = ["gun", "rifle", "bomb", "truck", "oil", "bank", "farm", "road"]
    files = {}
    for i in range(3):
        lines = []
        for _ in range(40):
            lines.append(" ".join(rng.choices(vocab, k=rng.randint(2, 6))).capitalize() + " .")
        files[f"d{i}.txt"] = "\n".join(lines)
    index = load_corpus(make_corpus(files))
    words = {"gun", "oil"}
    got = [(s.doc_id, s.index) for s in sentences_containing(index, words)]
    expected = sorted(
        (s.doc_id, s.index) for s in index.sentences
        if any(t.norm in words for t in s.tokens)
    )
    assert got == expected


@given(st.sets(st.sampled_from(["gun", "rifle", "bomb", "truck", "oil"])),
       st.sets(st.sampled_from(["gun", "rifle", "bomb", "truck", "oil"])))
@settings(max_examples=40)
def test_sentences_containing_union_property(s1, s2):
    from conftest import index_from_sentences

    index = index_from_sentences(
        "The gun fired.", "A rifle and a bomb.", "The truck carried oil.",
        "Nothing here.", "Oil and gun.",
    )
    union = {(s.doc_id, s.index) for s in sentences_containing(index, s1 | s2)}
    parts = {(s.doc_id, s.index) for s in sentences_containing(index, s1)} | {
        (s.doc_id, s.index) for s in sentences_containing(index, s2)}
    assert union == parts


# --- index cache ---

def test_index_cache_round_trip(make_corpus, tmp_path):
    d = make_corpus({"a.txt": "The gun fired. He fled to the U.S. border."})
    index = load_corpus(d)
    cache = tmp_path / "cache.json"
    save_index(index, cache)
    loaded = load_index(cache)
    assert loaded.sentences == index.sentences
    assert loaded.freq == index.freq
    assert loaded.postings == index.postings


def test_index_cache_deterministic_bytes(make_corpus, tmp_path):
    d = make_corpus({"a.txt": "The gun fired twice."})
    c1, c2 = tmp_path / "c1.json", tmp_path / "c2.json"
    save_index(load_corpus(d), c1)
    save_index(load_corpus(d), c2)
    assert c1.read_bytes() == c2.read_bytes()


def test_index_cache_rejects_wrong_format(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "something-else", "version": 1}')
    with pytest.raises(CorpusError, match="not a corpus index"):
        load_index(bad)


def test_abbreviation_file_extends_guard(tmp_path):
    abbrev = tmp_path / "abbrev.txt"
    abbrev.write_text("Cmdte.\n")
    cfg = TokenizerConfig.with_abbreviation_file(abbrev)
    assert len(split_sentences("Cmdte. Ortega spoke.", cfg)) == 1
    assert len(split_sentences("Cmdte. Ortega spoke.")) == 2
