"""Ratings import, review decisions, store persistence, curves, and shuffling."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedlex.bootstrap import RankedList, ScoredWord
from seedlex.lexicon import (
    CoverageError,
    LexiconStore,
    Rating,
    RatingsFormatError,
    ReviewDecision,
    UnknownCategoryError,
    UnknownWordError,
    acquisition_curve,
    best_ratings,
    export_lexicon,
    import_ratings,
    record_decision,
    shuffle_for_review,
)


def ranking_of(category, *words):
    scored = tuple(
        ScoredWord(word=w, display=w, window_count=10 - i % 5, corpus_freq=10,
                   score=Fraction(10 - i % 5, 10))
        for i, w in enumerate(words)
    )
    return RankedList(category=category, words=scored)


# --- Rating ---

def test_rating_validation():
    with pytest.raises(ValueError, match="outside 0-5"):
        Rating(word="gun", category="weapon", judge_id="j1", value=7)
    with pytest.raises(ValueError, match="only allowed on zero"):
        Rating(word="gun", category="weapon", judge_id="j1", value=3, override=5)
    with pytest.raises(ValueError, match="outside 1-5"):
        Rating(word="gun", category="weapon", judge_id="j1", value=0, override=0)


def test_rating_effective_value():
    assert Rating(word="w", category="c", judge_id="j", value=4).effective() == 4
    assert Rating(word="w", category="c", judge_id="j", value=0).effective() is None
    assert Rating(word="w", category="c", judge_id="j", value=0, override=5).effective() == 5


def test_zero_rating_needs_override_flag():
    r = Rating(word="m-16", category="weapon", judge_id="j1", value=0)
    assert r.needs_override
    assert not Rating(word="m-16", category="weapon", judge_id="j1",
                      value=0, override=5).needs_override


# --- import_ratings ---

def test_import_ratings_basic(tmp_path):
    p = tmp_path / "ratings.tsv"
    p.write_text(
        "# judged blind\n"
        "gun\tweapon\tjudge1\t5\n"
        "M-16\tweapon\tjudge1\t0\n"
        "m-16\tweapon\tjudge2\t0\t5\n"
    )
    rows = import_ratings(p)
    assert len(rows) == 3
    flagged = [r for r in rows if r.needs_override]
    assert [r.judge_id for r in flagged] == ["judge1"]
    assert rows[0].word == "gun"
    assert rows[1].word == "m-16"  # normalized


def test_import_ratings_value_out_of_range(tmp_path):
    p = tmp_path / "ratings.tsv"
    p.write_text("gun\tweapon\tj1\t7\n")
    with pytest.raises(RatingsFormatError, match=":1:"):
        import_ratings(p)


def test_import_ratings_malformed_row_has_line_number(tmp_path):
    p = tmp_path / "ratings.tsv"
    p.write_text("gun\tweapon\tj1\t5\nbroken row\n")
    with pytest.raises(RatingsFormatError, match=":2:"):
        import_ratings(p)


def test_import_ratings_duplicate_last_wins(tmp_path, caplog):
    p = tmp_path / "ratings.tsv"
    p.write_text("gun\tweapon\tj1\t2\ngun\tweapon\tj1\t5\n")
    rows = import_ratings(p)
    assert len(rows) == 1
    assert rows[0].value == 5
    assert any("duplicate" in r.message for r in caplog.records)


def test_two_judges_two_hundred_words_gives_400_rows(tmp_path):
    lines = [f"w{i}\tcat\tjudge{j}\t{(i + j) % 5 + 1}"
             for j in (1, 2) for i in range(200)]
    p = tmp_path / "ratings.tsv"
    p.write_text("\n".join(lines) + "\n")
    assert len(import_ratings(p)) == 400


# --- acquisition_curve ---

def ratings_for(category, values: dict[str, list[int]]):
    rows = []
    for word, vals in values.items():
        for j, v in enumerate(vals, start=1):
            rows.append(Rating(word=word, category=category, judge_id=f"j{j}", value=v))
    return rows


def test_curve_counts_best_judge_at_threshold():
    ranked = ranking_of("weapon", *(f"w{i}" for i in range(40)))
    values = {f"w{i}": [1, 1] for i in range(40)}
    for i in (0, 5, 19):
        values[f"w{i}"] = [5, 2]
    for i in (25, 33):
        values[f"w{i}"] = [3, 5]
    curve = acquisition_curve(ranked, ratings_for("weapon", values), threshold=5, step=20)
    assert curve.points == ((20, 3), (40, 5))


def test_curve_saturates_at_low_threshold():
    ranked = ranking_of("weapon", *(f"w{i}" for i in range(200)))
    ratings = ratings_for("weapon", {f"w{i}": [2, 1] for i in range(200)})
    curve = acquisition_curve(ranked, ratings, threshold=2, step=20)
    assert curve.points[-1] == (200, 200)
    assert [n for n, _ in curve.points] == list(range(20, 201, 20))


def test_curve_zero_without_override_excluded():
    ranked = ranking_of("weapon", "a", "b")
    ratings = ratings_for("weapon", {"a": [0, 0], "b": [0, 0]})
    ratings.append(Rating(word="a", category="weapon", judge_id="j3", value=0, override=5))
    curve = acquisition_curve(ranked, ratings, threshold=5, step=2)
    assert curve.points == ((2, 1),)


def test_curve_missing_rating_raises_with_gaps():
    ranked = ranking_of("weapon", "a", "b", "c", "d")
    ratings = ratings_for("weapon", {"a": [5], "c": [4]})
    with pytest.raises(CoverageError) as err:
        acquisition_curve(ranked, ratings, threshold=3, step=2)
    assert err.value.missing == ["b", "d"]


def test_curve_respects_limit():
    ranked = ranking_of("weapon", *(f"w{i}" for i in range(100)))
    ratings = ratings_for("weapon", {f"w{i}": [5] for i in range(40)})
    curve = acquisition_curve(ranked, ratings, threshold=5, step=20, limit=40)
    assert curve.points == ((20, 20), (40, 40))


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)),
                min_size=40, max_size=40))
@settings(max_examples=60)
def test_curve_matches_brute_force_and_dominance(pairs):
    words = [f"w{i}" for i in range(40)]
    ranked = ranking_of("c", *words)
    ratings = []
    for w, (v1, v2) in zip(words, pairs):
        ratings.append(Rating(word=w, category="c", judge_id="j1", value=v1))
        ratings.append(Rating(word=w, category="c", judge_id="j2", value=v2))

    curves = {}
    for t in (2, 3, 4, 5):
        curve = acquisition_curve(ranked, ratings, threshold=t, step=10)
        curves[t] = curve.points
        # brute force recount, written independently of the implementation
        for n, count in curve.points:
            expected = 0
            for w, (v1, v2) in list(zip(words, pairs))[:n]:
                effective = [v for v in (v1, v2) if v != 0]
                if effective and max(effective) >= t:
                    expected += 1
            assert count == expected
        counts = [c for _, c in curve.points]
        assert counts == sorted(counts)  # monotone
    for t in (2, 3, 4):
        for (n1, c1), (n2, c2) in zip(curves[t], curves[t + 1]):
            assert (n1, c1 >= c2) == (n2, True)  # lower threshold dominates


def test_best_ratings_takes_max_across_judges():
    ratings = ratings_for("c", {"w": [2, 4]})
    assert best_ratings(ratings) == {("c", "w"): 4}


# --- shuffle_for_review ---

def test_shuffle_reproducible_and_permutation():
    ranked = ranking_of("c", *(f"w{i}" for i in range(200)))
    a = shuffle_for_review(ranked, 200, rng_seed=99)
    b = shuffle_for_review(ranked, 200, rng_seed=99)
    assert a == b
    assert sorted(a) == sorted(w.word for w in ranked.words)
    assert a != [w.word for w in ranked.words]  # vanishingly unlikely to be identity


def test_shuffle_single_word():
    ranked = ranking_of("c", "only")
    assert shuffle_for_review(ranked, 1, rng_seed=1) == ["only"]


def test_shuffle_clamps_oversized_n(caplog):
    ranked = ranking_of("c", "a", "b")
    out = shuffle_for_review(ranked, 10, rng_seed=1)
    assert sorted(out) == ["a", "b"]
    assert any("clamping" in r.message for r in caplog.records)


@given(st.integers(0, 30), st.integers(0, 2**32 - 1))
@settings(max_examples=40)
def test_shuffle_permutation_property(n, seed):
    ranked = ranking_of("c", *(f"w{i}" for i in range(30)))
    out = shuffle_for_review(ranked, n, rng_seed=seed)
    assert sorted(out) == sorted(f"w{i}" for i in range(n))


# --- LexiconStore / decisions ---

@pytest.fixture
def store(tmp_path):
    s = LexiconStore(path=tmp_path / "store.json")
    s.register_ranking("weapon", "run0001", ["gun", "rifle", "m-16", "grenade"])
    return s


def d(word, verdict, rating=None, category="weapon"):
    return ReviewDecision(word=word, category=category, verdict=verdict, rating=rating,
                          timestamp="2026-08-08T00:00:00Z", reviewer="r1")


def test_accept_inserts_entry(store):
    record_decision(store, d("gun", "accept", 5))
    assert store.entries["weapon"]["gun"].rating == 5
    assert store.entries["weapon"]["gun"].source == "bootstrap-accepted"
    assert store.entries["weapon"]["gun"].provenance == "run0001"


def test_reject_then_accept_keeps_both_in_log(store):
    record_decision(store, d("gun", "reject"))
    record_decision(store, d("gun", "accept", 4))
    assert store.entries["weapon"]["gun"].rating == 4
    assert [x.verdict for x in store.decisions] == ["reject", "accept"]


def test_accept_then_reject_removes_entry(store):
    record_decision(store, d("gun", "accept", 4))
    record_decision(store, d("gun", "reject"))
    assert "gun" not in store.entries.get("weapon", {})


def test_accept_below_threshold_rejected(store):
    with pytest.raises(ValueError, match="below acceptance threshold"):
        record_decision(store, d("gun", "accept", 2))


def test_unknown_category_and_word_errors(store):
    with pytest.raises(UnknownCategoryError):
        record_decision(store, d("gun", "accept", 5, category="nope"))
    with pytest.raises(UnknownWordError, match="run0001"):
        record_decision(store, d("howitzer", "accept", 5))


def test_identical_decision_is_idempotent(store):
    record_decision(store, d("gun", "accept", 5))
    record_decision(store, d("gun", "accept", 5))
    assert len(store.decisions) == 1


def test_defer_only_logs(store):
    record_decision(store, d("rifle", "defer"))
    assert "rifle" not in store.entries.get("weapon", {})
    assert store.decisions[-1].verdict == "defer"


def test_store_round_trip(store, tmp_path):
    record_decision(store, d("gun", "accept", 5))
    store.add_ratings([Rating(word="gun", category="weapon", judge_id="j1", value=5)])
    store.save()
    loaded = LexiconStore.load(store.path)
    assert loaded.entries["weapon"]["gun"].rating == 5
    assert loaded.rankings["weapon"]["run_id"] == "run0001"
    assert len(loaded.decisions) == 1
    assert len(loaded.ratings) == 1


def test_store_save_is_atomic_and_diffable(store):
    record_decision(store, d("gun", "accept", 5))
    store.save()
    text = store.path.read_text()
    assert text.startswith("{")
    assert "\n" in text  # indented, human-diffable
    leftovers = list(store.path.parent.glob("*.tmp"))
    assert leftovers == []


# --- export ---

def test_export_round_trip_contains_each_accept_once(store):
    record_decision(store, d("gun", "accept", 5))
    record_decision(store, d("rifle", "accept", 4))
    record_decision(store, d("rifle", "accept", 4))  # replay
    out = export_lexicon(store, "weapon")
    lines = out.strip().split("\n")
    assert lines[0] == "word\tcategory\trating\tsource"
    assert lines[1:] == ["gun\tweapon\t5\tbootstrap-accepted",
                         "rifle\tweapon\t4\tbootstrap-accepted"]


def test_export_empty_category_header_only(store):
    assert export_lexicon(store, "weapon") == "word\tcategory\trating\tsource\n"


def test_export_unknown_category(store):
    with pytest.raises(UnknownCategoryError):
        export_lexicon(store, "energy")


def test_export_structured_carries_provenance(store):
    import json

    record_decision(store, d("gun", "accept", 5))
    payload = json.loads(export_lexicon(store, "weapon", format="structured"))
    assert payload["entries"][0]["provenance"] == "run0001"


def test_export_deterministic(store):
    record_decision(store, d("rifle", "accept", 3))
    record_decision(store, d("gun", "accept", 5))
    assert export_lexicon(store, "weapon") == export_lexicon(store, "weapon")
    # ordering is by word regardless of decision order
    lines = export_lexicon(store, "weapon").strip().split("\n")[1:]
    assert lines == sorted(lines)


def test_paper_energy_block_export(tmp_path):
    """Accepting the ten words judged as core members for the energy category
    yields a ten-row export."""
    energy_fives = ["oil", "electric", "gas", "fuel", "power", "gasoline",
                    "electricity", "petroleum", "energy", "cel"]
    store = LexiconStore(path=tmp_path / "s.json")
    store.register_ranking("energy", "runE", energy_fives)
    for w in energy_fives:
        record_decision(store, ReviewDecision(word=w, category="energy",
                                              verdict="accept", rating=5))
    out = export_lexicon(store, "energy")
    rows = out.strip().split("\n")[1:]
    assert len(rows) == 10
    assert {r.split("\t")[0] for r in rows} == set(energy_fives)
