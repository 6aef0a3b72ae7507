"""seedlex: build domain-specific semantic lexicons from seed words and a corpus."""

__version__ = "0.1.0"

from .bootstrap import (
    BootstrapConfig,
    ContextWindow,
    RankedList,
    ScoredWord,
    SeedList,
    extract_windows,
    filter_candidates,
    promote_seeds,
    rank,
    run_bootstrap,
    score_words,
)
from .corpus import (
    CorpusIndex,
    TokenizerConfig,
    corpus_frequency,
    load_corpus,
    sentences_containing,
    split_sentences,
    tokenize,
)
from .lexicon import (
    AcquisitionCurve,
    LexiconStore,
    Rating,
    ReviewDecision,
    acquisition_curve,
    export_lexicon,
    import_ratings,
    record_decision,
    shuffle_for_review,
)
from .shallow_parser import (
    Chunk,
    ChunkedSentence,
    PosLexicon,
    TaggedToken,
    chunk,
    default_pos_lexicon,
    head_noun,
    load_pos_lexicon,
    tag_tokens,
)
