"""Command-line entry point: index, bootstrap, evaluate, export, serve, plot.

Every command is deterministic given its inputs and flags (timestamps in
manifests excluded), all artifact writes are atomic, and exit codes are fixed:
0 ok or warning, 2 bad input, 3 rating coverage gaps, 4 unknown lookup,
5 bind failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import bootstrap as bs
from . import corpus as cp
from . import lexicon as lx
from .shallow_parser import default_pos_lexicon, load_pos_lexicon
from .util import atomic_write_text, hash_directory, sha256_file

log = logging.getLogger("seedlex")

MANIFEST_FORMAT = "seedlex-manifest"
MANIFEST_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COVERAGE = 3
EXIT_LOOKUP = 4
EXIT_BIND = 5


class InputError(Exception):
    pass


def compute_run_id(corpus_hash: str, seed_words, category: str, config: bs.BootstrapConfig) -> str:
    """Deterministic run identifier: a digest of everything that shapes the output."""
    blob = json.dumps({
        "corpus": corpus_hash,
        "seeds": list(seed_words),
        "category": category,
        "config": config.snapshot(),
    }, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def build_manifest(run_id: str, category: str, corpus_path: str, corpus_hash: str,
                   seeds_path: str | None, seeds_hash: str | None, seed_words,
                   config: bs.BootstrapConfig, ranked: bs.RankedList) -> dict:
    return {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "run_id": run_id,
        "category": category,
        "corpus": {"path": corpus_path, "sha256": corpus_hash},
        "seeds": {"path": seeds_path, "sha256": seeds_hash, "words": list(seed_words)},
        "config": config.snapshot(),
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "promotions": [{"iteration": it, "words": list(ws)} for it, ws in ranked.promotions],
        "warning": ranked.warning,
        "outputs": [f"{category}.ranking.tsv", f"{category}.ranking.json"],
    }


def write_run_artifacts(out_dir: str | Path, ranked: bs.RankedList, run_id: str,
                        manifest: dict) -> dict[str, Path]:
    """Write the ranking TSV, structured ranking, and manifest for one run."""
    out_dir = Path(out_dir)
    paths = {
        "tsv": out_dir / f"{ranked.category}.ranking.tsv",
        "json": out_dir / f"{ranked.category}.ranking.json",
        "manifest": out_dir / f"{ranked.category}.manifest.json",
    }
    atomic_write_text(paths["tsv"], f"# run: {run_id}\n" + bs.ranking_to_tsv(ranked))
    atomic_write_text(paths["json"], bs.ranking_to_json(ranked, run_id=run_id))
    atomic_write_text(paths["manifest"],
                      json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n")
    return paths


def _load_corpus_for(args) -> tuple[cp.CorpusIndex, str, str]:
    """Resolve --corpus / --index into (index, path shown in manifests, content hash)."""
    if getattr(args, "index", None):
        cache = Path(args.index)
        if not cache.is_file():
            raise InputError(f"index cache not found: {cache}")
        return cp.load_index(cache), str(cache), sha256_file(cache)
    if not getattr(args, "corpus", None):
        raise InputError("either --corpus or --index is required")
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise InputError(f"corpus directory not found: {corpus_dir}")
    cfg = _tokenizer_config(args)
    index = cp.load_corpus(corpus_dir, cfg, jobs=args.jobs)
    return index, str(corpus_dir), hash_directory(corpus_dir)


def _tokenizer_config(args) -> cp.TokenizerConfig:
    if getattr(args, "abbrev", None):
        return cp.TokenizerConfig.with_abbreviation_file(args.abbrev)
    return cp.TokenizerConfig()


def _pos_lexicon_for(args):
    if getattr(args, "pos_lexicon", None):
        return load_pos_lexicon(args.pos_lexicon)
    return default_pos_lexicon()


_CONFIG_KEYS = ("iterations", "promote", "min_freq", "number_filter", "freq_nouns_only")


def _bootstrap_config(args) -> bs.BootstrapConfig:
    """Merge built-in defaults, the optional config file, and explicit flags."""
    merged = {"iterations": 8, "promote": 5, "min_freq": 5,
              "number_filter": "strict", "freq_nouns_only": False}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file {args.config}: {exc}")
        unknown = set(file_cfg) - set(_CONFIG_KEYS)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in _CONFIG_KEYS:
        value = getattr(args, key)
        if value is not None:
            merged[key] = value

    stoplist = (frozenset(bs.load_word_list(args.stoplist))
                if args.stoplist else bs.default_stoplist())
    number_filter = {"paper_faithful": "paper"}.get(merged["number_filter"],
                                                    merged["number_filter"])
    return bs.BootstrapConfig(
        iterations=int(merged["iterations"]),
        promote_per_iteration=int(merged["promote"]),
        min_corpus_freq=int(merged["min_freq"]),
        stoplist=stoplist,
        number_filter=number_filter,
        freq_nouns_only=bool(merged["freq_nouns_only"]),
    )


# --- commands ---

def cmd_index(args) -> int:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise InputError(f"corpus directory not found: {corpus_dir}")
    index = cp.load_corpus(corpus_dir, _tokenizer_config(args), jobs=args.jobs)
    cp.save_index(index, args.out)
    report_path = Path(args.report) if args.report else Path(str(args.out) + ".report.txt")
    atomic_write_text(report_path, "\n".join(index.report.lines()) + "\n")
    print(f"indexed {index.report.loaded} documents, {len(index.sentences)} sentences "
          f"-> {args.out}")
    if index.report.skipped:
        print(f"skipped {len(index.report.skipped)} files (see {report_path})")
    return EXIT_OK


def _confirm_interactively(word: str) -> bool:
    try:
        answer = input(f"promote {word!r} into the seed list? [Y/n] ")
    except EOFError:
        return True
    return answer.strip().lower() not in ("n", "no")


def cmd_bootstrap(args) -> int:
    index, corpus_path, corpus_hash = _load_corpus_for(args)
    if args.seeds:
        seeds_path = Path(args.seeds)
        if not seeds_path.is_file():
            raise InputError(f"seed file not found: {seeds_path}")
    else:
        try:
            seeds_path = bs.default_seed_path(args.category)
        except KeyError as exc:
            raise InputError(str(exc.args[0]))
    try:
        seeds = bs.SeedList.from_file(args.category, seeds_path)
    except ValueError as exc:
        raise InputError(str(exc))

    config = _bootstrap_config(args)
    lex = _pos_lexicon_for(args)
    run_id = compute_run_id(corpus_hash, seeds.original, args.category, config)

    confirm = _confirm_interactively if args.confirm_promotions else None
    ranked = bs.run_bootstrap(index, seeds, lex, config, jobs=args.jobs, confirm=confirm)

    manifest = build_manifest(run_id, args.category, corpus_path, corpus_hash,
                              str(seeds_path), sha256_file(seeds_path), seeds.original,
                              config, ranked)
    paths = write_run_artifacts(args.out, ranked, run_id, manifest)
    print(f"run {run_id}: {len(ranked.words)} ranked words -> {paths['tsv']}")
    if ranked.warning:
        print(f"warning: {ranked.warning}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    ranking_path = Path(args.ranking)
    if not ranking_path.is_file():
        raise InputError(f"ranking file not found: {ranking_path}")
    ranked, payload = bs.ranking_from_json(ranking_path)
    run_id = payload.get("run_id") or "unknown"
    if not Path(args.ratings).is_file():
        raise InputError(f"ratings file not found: {args.ratings}")
    ratings = lx.import_ratings(args.ratings)

    thresholds = [int(t) for t in args.thresholds.split(",") if t.strip()]
    out_dir = Path(args.out)
    for t in thresholds:
        try:
            curve = lx.acquisition_curve(ranked, ratings, threshold=t, step=args.step,
                                         limit=args.top)
        except lx.CoverageError as exc:
            print(f"rating coverage gaps for threshold {t}: {', '.join(exc.missing)}",
                  file=sys.stderr)
            return EXIT_COVERAGE
        path = out_dir / f"{ranked.category}.curve.t{t}.tsv"
        header = f"# run: {run_id}\n# category: {ranked.category}\tthreshold: {t}\n"
        atomic_write_text(path, header + curve.to_tsv())
        print(f"threshold {t}: {curve.points[-1][1] if curve.points else 0} words "
              f"by {curve.points[-1][0] if curve.points else 0} reviewed -> {path}")
    return EXIT_OK


def cmd_export(args) -> int:
    store_path = Path(args.store)
    if not store_path.is_file():
        raise InputError(f"store file not found: {store_path}")
    store = lx.LexiconStore.load(store_path)
    try:
        text = lx.export_lexicon(store, args.category, format=args.format)
    except lx.UnknownCategoryError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_LOOKUP
    if args.out:
        atomic_write_text(args.out, text)
        print(f"exported {args.category} -> {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .review_service import ReviewApp, serve

    host, _, port_s = args.bind.rpartition(":")
    if not host or not port_s.isdigit():
        raise InputError(f"--bind must be HOST:PORT, got {args.bind!r}")

    store_path = Path(args.store)
    store = lx.LexiconStore.load(store_path) if store_path.is_file() else lx.LexiconStore(path=store_path)
    index, corpus_path, corpus_hash = _load_corpus_for(args)
    app = ReviewApp(store=store, index=index, corpus_path=corpus_path,
                    corpus_hash=corpus_hash, runs_dir=Path(args.runs),
                    pos_lexicon=_pos_lexicon_for(args), rng_seed=args.rng_seed)
    app.load_runs()
    try:
        serve(app, host, int(port_s), ui_dir=Path(args.ui) if args.ui else None)
    except OSError as exc:
        print(f"cannot bind {args.bind}: {exc}", file=sys.stderr)
        return EXIT_BIND
    return EXIT_OK


_SVG_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def read_curve_tsv(path: str | Path) -> tuple[str, list[tuple[int, int]]]:
    """Parse a curve TSV; the label comes from a threshold comment or the filename."""
    label = Path(path).stem
    points = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if raw.startswith("#"):
            if "threshold:" in raw:
                label = "threshold " + raw.rsplit("threshold:", 1)[1].strip()
            continue
        if not raw.strip() or raw.startswith("words_reviewed"):
            continue
        n_s, _, c_s = raw.partition("\t")
        points.append((int(n_s), int(c_s)))
    return label, points


def render_curves_svg(curves: list[tuple[str, list[tuple[int, int]]]],
                      title: str = "") -> str:
    """Render acquisition curves as a small standalone SVG line chart."""
    width, height = 640, 420
    ml, mr, mt, mb = 60, 20, 40, 50
    plot_w, plot_h = width - ml - mr, height - mt - mb
    x_max = max((n for _, pts in curves for n, _ in pts), default=1) or 1
    y_max = max((c for _, pts in curves for _, c in pts), default=1) or 1

    def sx(n: int) -> float:
        return ml + plot_w * n / x_max

    def sy(c: int) -> float:
        return mt + plot_h * (1 - c / y_max)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
                     f'font-size="16">{title}</text>')
    for i in range(6):
        y = mt + plot_h * i / 5
        value = round(y_max * (1 - i / 5))
        parts.append(f'<line x1="{ml}" y1="{y:.1f}" x2="{width - mr}" y2="{y:.1f}" '
                     f'stroke="#ddd"/>')
        parts.append(f'<text x="{ml - 8}" y="{y + 4:.1f}" text-anchor="end">{value}</text>')
    for i in range(6):
        x = ml + plot_w * i / 5
        value = round(x_max * i / 5)
        parts.append(f'<text x="{x:.1f}" y="{height - mb + 18}" '
                     f'text-anchor="middle">{value}</text>')
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>')
    parts.append(f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" '
                 f'y2="{height - mb}" stroke="black"/>')
    parts.append(f'<text x="{ml + plot_w / 2:.1f}" y="{height - 12}" '
                 f'text-anchor="middle">words reviewed</text>')

    for i, (label, pts) in enumerate(curves):
        color = _SVG_PALETTE[i % len(_SVG_PALETTE)]
        if pts:
            path = " ".join(f"{sx(n):.1f},{sy(c):.1f}" for n, c in pts)
            parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                         f'stroke-width="2"/>')
            for n, c in pts:
                parts.append(f'<circle cx="{sx(n):.1f}" cy="{sy(c):.1f}" r="3" '
                             f'fill="{color}"/>')
        ly = mt + 16 + 16 * i
        parts.append(f'<line x1="{ml + 10}" y1="{ly - 4}" x2="{ml + 34}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{ml + 40}" y="{ly}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    curves = []
    for path in args.curves:
        if not Path(path).is_file():
            raise InputError(f"curve file not found: {path}")
        curves.append(read_curve_tsv(path))
    atomic_write_text(args.out, render_curves_svg(curves, title=args.title))
    print(f"plotted {len(curves)} curves -> {args.out}")
    return EXIT_OK


# --- argument parsing ---

def _add_common_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", help="directory of .txt documents")
    p.add_argument("--index", help="serialized index cache file (alternative to --corpus)")
    p.add_argument("--abbrev", help="extra sentence-splitter abbreviations, one per line")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads; output is identical for any value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seedlex",
        description="Build domain semantic lexicons from seed words and a text corpus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="index a corpus directory into a cache file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="index cache path")
    p.add_argument("--report", help="load report path (default: <out>.report.txt)")
    p.add_argument("--abbrev")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("bootstrap", help="run the bootstrapping loop for one category")
    _add_common_corpus_flags(p)
    p.add_argument("--category", required=True)
    p.add_argument("--seeds", help="seed word file (default: the shipped list for the category)")
    p.add_argument("--out", required=True, help="output directory for run artifacts")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--promote", type=int, default=None,
                   help="words promoted into the seed list per iteration")
    p.add_argument("--min-freq", dest="min_freq", type=int, default=None,
                   help="exclude words with corpus frequency at or below this")
    p.add_argument("--stoplist", help="stopword file (default: the shipped list)")
    p.add_argument("--number-filter", dest="number_filter",
                   choices=["strict", "paper"], default=None)
    p.add_argument("--freq-nouns-only", dest="freq_nouns_only",
                   action="store_const", const=True, default=None,
                   help="count only noun-tagged occurrences in the frequency denominator")
    p.add_argument("--pos-lexicon", dest="pos_lexicon",
                   help="part-of-speech dictionary file (default: the shipped demo)")
    p.add_argument("--confirm-promotions", action="store_true",
                   help="ask before each promotion instead of promoting automatically")
    p.set_defaults(fn=cmd_bootstrap)

    p = sub.add_parser("evaluate", help="compute acquisition curves from judge ratings")
    p.add_argument("--ranking", required=True, help="structured ranking export (.json)")
    p.add_argument("--ratings", required=True, help="ratings TSV")
    p.add_argument("--thresholds", default="2,3,4,5")
    p.add_argument("--step", type=int, default=20)
    p.add_argument("--top", type=int, default=None,
                   help="evaluate this many top words (default: whole ranking)")
    p.add_argument("--out", required=True, help="output directory for curve files")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("export", help="export one category of the lexicon store")
    p.add_argument("--store", required=True)
    p.add_argument("--category", required=True)
    p.add_argument("--format", choices=["tsv", "structured"], default="tsv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("serve", help="serve the review interface over HTTP")
    _add_common_corpus_flags(p)
    p.add_argument("--store", required=True, help="lexicon store file (created if missing)")
    p.add_argument("--runs", required=True, help="directory of bootstrap run artifacts")
    p.add_argument("--bind", default="127.0.0.1:8737")
    p.add_argument("--ui", help="directory with the built web UI to serve at /")
    p.add_argument("--pos-lexicon", dest="pos_lexicon")
    p.add_argument("--rng-seed", dest="rng_seed", type=int, default=0,
                   help="seed for random-order review sessions")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("plot", help="render curve TSVs to an SVG chart")
    p.add_argument("--curves", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="")
    p.set_defaults(fn=cmd_plot)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, cp.CorpusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (bs.ScoreConsistencyError, lx.RatingsFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
