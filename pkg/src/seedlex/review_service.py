"""Local HTTP facade over rankings and the lexicon store: the human review loop.

Single reviewer, no authentication; everything is JSON under /api/v1. The
server also hosts the optional static web UI. Decision writes are serialized
through one lock and persisted to the store file on every change, so state
survives restarts.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import bootstrap as bs
from . import lexicon as lx
from .cli import build_manifest, compute_run_id, write_run_artifacts
from .corpus import CorpusIndex, sentences_containing
from .shallow_parser import PosLexicon

log = logging.getLogger(__name__)

API_PREFIX = "/api/v1"


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


@dataclass
class ReviewSession:
    id: str
    category: str
    order: list[str]
    random_order: bool
    rng_seed: int
    cursor: int = 0

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.order)


@dataclass
class RunState:
    run_id: str
    category: str
    status: str = "running"
    error: str | None = None
    out_dir: str | None = None


class ReviewApp:
    """Application state and API logic behind the HTTP handler."""

    def __init__(self, store: lx.LexiconStore, index: CorpusIndex, corpus_path: str,
                 corpus_hash: str, runs_dir: Path, pos_lexicon: PosLexicon,
                 rng_seed: int = 0):
        self.store = store
        self.index = index
        self.corpus_path = corpus_path
        self.corpus_hash = corpus_hash
        self.runs_dir = Path(runs_dir)
        self.pos_lexicon = pos_lexicon
        self.rng_seed = rng_seed
        self.lock = threading.RLock()
        self.rankings: dict[str, bs.RankedList] = {}
        self.run_ids: dict[str, str] = {}
        self.manifests: dict[str, dict] = {}
        self.sessions: dict[str, ReviewSession] = {}
        self.runs: dict[str, RunState] = {}
        self._session_counter = 0
        self._active_rerun: dict[str, str] = {}

    # --- artifact loading ---

    def load_runs(self) -> None:
        """Pick up every ranking export under the runs directory (recursively,
        so rerun output subdirectories are found too)."""
        for path in sorted(self.runs_dir.rglob("*.ranking.json")):
            self._adopt_ranking(path)

    def _adopt_ranking(self, path: Path) -> None:
        ranked, payload = bs.ranking_from_json(path)
        run_id = payload.get("run_id") or "unknown"
        self.rankings[ranked.category] = ranked
        self.run_ids[ranked.category] = run_id
        manifest_path = path.with_name(f"{ranked.category}.manifest.json")
        if manifest_path.is_file():
            with open(manifest_path, encoding="utf-8") as fh:
                self.manifests[ranked.category] = json.load(fh)
        self.store.register_ranking(ranked.category, run_id, ranked.norms())

    def _ranking(self, category: str) -> bs.RankedList:
        ranked = self.rankings.get(category)
        if ranked is None:
            raise ApiError(404, f"unknown category {category!r}")
        return ranked

    # --- api operations ---

    def list_categories(self) -> list[dict]:
        with self.lock:
            out = []
            for category in sorted(self.rankings):
                ranked = self.rankings[category]
                decided = {d.word for d in self.store.decisions if d.category == category}
                accepted = len(self.store.entries.get(category, {}))
                candidates = len(self._candidate_words(ranked))
                out.append({
                    "name": category,
                    "run_id": self.run_ids.get(category),
                    "candidates": candidates,
                    "accepted": accepted,
                    "pending": max(candidates - len(decided), 0),
                    "warning": ranked.warning,
                })
            return out

    def category_detail(self, category: str) -> dict:
        with self.lock:
            ranked = self._ranking(category)
            manifest = self.manifests.get(category, {})
            rows = [r for r in self.list_categories() if r["name"] == category]
            detail = rows[0] if rows else {"name": category}
            detail["promotions"] = [
                {"iteration": it, "words": list(ws)} for it, ws in ranked.promotions
            ]
            detail["config"] = manifest.get("config")
            detail["seed_words"] = (manifest.get("seeds") or {}).get("words", [])
            return detail

    def _candidate_words(self, ranked: bs.RankedList) -> list[str]:
        # original seed words are hidden from review by default: the reviewer
        # already knows they are category members
        return [s.word for s in ranked.words if not s.was_original_seed]

    def create_session(self, category: str, random_order: bool = False,
                       limit: int | None = None, rng_seed: int | None = None) -> dict:
        with self.lock:
            ranked = self._ranking(category)
            words = self._candidate_words(ranked)
            if limit is not None:
                if limit < 0:
                    raise ApiError(400, "limit must be >= 0")
                words = words[:limit]
            seed = self.rng_seed if rng_seed is None else rng_seed
            if random_order:
                hidden = bs.RankedList(category=category, words=tuple(
                    s for s in ranked.words if not s.was_original_seed))
                words = lx.shuffle_for_review(hidden, len(words), seed)
            self._session_counter += 1
            session = ReviewSession(id=f"s{self._session_counter}", category=category,
                                    order=words, random_order=random_order, rng_seed=seed)
            self.sessions[session.id] = session
            return {"session_id": session.id, "category": category,
                    "size": len(words), "random_order": random_order}

    def _session(self, session_id: str) -> ReviewSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        return session

    def next_candidates(self, session_id: str, n: int) -> dict:
        """The next n cards in session order; score and rank stay hidden in
        random-order (blind judging) sessions."""
        if n < 1:
            raise ApiError(400, "n must be >= 1")
        with self.lock:
            session = self._session(session_id)
            ranked = self._ranking(session.category)
            by_word = {s.word: (i + 1, s) for i, s in enumerate(ranked.words)}
            page = session.order[session.cursor:session.cursor + n]
            session.cursor += len(page)
            cards = []
            for word in page:
                rank_pos, scored = by_word[word]
                card = {
                    "word": word,
                    "display": scored.display,
                    "window_count": scored.window_count,
                    "corpus_freq": scored.corpus_freq,
                    "examples": self._examples(word),
                    "decision": self._decision_state(session.category, word),
                }
                if not session.random_order:
                    card["rank"] = rank_pos
                    card["score"] = bs.format_score(scored.score)
                cards.append(card)
            return {"words": cards, "cursor": session.cursor, "done": session.done}

    def _examples(self, word: str, cap: int = 5) -> list[str]:
        return [s.text() for s in sentences_containing(self.index, {word})[:cap]]

    def _decision_state(self, category: str, word: str) -> dict | None:
        for d in reversed(self.store.decisions):
            if d.category == category and d.word == word:
                return {"verdict": d.verdict, "rating": d.rating}
        return None

    def submit_decision(self, session_id: str, word: str, verdict: str,
                        rating: int | None, reviewer: str = "",
                        timestamp: str = "") -> dict:
        with self.lock:
            session = self._session(session_id)
            if word not in session.order:
                raise ApiError(404, f"{word!r} is not part of session {session_id}")
            try:
                decision = lx.ReviewDecision(word=word, category=session.category,
                                             verdict=verdict, rating=rating,
                                             reviewer=reviewer, timestamp=timestamp)
                self.store.record_decision(decision)
            except (ValueError,) as exc:
                raise ApiError(400, str(exc))
            except lx.UnknownCategoryError as exc:
                raise ApiError(404, str(exc.args[0]))
            except lx.UnknownWordError as exc:
                raise ApiError(404, str(exc.args[0]))
            if self.store.path is not None:
                self.store.save()
            return {"ok": True, "word": word, "verdict": verdict, "rating": rating}

    def rerun(self, category: str, use_accepted_as_seeds: bool = False,
              overrides: dict | None = None) -> dict:
        """Launch a fresh bootstrap run in the background, optionally folding the
        reviewer-accepted words into the seed list."""
        with self.lock:
            self._ranking(category)
            manifest = self.manifests.get(category)
            if manifest is None:
                raise ApiError(409, f"no manifest for {category!r}; rerun needs the "
                                    f"original run configuration")
            active = self._active_rerun.get(category)
            if active and self.runs[active].status == "running":
                raise ApiError(409, f"a run for {category!r} is already active")

            original = list((manifest.get("seeds") or {}).get("words", []))
            if not original:
                raise ApiError(409, f"manifest for {category!r} lists no seed words")
            seed_words = list(original)
            if use_accepted_as_seeds:
                accepted = sorted(self.store.entries.get(category, {}))
                if not accepted:
                    raise ApiError(409, "no accepted words to use as seeds")
                seed_words += [w for w in accepted if w not in set(seed_words)]

            config = self._config_from_manifest(manifest, overrides or {})
            seeds = bs.SeedList(category=category, original=tuple(seed_words))
            run_id = compute_run_id(self.corpus_hash, seeds.original, category, config)
            out_dir = self.runs_dir / run_id
            state = RunState(run_id=run_id, category=category, out_dir=str(out_dir))
            self.runs[run_id] = state
            self._active_rerun[category] = run_id

        worker = threading.Thread(target=self._run_bootstrap_job,
                                  args=(state, seeds, config), daemon=True)
        worker.start()
        return {"run_id": run_id, "status": state.status}

    def _config_from_manifest(self, manifest: dict, overrides: dict) -> bs.BootstrapConfig:
        snap = dict(manifest.get("config") or {})
        allowed = {"iterations", "promote_per_iteration", "min_corpus_freq",
                   "number_filter", "freq_nouns_only"}
        unknown = set(overrides) - allowed
        if unknown:
            raise ApiError(400, f"unknown config overrides: {sorted(unknown)}")
        snap.update(overrides)
        return bs.BootstrapConfig(
            iterations=int(snap.get("iterations", 8)),
            promote_per_iteration=int(snap.get("promote_per_iteration", 5)),
            min_corpus_freq=int(snap.get("min_corpus_freq", 5)),
            stoplist=frozenset(snap.get("stoplist") or bs.default_stoplist()),
            number_filter=snap.get("number_filter", "strict"),
            freq_nouns_only=bool(snap.get("freq_nouns_only", False)),
        )

    def _run_bootstrap_job(self, state: RunState, seeds: bs.SeedList,
                           config: bs.BootstrapConfig) -> None:
        try:
            ranked = bs.run_bootstrap(self.index, seeds, self.pos_lexicon, config)
            manifest = build_manifest(state.run_id, state.category, self.corpus_path,
                                      self.corpus_hash, None, None, seeds.original,
                                      config, ranked)
            paths = write_run_artifacts(Path(state.out_dir), ranked, state.run_id, manifest)
            with self.lock:
                self._adopt_ranking(paths["json"])
                if self.store.path is not None:
                    self.store.save()
                state.status = "done"
        except Exception as exc:  # surfaced through run status, not the server log only
            log.exception("rerun %s failed", state.run_id)
            with self.lock:
                state.status = "error"
                state.error = str(exc)

    def run_status(self, run_id: str) -> dict:
        with self.lock:
            state = self.runs.get(run_id)
            if state is None:
                raise ApiError(404, f"unknown run {run_id!r}")
            return {"run_id": state.run_id, "category": state.category,
                    "status": state.status, "error": state.error,
                    "out_dir": state.out_dir}

    def curve_data(self, category: str, step: int = 20) -> dict:
        """Live acquisition curves over the review stream: cumulative counts of
        decisions rated at each threshold, sampled every ``step`` reviewed words."""
        if step < 1:
            raise ApiError(400, "step must be >= 1")
        with self.lock:
            self._ranking(category)
            latest: dict[str, lx.ReviewDecision] = {}
            order: list[str] = []
            for d in self.store.decisions:
                if d.category != category:
                    continue
                if d.word not in latest:
                    order.append(d.word)
                latest[d.word] = d
            curves = {t: [] for t in (2, 3, 4, 5)}
            counts = {t: 0 for t in (2, 3, 4, 5)}
            unrated = 0
            for i, word in enumerate(order, start=1):
                rating = latest[word].rating
                if rating is None:
                    unrated += 1
                else:
                    for t in counts:
                        if rating >= t:
                            counts[t] += 1
                if i % step == 0:
                    for t in curves:
                        curves[t].append([i, counts[t]])
            return {
                "category": category,
                "step": step,
                "reviewed": len(order),
                "accepted": len(self.store.entries.get(category, {})),
                "unrated": unrated,
                "curves": {str(t): pts for t, pts in curves.items()},
            }

    def export(self, category: str, format: str = "tsv") -> str:
        with self.lock:
            try:
                return lx.export_lexicon(self.store, category, format=format)
            except lx.UnknownCategoryError as exc:
                raise ApiError(404, str(exc.args[0]))


_ROUTES = [
    ("GET", re.compile(r"^/categories$"), "route_categories"),
    ("GET", re.compile(r"^/categories/(?P<category>[^/]+)$"), "route_category_detail"),
    ("GET", re.compile(r"^/categories/(?P<category>[^/]+)/export$"), "route_export"),
    ("POST", re.compile(r"^/sessions$"), "route_create_session"),
    ("GET", re.compile(r"^/sessions/(?P<sid>[^/]+)/next$"), "route_next"),
    ("POST", re.compile(r"^/sessions/(?P<sid>[^/]+)/decisions$"), "route_decision"),
    ("POST", re.compile(r"^/rerun$"), "route_rerun"),
    ("GET", re.compile(r"^/runs/(?P<run_id>[^/]+)$"), "route_run_status"),
    ("GET", re.compile(r"^/curves$"), "route_curves"),
]

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".json": "application/json",
    ".map": "application/json",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class ReviewHandler(BaseHTTPRequestHandler):
    app: ReviewApp = None
    ui_dir: Path | None = None
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        log.debug("%s %s", self.address_string(), fmt % args)

    # --- plumbing ---

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_text(self, text: str, content_type: str, status: int = 200) -> None:
        self._send_bytes(text.encode("utf-8"), content_type, status)

    def _send_bytes(self, body: bytes, content_type: str, status: int = 200) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError:
            raise ApiError(400, "request body is not valid JSON")
        if not isinstance(payload, dict):
            raise ApiError(400, "request body must be a JSON object")
        return payload

    def _dispatch(self, method: str) -> None:
        parsed = urlparse(self.path)
        path = parsed.path
        if not path.startswith(API_PREFIX):
            if method == "GET":
                return self._serve_static(path)
            return self._send_json({"error": "not found"}, 404)
        sub = path[len(API_PREFIX):] or "/"
        self.query = {k: v[-1] for k, v in parse_qs(parsed.query).items()}
        try:
            for verb, pattern, name in _ROUTES:
                m = pattern.match(sub)
                if m and verb == method:
                    return getattr(self, name)(**m.groupdict())
            self._send_json({"error": f"no route for {method} {sub}"}, 404)
        except ApiError as exc:
            self._send_json({"error": exc.message}, exc.status)
        except Exception as exc:  # pragma: no cover - last-resort guard
            log.exception("internal error on %s %s", method, path)
            self._send_json({"error": f"internal error: {exc}"}, 500)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def _serve_static(self, path: str) -> None:
        if self.ui_dir is None:
            return self._send_json(
                {"error": "no UI bundle configured; the API lives under /api/v1"}, 404)
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            # single-page app fallback
            target = self.ui_dir / "index.html"
            if not target.is_file():
                return self._send_json({"error": "not found"}, 404)
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(target.read_bytes(), ctype)

    # --- routes ---

    def route_categories(self):
        self._send_json({"categories": self.app.list_categories()})

    def route_category_detail(self, category: str):
        self._send_json(self.app.category_detail(category))

    def route_export(self, category: str):
        fmt = self.query.get("format", "tsv")
        text = self.app.export(category, format=fmt)
        ctype = "application/json" if fmt == "structured" else "text/tab-separated-values"
        self._send_text(text, f"{ctype}; charset=utf-8")

    def route_create_session(self):
        body = self._read_body()
        category = body.get("category")
        if not category:
            raise ApiError(400, "category is required")
        limit = body.get("limit")
        self._send_json(self.app.create_session(
            category=category,
            random_order=bool(body.get("random_order", False)),
            limit=int(limit) if limit is not None else None,
            rng_seed=body.get("rng_seed"),
        ), 201)

    def route_next(self, sid: str):
        n = int(self.query.get("n", "20"))
        self._send_json(self.app.next_candidates(sid, n))

    def route_decision(self, sid: str):
        body = self._read_body()
        word = body.get("word")
        verdict = body.get("verdict")
        if not word or not verdict:
            raise ApiError(400, "word and verdict are required")
        rating = body.get("rating")
        self._send_json(self.app.submit_decision(
            sid, word=str(word), verdict=str(verdict),
            rating=int(rating) if rating is not None else None,
            reviewer=str(body.get("reviewer", "")),
            timestamp=str(body.get("timestamp", "")),
        ))

    def route_rerun(self):
        body = self._read_body()
        category = body.get("category")
        if not category:
            raise ApiError(400, "category is required")
        self._send_json(self.app.rerun(
            category=category,
            use_accepted_as_seeds=bool(body.get("use_accepted_as_seeds", False)),
            overrides=body.get("overrides"),
        ), 202)

    def route_run_status(self, run_id: str):
        self._send_json(self.app.run_status(run_id))

    def route_curves(self):
        category = self.query.get("category")
        if not category:
            raise ApiError(400, "category is required")
        step = int(self.query.get("step", "20"))
        self._send_json(self.app.curve_data(category, step=step))


def make_server(app: ReviewApp, host: str, port: int,
                ui_dir: Path | None = None) -> ThreadingHTTPServer:
    handler = type("BoundReviewHandler", (ReviewHandler,), {"app": app, "ui_dir": ui_dir})
    return ThreadingHTTPServer((host, port), handler)


def serve(app: ReviewApp, host: str, port: int, ui_dir: Path | None = None) -> None:
    server = make_server(app, host, port, ui_dir=ui_dir)
    bound = server.server_address[1]
    log.info("review service listening on http://%s:%d/", host, bound)
    print(f"review service listening on http://{host}:{bound}/", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
