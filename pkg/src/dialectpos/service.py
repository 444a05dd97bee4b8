"""Human-in-the-loop annotation service.

Serves tweets with optional model pre-annotations, records annotator
tag decisions and MAE-equivalent suggestions, reports live agreement,
and exports corpora.  State lives in memory behind an append-only
journal (one dated tab-separated record per mutation); replaying a
journal reconstructs the identical session.  Annotation is blind: no
endpoint reveals another annotator's labels for an item.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from dialectpos import modelio
from dialectpos.agreement import AgreementTable, krippendorff_alpha
from dialectpos.corpus import Corpus, DEFAULT_TAGSET, TaggedSentence, Tagset


@dataclass
class AnnotationSession:
    session_id: str
    sentences: tuple[tuple[str, ...], ...]
    source_ids: tuple[str, ...]
    annotators: tuple[str, ...]
    tagset: Tagset
    pre_annotations: tuple[tuple[str, ...], ...] | None
    # (annotator, item) -> labels; last write wins, history in journal.
    labels: dict[tuple[str, int], tuple[str, ...]] = field(default_factory=dict)
    mae_equivalents: dict[tuple[str, int], tuple[str, ...]] = field(default_factory=dict)
    served: set[tuple[str, int]] = field(default_factory=set)

    def item_status(self, annotator: str, item: int) -> str:
        if (annotator, item) in self.labels:
            return "complete"
        if (annotator, item) in self.served:
            return "in_progress"
        return "unseen"

    def next_item_for(self, annotator: str) -> int | None:
        for item in range(len(self.sentences)):
            if (annotator, item) not in self.labels:
                return item
        return None

    def agreement_table(self) -> AgreementTable | None:
        """Token positions across tweets as items; None when fewer than
        two annotators have submitted anything."""
        if len({a for a, _ in self.labels}) < 2:
            return None
        items = [
            f"{item}:{pos}"
            for item, tokens in enumerate(self.sentences)
            for pos in range(len(tokens))
        ]
        labels = {}
        for (annotator, item), tags in self.labels.items():
            for pos, tag in enumerate(tags):
                labels[(annotator, f"{item}:{pos}")] = tag
        return AgreementTable(tuple(items), labels, self.tagset)

    def live_alpha(self) -> float | None:
        table = self.agreement_table()
        if table is None:
            return None
        try:
            return krippendorff_alpha(table)
        except ValueError:  # no pairable items yet
            return None


def _majority_vote(session: AnnotationSession):
    """Majority label per token over submitted annotators; ties break
    toward the tag-inventory order and are flagged."""
    sentences = []
    ties = []
    order = {t: i for i, t in enumerate(session.tagset.tags)}
    for item, tokens in enumerate(session.sentences):
        votes = [tags for (a, it), tags in session.labels.items() if it == item]
        if not votes:
            continue
        winners = []
        for pos in range(len(tokens)):
            counts: dict[str, int] = {}
            for tags in votes:
                counts[tags[pos]] = counts.get(tags[pos], 0) + 1
            best = max(counts.values())
            tied = sorted((t for t, c in counts.items() if c == best),
                          key=order.__getitem__)
            if len(tied) > 1:
                ties.append({"item": item, "position": pos, "candidates": tied})
            winners.append(tied[0])
        sentences.append(
            TaggedSentence(tokens, tuple(winners), source_id=session.source_ids[item])
        )
    if not sentences:
        raise ValueError("nothing labeled yet")
    return Corpus(tuple(sentences), session.tagset), ties


def _per_annotator(session: AnnotationSession):
    """Per-annotator corpora of completed items plus, for each annotator,
    the session item index of every exported sentence (exports contain
    only completed items, so positions alone cannot identify them)."""
    if not session.labels:
        raise ValueError("nothing labeled yet")
    corpora = {}
    item_ids = {}
    for annotator in session.annotators:
        sentences = []
        ids = []
        for item, tokens in enumerate(session.sentences):
            tags = session.labels.get((annotator, item))
            if tags is not None:
                sentences.append(
                    TaggedSentence(tokens, tags, source_id=session.source_ids[item])
                )
                ids.append(item)
        if sentences:
            corpora[annotator] = Corpus(tuple(sentences), session.tagset)
            item_ids[annotator] = ids
    return corpora, item_ids


def corpus_to_conll_text(corpus: Corpus) -> str:
    lines = []
    for sentence in corpus:
        for token, tag in zip(sentence.tokens, sentence.gold_tags):
            lines.append(f"{token}\t{tag}")
        lines.append("")
    return "\n".join(lines) + "\n" if lines else ""


class SessionStore:
    """In-memory sessions behind per-session append-only journals."""

    def __init__(self, journal_dir):
        self.journal_dir = Path(journal_dir)
        self.journal_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, AnnotationSession] = {}
        self.locks: dict[str, threading.Lock] = {}
        self._store_lock = threading.Lock()
        for journal in sorted(self.journal_dir.glob("*.journal")):
            self._replay(journal)

    # -- journal -------------------------------------------------------

    def _journal_path(self, session_id: str) -> Path:
        return self.journal_dir / f"{session_id}.journal"

    def _append(self, session_id: str, event: str, payload: dict) -> None:
        stamp = datetime.now(timezone.utc).isoformat()
        record = f"{stamp}\t{event}\t{json.dumps(payload, ensure_ascii=False)}\n"
        with open(self._journal_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(record)

    def _replay(self, journal: Path) -> None:
        with open(journal, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                _, event, payload = line.split("\t", 2)
                self._apply(event, json.loads(payload))

    def _apply(self, event: str, payload: dict) -> None:
        if event == "create":
            session = AnnotationSession(
                session_id=payload["session_id"],
                sentences=tuple(tuple(s) for s in payload["sentences"]),
                source_ids=tuple(payload["source_ids"]),
                annotators=tuple(payload["annotators"]),
                tagset=Tagset(payload["tagset"]),
                pre_annotations=(
                    tuple(tuple(p) for p in payload["pre_annotations"])
                    if payload["pre_annotations"] is not None else None
                ),
            )
            self.sessions[session.session_id] = session
            self.locks[session.session_id] = threading.Lock()
        elif event == "serve":
            session = self.sessions[payload["session_id"]]
            session.served.add((payload["annotator"], payload["item"]))
        elif event == "submit":
            session = self.sessions[payload["session_id"]]
            key = (payload["annotator"], payload["item"])
            session.labels[key] = tuple(payload["tags"])
            if payload.get("mae_equivalents") is not None:
                session.mae_equivalents[key] = tuple(payload["mae_equivalents"])
        else:
            raise ValueError(f"unknown journal event {event!r}")

    # -- operations ----------------------------------------------------

    def create_session(self, corpus: Corpus, annotators, tagger=None) -> str:
        if len(corpus) == 0:
            raise ValueError("cannot create a session over an empty corpus")
        annotators = tuple(annotators)
        if not annotators:
            raise ValueError("need at least one annotator")
        if len(set(annotators)) != len(annotators):
            raise ValueError("duplicate annotator ids")
        pre = None
        if tagger is not None:
            predicted = tagger(corpus)
            pre = [list(s.pred_tags) for s in predicted]
        session_id = uuid.uuid4().hex
        payload = {
            "session_id": session_id,
            "sentences": [list(s.tokens) for s in corpus],
            "source_ids": [s.source_id for s in corpus],
            "annotators": list(annotators),
            "tagset": list(corpus.tagset.tags),
            "pre_annotations": pre,
        }
        with self._store_lock:
            self._apply("create", payload)
            self._append(session_id, "create", payload)
        return session_id

    def _session(self, session_id: str) -> AnnotationSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(f"unknown session {session_id!r}")
        return session

    def next_item(self, session_id: str, annotator: str) -> dict:
        session = self._session(session_id)
        if annotator not in session.annotators:
            raise KeyError(f"unknown annotator {annotator!r}")
        with self.locks[session_id]:
            item = session.next_item_for(annotator)
            if item is None:
                return {"done": True}
            if (annotator, item) not in session.served:
                payload = {"session_id": session_id, "annotator": annotator,
                           "item": item}
                self._apply("serve", payload)
                self._append(session_id, "serve", payload)
        return {
            "done": False,
            "item_id": item,
            "tokens": list(session.sentences[item]),
            "pre_annotations": (
                list(session.pre_annotations[item])
                if session.pre_annotations is not None else None
            ),
            "tagset": list(session.tagset.tags),
        }

    def submit_labels(self, session_id: str, annotator: str, item: int,
                      tags, mae_equivalents=None) -> float | None:
        session = self._session(session_id)
        if annotator not in session.annotators:
            raise KeyError(f"unknown annotator {annotator!r}")
        if not 0 <= item < len(session.sentences):
            raise KeyError(f"unknown item {item}")
        tokens = session.sentences[item]
        tags = list(tags)
        if len(tags) != len(tokens):
            raise ValueError(
                f"item {item} has {len(tokens)} tokens but {len(tags)} tags were sent"
            )
        for tag in tags:
            if tag not in session.tagset:
                raise ValueError(f"tag {tag!r} not in inventory")
        if mae_equivalents is not None:
            mae_equivalents = list(mae_equivalents)
            if len(mae_equivalents) != len(tokens):
                raise ValueError("mae_equivalents length must match token count")
        payload = {
            "session_id": session_id,
            "annotator": annotator,
            "item": item,
            "tags": tags,
            "mae_equivalents": mae_equivalents,
        }
        with self.locks[session_id]:
            self._apply("submit", payload)
            self._append(session_id, "submit", payload)
            return session.live_alpha()

    def agreement(self, session_id: str) -> float | None:
        # Reads are lock-free and see the latest committed state.
        return self._session(session_id).live_alpha()

    def export(self, session_id: str, strategy: str):
        session = self._session(session_id)
        with self.locks[session_id]:
            if strategy == "majority_vote":
                corpus, ties = _majority_vote(session)
                return {"strategy": strategy,
                        "conll": corpus_to_conll_text(corpus),
                        "ties": ties}
            if strategy == "per_annotator":
                corpora, item_ids = _per_annotator(session)
                return {
                    "strategy": strategy,
                    "annotators": {
                        annotator: corpus_to_conll_text(corpus)
                        for annotator, corpus in corpora.items()
                    },
                    "item_ids": item_ids,
                }
            raise ValueError(f"unknown export strategy {strategy!r}")

    def summary(self, session_id: str) -> dict:
        session = self._session(session_id)
        total = len(session.sentences)
        return {
            "session_id": session_id,
            "items": total,
            "annotators": [
                {
                    "id": annotator,
                    "completed": sum(
                        1 for item in range(total)
                        if (annotator, item) in session.labels
                    ),
                }
                for annotator in session.annotators
            ],
            "alpha": session.live_alpha(),
        }


# -- HTTP layer ---------------------------------------------------------


class CreateSessionRequest(BaseModel):
    sentences: list[list[str]]
    annotators: list[str]
    tagset: list[str] | None = None
    model_path: str | None = None
    source_ids: list[str] | None = None


class SubmitLabelsRequest(BaseModel):
    annotator: str
    tags: list[str]
    mae_equivalents: list[str] | None = None


def _load_tagger(model_path: str):
    model = modelio.load_model(model_path)
    from dialectpos import bilstm, crf

    if isinstance(model, crf.CrfModel):
        return lambda corpus: crf.predict(model, corpus)
    return lambda corpus: bilstm.predict(model, corpus)


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="dialectpos annotation service")
    # Desk-scale local tool without accounts; the browser UI may be
    # served from another local origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _wrap(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok", "sessions": len(store.sessions)}

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        def build():
            tagset = Tagset(request.tagset) if request.tagset else DEFAULT_TAGSET
            sentences = []
            for i, tokens in enumerate(request.sentences):
                source_id = (request.source_ids[i]
                             if request.source_ids else f"s{i}")
                sentences.append(TaggedSentence(tuple(tokens), source_id=source_id))
            corpus = Corpus(tuple(sentences), tagset)
            tagger = _load_tagger(request.model_path) if request.model_path else None
            return store.create_session(corpus, request.annotators, tagger)

        try:
            session_id = _wrap(build)
        except HTTPException:
            raise
        except FileNotFoundError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def summary(session_id: str):
        return _wrap(store.summary, session_id)

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str, annotator: str):
        return _wrap(store.next_item, session_id, annotator)

    @app.post("/sessions/{session_id}/items/{item}/labels")
    def submit_labels(session_id: str, item: int, request: SubmitLabelsRequest):
        alpha = _wrap(store.submit_labels, session_id, request.annotator, item,
                      request.tags, request.mae_equivalents)
        return {"accepted": True, "alpha": alpha}

    @app.get("/sessions/{session_id}/agreement")
    def agreement(session_id: str):
        return {"alpha": _wrap(store.agreement, session_id)}

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, strategy: str = "majority_vote"):
        return _wrap(store.export, session_id, strategy)

    return app
