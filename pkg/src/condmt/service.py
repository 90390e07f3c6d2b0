"""HTTP session service for interactive threshold selection.

Endpoints (all under /v1) wrap :mod:`condmt.adaptive_tau` sessions: the
client only ever receives the masked view (a 20-bin histogram of the
values above the current cutoff, or the raw masked multiset on request)
plus the hidden count, never any value at or below the cutoff.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from . import adaptive_tau as at
from .global_tests import METHODS
from .qualint import StudyRecord, split_pvalues

SESSION_TTL_SECONDS = 3600.0
HISTOGRAM_BINS = 20

app = FastAPI(title="condmt threshold sessions", version="1")


class StudyRecordIn(BaseModel):
    id: str
    estimate: float
    std_err: float = Field(gt=0)
    group: Optional[str] = None


class SessionCreate(BaseModel):
    pvalues: Optional[list[float]] = None
    dataset: Optional[list[StudyRecordIn]] = None
    side: Optional[str] = None  # "plus" | "minus", with dataset
    cutoffs: Optional[list[float]] = None
    window: Optional[float] = None
    level: Optional[float] = None


class FinalizeBody(BaseModel):
    method: str
    options: dict = Field(default_factory=dict)


class _Entry:
    def __init__(self, session: at.TauSession):
        self.session = session
        self.lock = threading.Lock()
        self.touched = time.monotonic()


_store: dict[str, _Entry] = {}
_store_lock = threading.Lock()


def reset_store() -> None:
    with _store_lock:
        _store.clear()


def _evict_expired() -> None:
    now = time.monotonic()
    with _store_lock:
        for sid in [s for s, e in _store.items()
                    if now - e.touched > SESSION_TTL_SECONDS]:
            del _store[sid]


def _entry(session_id: str) -> _Entry:
    _evict_expired()
    with _store_lock:
        entry = _store.get(session_id)
    if entry is None:
        raise HTTPException(status_code=404, detail="unknown session id")
    entry.touched = time.monotonic()
    return entry


def _histogram(visible: np.ndarray, tau: float):
    edges = np.linspace(tau, 1.0, HISTOGRAM_BINS + 1)
    counts, _ = np.histogram(visible, bins=edges)
    return {"bin_edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts]}


def _view_payload(entry: _Entry, reveal: Optional[str]):
    s = entry.session
    if s.status != "active":
        tau = s.chosen_tau
        visible = np.sort(s.hidden[s.hidden > tau])
        payload = {
            "status": "stopped",
            "n": int(s.hidden.size),
            "current_tau": float(tau),
            "hidden_count": int(s.hidden.size - visible.size),
            "masked_histogram": _histogram(visible, tau),
            "heuristic_suggestion": None,
        }
    else:
        view = at.session_view(s)
        visible = view.values_above_tau
        payload = {
            "status": "active",
            "n": view.n,
            "current_tau": float(view.current_tau),
            "hidden_count": int(view.n - visible.size),
            "masked_histogram": _histogram(visible, view.current_tau),
            "heuristic_suggestion": view.heuristic_suggestion,
        }
    if reveal == "multiset":
        payload["values_above_tau"] = [float(v) for v in visible]
    return payload


@app.post("/v1/sessions", status_code=201)
def create_session(body: SessionCreate):
    if (body.pvalues is None) == (body.dataset is None):
        raise HTTPException(status_code=400,
                            detail="provide exactly one of: pvalues, dataset")
    if body.pvalues is not None:
        values = np.asarray(body.pvalues, dtype=float)
        if values.size == 0 or np.any((values < 0) | (values > 1)) \
                or np.any(~np.isfinite(values)):
            raise HTTPException(status_code=400,
                                detail="pvalues: must be nonempty in [0, 1]")
    else:
        if body.side not in ("plus", "minus"):
            raise HTTPException(status_code=400,
                                detail="side: must be 'plus' or 'minus'")
        try:
            records = [StudyRecord(r.id, r.estimate, r.std_err, r.group)
                       for r in body.dataset]
            plus, minus = split_pvalues(records)
        except ValueError as exc:
            raise HTTPException(status_code=400,
                                detail=f"dataset: {exc}") from exc
        values = (plus if body.side == "plus" else minus).values
    kwargs = {}
    if body.cutoffs is not None:
        kwargs["cutoffs"] = tuple(body.cutoffs)
    if body.window is not None:
        kwargs["window"] = body.window
    if body.level is not None:
        kwargs["test_level"] = body.level
    try:
        cfg = at.AdaptiveConfig(**kwargs)
    except ValueError as exc:
        raise HTTPException(status_code=400,
                            detail=f"cutoffs/window/level: {exc}") from exc
    session = at.open_session(values, cfg)
    sid = uuid.uuid4().hex
    with _store_lock:
        _store[sid] = _Entry(session)
    return {"session_id": sid}


@app.get("/v1/sessions/{session_id}")
def get_view(session_id: str, reveal: Optional[str] = Query(default=None)):
    entry = _entry(session_id)
    with entry.lock:
        return _view_payload(entry, reveal)


@app.post("/v1/sessions/{session_id}/advance")
def advance_session(session_id: str):
    entry = _entry(session_id)
    with entry.lock:
        if entry.session.status != "active":
            raise HTTPException(status_code=409, detail="session is stopped")
        entry.session = at.advance(entry.session)
        return _view_payload(entry, None)


@app.post("/v1/sessions/{session_id}/stop")
def stop_session(session_id: str):
    entry = _entry(session_id)
    with entry.lock:
        if entry.session.status != "active":
            raise HTTPException(status_code=409,
                                detail="session already stopped")
        entry.session = at.stop(entry.session)
        return {"status": "stopped",
                "chosen_tau": float(entry.session.chosen_tau)}


@app.post("/v1/sessions/{session_id}/finalize")
def finalize_session(session_id: str, body: FinalizeBody):
    if body.method not in METHODS:
        raise HTTPException(status_code=400,
                            detail=f"method: must be one of {METHODS}")
    entry = _entry(session_id)
    with entry.lock:
        if entry.session.status != "stopped":
            raise HTTPException(status_code=409,
                                detail="stop the session before finalizing")
        try:
            conditional = at.finalize(entry.session, body.method,
                                      **body.options)
            unconditional = at.conditional_test(entry.session.hidden, 1.0,
                                                body.method, **body.options)
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=400,
                                detail=f"options: {exc}") from exc
        return {"conditional": conditional.as_dict(),
                "unconditional": unconditional.as_dict()}
