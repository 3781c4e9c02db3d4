"""Session-scoped annotation service: frames in, labels with overwrite
support out.

The service registers sessions built from pre-extracted frame images
(video decoding happens upstream; see the README extraction recipe),
serves frames to the labeling client, records zone labels with
last-write-wins correction, tracks per-track progress and exports the
canonical annotation CSV at any time.

Concurrency: all mutations to one session are applied under that
session's lock, in a single total order stamped by a per-session
sequence number; reads are safe at any time and sessions are fully
independent.
"""

from __future__ import annotations

import mimetypes
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .annotation_io import write_annotation_file, write_sidecar
from .errors import (
    DuplicateSession,
    MissingFrameFile,
    StrideMismatch,
    UnknownFrame,
    UnknownLabelKey,
    UnknownSession,
    UnknownTrack,
)
from .model import AnnotationRecord, AnnotationSet, SessionMeta, Zone

LabelKey = tuple[str, int, int, str]  # (coder_id, pass_id, frame_index, track_id)


@dataclass(frozen=True)
class FrameManifest:
    """Ordered (frame_index, image path) pairs at the session's stride."""

    entries: tuple[tuple[int, Path], ...]
    frame_stride: int

    def frame_indices(self) -> tuple[int, ...]:
        return tuple(index for index, _ in self.entries)


@dataclass
class _StoredLabel:
    zone: Zone
    note: str
    sequence: int


@dataclass
class _SessionState:
    meta: SessionMeta
    manifest: FrameManifest
    tracks: tuple[str, ...]
    labels: dict[LabelKey, _StoredLabel] = field(default_factory=dict)
    next_sequence: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        self.frame_set = frozenset(self.manifest.frame_indices())


@dataclass(frozen=True)
class LabelAck:
    """Echo of the now-current label for the event's key."""

    coder_id: str
    pass_id: int
    frame_index: int
    track_id: str
    zone: Zone
    note: str
    sequence: int


def check_manifest(manifest: FrameManifest) -> None:
    previous = None
    for index, path in manifest.entries:
        if index % manifest.frame_stride != 0:
            raise StrideMismatch(
                f"frame_index {index} is not a multiple of stride {manifest.frame_stride}"
            )
        if previous is not None and index <= previous:
            raise StrideMismatch(f"frame indices must be strictly increasing at {index}")
        previous = index
        if not Path(path).is_file():
            raise MissingFrameFile(f"frame image not found: {path}")


class AnnotationService:
    """In-memory registry of annotation sessions."""

    def __init__(self):
        self._sessions: dict[str, _SessionState] = {}
        self._registry_lock = threading.Lock()

    # -- sessions -------------------------------------------------------

    def create_session(
        self, meta: SessionMeta, manifest: FrameManifest, tracks: tuple[str, ...] | None = None
    ) -> str:
        if manifest.frame_stride != meta.frame_stride:
            raise StrideMismatch(
                f"manifest stride {manifest.frame_stride} != session stride {meta.frame_stride}"
            )
        check_manifest(manifest)
        if tracks is None:
            tracks = tuple(f"t{k}" for k in range(1, meta.group_size + 1))
        if len(tracks) != meta.group_size:
            raise StrideMismatch(
                f"expected {meta.group_size} tracks, got {len(tracks)}"
            )
        with self._registry_lock:
            if meta.session_id in self._sessions:
                raise DuplicateSession(f"session {meta.session_id!r} already exists")
            self._sessions[meta.session_id] = _SessionState(meta=meta, manifest=manifest, tracks=tracks)
        return meta.session_id

    def _session(self, session_id: str) -> _SessionState:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(f"unknown session {session_id!r}") from None

    def session_info(self, session_id: str) -> dict:
        state = self._session(session_id)
        return {
            "session_id": state.meta.session_id,
            "agent_type": state.meta.agent_type.value,
            "group_size": state.meta.group_size,
            "frame_stride": state.meta.frame_stride,
            "fps": state.meta.frames_per_second,
            "tracks": list(state.tracks),
            "frame_indices": list(state.manifest.frame_indices()),
        }

    def frame_path(self, session_id: str, frame_index: int) -> Path:
        state = self._session(session_id)
        for index, path in state.manifest.entries:
            if index == frame_index:
                return Path(path)
        raise UnknownFrame(f"frame {frame_index} not in session {session_id!r}")

    # -- labeling -------------------------------------------------------

    def record_label(
        self,
        session_id: str,
        coder_id: str,
        pass_id: int,
        frame_index: int,
        track_id: str,
        zone: Zone,
        note: str = "",
    ) -> LabelAck:
        """Store a label; a repeat for the same key overwrites it."""
        state = self._session(session_id)
        if frame_index not in state.frame_set:
            raise UnknownFrame(f"frame {frame_index} not in session {session_id!r}")
        if track_id not in state.tracks:
            raise UnknownTrack(f"track {track_id!r} not in session {session_id!r}")
        key: LabelKey = (coder_id, pass_id, frame_index, track_id)
        with state.lock:
            sequence = state.next_sequence
            state.next_sequence += 1
            state.labels[key] = _StoredLabel(zone=zone, note=note, sequence=sequence)
            stored = state.labels[key]
            return LabelAck(coder_id, pass_id, frame_index, track_id, stored.zone, stored.note, stored.sequence)

    def record_note(
        self, session_id: str, coder_id: str, pass_id: int, frame_index: int, track_id: str, note: str
    ) -> LabelAck:
        """Attach a note to an existing label without touching its zone."""
        state = self._session(session_id)
        key: LabelKey = (coder_id, pass_id, frame_index, track_id)
        with state.lock:
            stored = state.labels.get(key)
            if stored is None:
                raise UnknownLabelKey(f"no label yet for {key}; label the unit first")
            sequence = state.next_sequence
            state.next_sequence += 1
            state.labels[key] = _StoredLabel(zone=stored.zone, note=note, sequence=sequence)
            return LabelAck(coder_id, pass_id, frame_index, track_id, stored.zone, note, sequence)

    def next_unit(self, session_id: str, coder_id: str, pass_id: int) -> tuple[int, tuple[str, ...]] | None:
        """Lowest frame with unlabeled tracks for this slice; None when done."""
        state = self._session(session_id)
        for frame_index in state.manifest.frame_indices():
            unlabeled = tuple(
                t for t in state.tracks if (coder_id, pass_id, frame_index, t) not in state.labels
            )
            if unlabeled:
                return frame_index, unlabeled
        return None

    def progress(self, session_id: str, coder_id: str, pass_id: int) -> dict[str, dict[str, int]]:
        state = self._session(session_id)
        total = len(state.manifest.entries)
        result = {}
        for track in state.tracks:
            labeled = sum(
                1
                for frame_index in state.manifest.frame_indices()
                if (coder_id, pass_id, frame_index, track) in state.labels
            )
            result[track] = {"labeled": labeled, "total": total}
        return result

    def coder_passes(self, session_id: str) -> list[tuple[str, int]]:
        state = self._session(session_id)
        return sorted({(k[0], k[1]) for k in state.labels})

    def export_session(self, session_id: str, coder_id: str, pass_id: int) -> tuple[bytes, str, bool]:
        """(annotation CSV bytes, sidecar text, partial flag) for one slice."""
        state = self._session(session_id)
        with state.lock:
            records = tuple(
                AnnotationRecord(coder_id, pass_id, key[2], key[3], stored.zone, stored.note)
                for key, stored in state.labels.items()
                if key[0] == coder_id and key[1] == pass_id
            )
        aset = AnnotationSet(meta=state.meta, records=records)
        total_units = len(state.manifest.entries) * len(state.tracks)
        partial = len(records) < total_units
        return write_annotation_file(aset), write_sidecar(state.meta, partial=partial), partial


# -- HTTP wiring ---------------------------------------------------------

from pydantic import BaseModel, Field


class MetaBody(BaseModel):
    session_id: str
    agent_type: str
    group_size: int
    frame_stride: int = 4
    fps: float = 25.0


class ManifestEntry(BaseModel):
    frame_index: int
    path: str


class SessionBody(BaseModel):
    meta: MetaBody
    manifest: list[ManifestEntry]
    tracks: list[str] | None = None


class LabelBody(BaseModel):
    coder_id: str
    pass_id: int = Field(ge=1)
    frame_index: int
    track_id: str
    zone: str
    note: str = ""


class NoteBody(BaseModel):
    coder_id: str
    pass_id: int = Field(ge=1)
    frame_index: int
    track_id: str
    note: str


def create_app(frames_root: Path | str | None = None):
    """FastAPI app over a fresh service instance.

    Manifest paths in session-creation requests resolve against
    ``frames_root`` (default: current directory) and must stay inside it.
    """
    from fastapi import FastAPI, Query, Response
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse

    from .errors import AnnotationFormatError, ProxkitError
    from .model import AgentType

    root = Path(frames_root).resolve() if frames_root is not None else Path.cwd()
    service = AnnotationService()
    app = FastAPI(title="annotation service")
    app.state.service = service
    app.state.frames_root = root
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def error_response(exc: ProxkitError, status: int) -> JSONResponse:
        return JSONResponse(
            status_code=status, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    _STATUS = {
        UnknownSession: 404,
        UnknownFrame: 404,
        UnknownTrack: 404,
        UnknownLabelKey: 404,
        DuplicateSession: 409,
    }

    @app.exception_handler(ProxkitError)
    async def handle_domain_error(request, exc: ProxkitError):
        return error_response(exc, _STATUS.get(type(exc), 422))

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionBody):
        try:
            agent_type = AgentType(body.meta.agent_type)
        except ValueError:
            raise AnnotationFormatError(
                f"agent_type must be 'robot' or 'virtual', got {body.meta.agent_type!r}"
            ) from None
        meta = SessionMeta(
            session_id=body.meta.session_id,
            agent_type=agent_type,
            group_size=body.meta.group_size,
            frame_stride=body.meta.frame_stride,
            frames_per_second=body.meta.fps,
        )
        entries = []
        for entry in body.manifest:
            path = (root / entry.path).resolve()
            if not path.is_relative_to(root):
                raise MissingFrameFile(f"frame path escapes the frames root: {entry.path}")
            entries.append((entry.frame_index, path))
        manifest = FrameManifest(entries=tuple(entries), frame_stride=body.meta.frame_stride)
        tracks = tuple(body.tracks) if body.tracks else None
        session_id = service.create_session(meta, manifest, tracks)
        return service.session_info(session_id)

    @app.get("/sessions/{session_id}")
    def session_info(session_id: str):
        return service.session_info(session_id)

    @app.get("/sessions/{session_id}/frames/{frame_index}")
    def frame(session_id: str, frame_index: int):
        path = service.frame_path(session_id, frame_index)
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return Response(content=path.read_bytes(), media_type=media_type)

    @app.get("/sessions/{session_id}/next")
    def next_unit(session_id: str, coder: str = Query(...), pass_id: int = Query(..., alias="pass")):
        unit = service.next_unit(session_id, coder, pass_id)
        if unit is None:
            return {"done": True}
        frame_index, unlabeled = unit
        return {"done": False, "frame_index": frame_index, "unlabeled_tracks": list(unlabeled)}

    @app.post("/sessions/{session_id}/labels")
    def record_label(session_id: str, body: LabelBody):
        zone = Zone.from_code(body.zone)
        ack = service.record_label(
            session_id, body.coder_id, body.pass_id, body.frame_index, body.track_id, zone, body.note
        )
        return {
            "coder_id": ack.coder_id,
            "pass_id": ack.pass_id,
            "frame_index": ack.frame_index,
            "track_id": ack.track_id,
            "zone": ack.zone.code,
            "note": ack.note,
            "sequence": ack.sequence,
        }

    @app.post("/sessions/{session_id}/notes")
    def record_note(session_id: str, body: NoteBody):
        ack = service.record_note(
            session_id, body.coder_id, body.pass_id, body.frame_index, body.track_id, body.note
        )
        return {
            "coder_id": ack.coder_id,
            "pass_id": ack.pass_id,
            "frame_index": ack.frame_index,
            "track_id": ack.track_id,
            "zone": ack.zone.code,
            "note": ack.note,
            "sequence": ack.sequence,
        }

    @app.get("/sessions/{session_id}/progress")
    def progress(session_id: str, coder: str | None = None, pass_id: int | None = Query(None, alias="pass")):
        if coder is not None and pass_id is not None:
            return {f"{coder}:{pass_id}": service.progress(session_id, coder, pass_id)}
        return {
            f"{c}:{p}": service.progress(session_id, c, p)
            for c, p in service.coder_passes(session_id)
        }

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, coder: str = Query(...), pass_id: int = Query(..., alias="pass")):
        csv_bytes, _sidecar, partial = service.export_session(session_id, coder, pass_id)
        return Response(
            content=csv_bytes,
            media_type="text/csv; charset=utf-8",
            headers={"X-Partial": "true" if partial else "false"},
        )

    @app.get("/sessions/{session_id}/sidecar")
    def sidecar(session_id: str, coder: str = Query(...), pass_id: int = Query(..., alias="pass")):
        _csv, sidecar_text, _partial = service.export_session(session_id, coder, pass_id)
        return Response(content=sidecar_text, media_type="text/plain; charset=utf-8")

    return app
