"""HTTP API over the store: camera records, frameset manifests, frame bytes,
label ingestion, and on-demand evaluation. `camscout serve` mounts the
labeling UI on top of these endpoints when given a directory of static files.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .evaluate import (
    LABEL_CAMERA,
    LABEL_OTHER,
    LabeledSample,
    LabelGuardViolation,
    compute_metrics,
)
from .identify import (
    DEFAULT_LUMINANCE_THRESHOLD,
    DEFAULT_PERCENT_THRESHOLD,
    InsufficientFrames,
    Method,
    score_frameset,
)
from .store import ConflictingLabel, NotFound, Store


class LabelRequest(BaseModel):
    frameset_id: str
    label: str
    labeler: str


def _content_type(data: bytes) -> str:
    if data.startswith(b"\x89PNG"):
        return "image/png"
    if data.startswith(b"\xff\xd8"):
        return "image/jpeg"
    return "application/octet-stream"


def _frame_urls(manifest: dict) -> dict:
    """Attach per-frame fetch URLs and offsets so clients need no URL logic."""
    enriched = dict(manifest)
    frames = []
    for offset, entry in zip(manifest["offsets"], manifest["frames"]):
        if entry is None:
            frames.append(None)
            continue
        frame = dict(entry)
        frame["offset"] = offset
        frame["url"] = f"/api/framesets/{manifest['id']}/frames/{offset:g}"
        frames.append(frame)
    enriched["frames"] = frames
    enriched["source_page"] = manifest["link"].get("source_page")
    return enriched


def create_app(store: Store, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="camscout")

    @app.get("/api/cameras")
    def list_cameras(domain: str | None = None, kind: str | None = None):
        return [c.to_dict() for c in store.list_cameras(domain=domain, kind=kind)]

    @app.get("/api/cameras/{camera_id}")
    def get_camera(camera_id: str):
        try:
            return store.get_camera(camera_id).to_dict()
        except NotFound:
            raise HTTPException(status_code=404, detail="camera not found")

    @app.get("/api/cameras/{camera_id}/frames/{offset}")
    def camera_frame(camera_id: str, offset: float):
        try:
            store.get_camera(camera_id)
        except NotFound:
            raise HTTPException(status_code=404, detail="camera not found")
        return _frame_response(camera_id, offset)

    @app.get("/api/candidates")
    def candidates(unlabeled: bool = Query(default=True), verdict: bool | None = None):
        manifests = [_with_verdict(_frame_urls(m)) for m in store.list_framesets(unlabeled=unlabeled)]
        if verdict is not None:
            manifests = [m for m in manifests if m["classifier_verdict"] is verdict]
        return manifests

    @app.get("/api/framesets/{fsid}")
    def frameset(fsid: str):
        try:
            manifest = store.get_frameset_manifest(fsid)
        except NotFound:
            raise HTTPException(status_code=404, detail="frameset not found")
        return _with_verdict(_frame_urls(manifest))

    @app.get("/api/framesets/{fsid}/frames/{offset}")
    def frameset_frame(fsid: str, offset: float):
        return _frame_response(fsid, offset)

    @app.post("/api/labels", status_code=201)
    def post_label(req: LabelRequest):
        if req.label not in (LABEL_CAMERA, LABEL_OTHER):
            raise HTTPException(
                status_code=422,
                detail=f"label must be {LABEL_CAMERA} or {LABEL_OTHER}",
            )
        sample = LabeledSample(frameset_id=req.frameset_id, label=req.label, labeler=req.labeler)
        try:
            store.put_label(sample)
        except NotFound:
            raise HTTPException(status_code=404, detail="frameset not found")
        except ConflictingLabel as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except LabelGuardViolation as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"frameset_id": req.frameset_id, "label": req.label, "labeler": req.labeler}

    @app.get("/api/eval")
    def evaluate(method: str = "luminance", threshold: float | None = None):
        try:
            m = Method(method)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown method {method!r}")
        if threshold is None:
            threshold = (
                DEFAULT_PERCENT_THRESHOLD
                if m == Method.PERCENT
                else 0.5 if m == Method.CHECKSUM else DEFAULT_LUMINANCE_THRESHOLD
            )
        labels = store.list_labels()
        if not labels:
            raise HTTPException(status_code=404, detail="no labeled framesets")
        predictions, truths = [], []
        for sample in labels:
            try:
                fs = store.load_frameset(sample.frameset_id)
                score = score_frameset(fs, m)
            except (NotFound, InsufficientFrames):
                continue
            predictions.append(score > threshold)
            truths.append(sample.is_camera)
        if not predictions:
            raise HTTPException(status_code=404, detail="no scorable labeled framesets")
        report = compute_metrics(predictions, truths)
        result = report.to_dict()
        result["method"] = m.value
        result["threshold"] = threshold
        return result

    def _with_verdict(manifest: dict) -> dict:
        record = store.classification_for(manifest["id"])
        manifest["classifier_verdict"] = record["is_camera"] if record else None
        manifest["classifier_method"] = record["method"] if record else None
        manifest["classifier_score"] = record["score"] if record else None
        return manifest

    def _frame_response(fsid: str, offset: float) -> Response:
        try:
            manifest = store.get_frameset_manifest(fsid)
        except NotFound:
            raise HTTPException(status_code=404, detail="frameset not found")
        for off, entry in zip(manifest["offsets"], manifest["frames"]):
            if abs(off - offset) < 1e-9 and entry is not None:
                try:
                    data = store.frame_bytes(entry["checksum"])
                except NotFound:
                    raise HTTPException(status_code=404, detail="frame payload missing")
                return Response(content=data, media_type=_content_type(data))
        raise HTTPException(status_code=404, detail="no frame at that offset")

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
