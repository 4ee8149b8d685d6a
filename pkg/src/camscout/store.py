"""File-backed storage for crawl output, framesets, labels, and camera records.

Everything lives under one data directory: frame payloads as content-addressed
files named by their digest, every record type as line-delimited JSON. The
store is embedded so tests and desk-scale runs stay hermetic; writes are
serialized by the single-writer contract and files are replaced atomically.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .evaluate import EvalReport, LabeledSample, validate_label
from .identify import ClassificationResult, Method
from .links import DataLink
from .sample import Frame, FrameSet


class NotFound(KeyError):
    pass


class ConflictingLabel(ValueError):
    """The same labeler already labeled this frameset."""


def frameset_id(canonical_key: str) -> str:
    return hashlib.md5(canonical_key.encode()).hexdigest()


@dataclass
class CameraRecord:
    id: str
    data_link: DataLink
    classification: ClassificationResult
    first_seen: float
    last_verified: float
    frame_refs: list[str]

    def __post_init__(self):
        if not self.classification.is_camera:
            raise ValueError("camera records only store links classified as cameras")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "data_link": self.data_link.to_dict(),
            "classification": self.classification.to_dict(),
            "first_seen": self.first_seen,
            "last_verified": self.last_verified,
            "frame_refs": list(self.frame_refs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraRecord":
        cls_dict = d["classification"]
        classification = ClassificationResult(
            link=DataLink.from_dict(cls_dict["link"]) if cls_dict.get("link") else None,
            method=Method(cls_dict["method"]),
            score=cls_dict["score"],
            is_camera=cls_dict["is_camera"],
            frames_used=cls_dict.get("frames_used", []),
        )
        return cls(
            id=d["id"],
            data_link=DataLink.from_dict(d["data_link"]),
            classification=classification,
            first_seen=d["first_seen"],
            last_verified=d["last_verified"],
            frame_refs=d.get("frame_refs", []),
        )


class Store:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.frames_dir = self.root / "frames"
        self.frames_dir.mkdir(parents=True, exist_ok=True)

    # -- low-level jsonl helpers -------------------------------------------

    def _path(self, name: str) -> Path:
        return self.root / name

    def _read_jsonl(self, name: str) -> list[dict]:
        path = self._path(name)
        if not path.exists():
            return []
        records = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def _write_jsonl(self, name: str, records: list[dict]) -> None:
        path = self._path(name)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            for record in records:
                fh.write(json.dumps(record) + "\n")
        os.replace(tmp, path)

    def _append_jsonl(self, name: str, record: dict) -> None:
        with open(self._path(name), "a") as fh:
            fh.write(json.dumps(record) + "\n")

    # -- frame payloads ------------------------------------------------------

    def put_frame_bytes(self, data: bytes) -> str:
        digest = hashlib.md5(data).hexdigest()
        path = self.frames_dir / digest
        if not path.exists():
            path.write_bytes(data)
        return digest

    def frame_bytes(self, digest: str) -> bytes:
        path = self.frames_dir / digest
        if not path.exists():
            raise NotFound(f"no frame with digest {digest}")
        return path.read_bytes()

    # -- framesets -----------------------------------------------------------

    def put_frameset(self, fs: FrameSet) -> str:
        fsid = frameset_id(fs.link.canonical_key)
        counts = fs.pixel_change_counts()
        frames = []
        for frame, count in zip(fs.frames, counts):
            if frame is None:
                frames.append(None)
                continue
            self.put_frame_bytes(frame.data)
            frames.append(
                {
                    "checksum": frame.checksum,
                    "captured_at": frame.captured_at,
                    "decode_ok": frame.decode_ok,
                    "pixel_change_count": count,
                }
            )
        manifest = {
            "id": fsid,
            "link": fs.link.to_dict(),
            "t0": fs.t0,
            "offsets": list(fs.offsets),
            "frames": frames,
        }
        records = self._read_jsonl("framesets.jsonl")
        records = [r for r in records if r["id"] != fsid]
        records.append(manifest)
        self._write_jsonl("framesets.jsonl", records)
        return fsid

    def get_frameset_manifest(self, fsid: str) -> dict:
        for record in self._read_jsonl("framesets.jsonl"):
            if record["id"] == fsid:
                return record
        raise NotFound(f"no frameset {fsid}")

    def load_frameset(self, fsid: str) -> FrameSet:
        """Rebuild a FrameSet (bytes and decoded pixels) from stored frames."""
        manifest = self.get_frameset_manifest(fsid)
        frames: list[Frame | None] = []
        for entry in manifest["frames"]:
            if entry is None:
                frames.append(None)
                continue
            data = self.frame_bytes(entry["checksum"])
            frames.append(Frame.from_bytes(data, entry["captured_at"]))
        return FrameSet(
            link=DataLink.from_dict(manifest["link"]),
            t0=manifest["t0"],
            offsets=tuple(manifest["offsets"]),
            frames=frames,
        )

    def list_framesets(self, unlabeled: bool | None = None) -> list[dict]:
        manifests = sorted(self._read_jsonl("framesets.jsonl"), key=lambda r: r["t0"])
        if unlabeled is None:
            return manifests
        labeled_ids = {r["frameset_id"] for r in self._read_jsonl("labels.jsonl")}
        if unlabeled:
            return [m for m in manifests if m["id"] not in labeled_ids]
        return [m for m in manifests if m["id"] in labeled_ids]

    # -- labels ----------------------------------------------------------------

    def put_label(self, sample: LabeledSample) -> None:
        manifest = self.get_frameset_manifest(sample.frameset_id)  # NotFound if absent
        for record in self._read_jsonl("labels.jsonl"):
            if (
                record["frameset_id"] == sample.frameset_id
                and record["labeler"] == sample.labeler
            ):
                raise ConflictingLabel(
                    f"{sample.labeler} already labeled frameset {sample.frameset_id}"
                )
        validate_label(self.load_frameset(sample.frameset_id), sample.label)
        if sample.pixel_change_count is None:
            counts = [
                f.get("pixel_change_count")
                for f in manifest["frames"]
                if f is not None and f.get("pixel_change_count") is not None
            ]
            sample.pixel_change_count = counts[-1] if counts else None
        self._append_jsonl("labels.jsonl", sample.to_dict())

    def list_labels(self) -> list[LabeledSample]:
        return [LabeledSample.from_dict(r) for r in self._read_jsonl("labels.jsonl")]

    # -- classifications ---------------------------------------------------------

    def put_classification(self, result: ClassificationResult) -> None:
        record = result.to_dict()
        record["frameset_id"] = (
            frameset_id(result.link.canonical_key) if result.link else None
        )
        records = self._read_jsonl("classifications.jsonl")
        records = [r for r in records if r.get("frameset_id") != record["frameset_id"]]
        records.append(record)
        self._write_jsonl("classifications.jsonl", records)

    def list_classifications(self) -> list[dict]:
        return self._read_jsonl("classifications.jsonl")

    def classification_for(self, fsid: str) -> dict | None:
        for record in self._read_jsonl("classifications.jsonl"):
            if record.get("frameset_id") == fsid:
                return record
        return None

    # -- camera records ------------------------------------------------------------

    def upsert_camera(self, record: CameraRecord) -> None:
        """Insert or replace by the link's canonical key, so re-running a crawl
        never duplicates a camera."""
        records = self._read_jsonl("cameras.jsonl")
        key = record.data_link.canonical_key
        records = [r for r in records if r["data_link"]["canonical_key"] != key]
        records.append(record.to_dict())
        self._write_jsonl("cameras.jsonl", records)

    def get_camera(self, camera_id: str) -> CameraRecord:
        for record in self._read_jsonl("cameras.jsonl"):
            if record["id"] == camera_id:
                return CameraRecord.from_dict(record)
        raise NotFound(f"no camera {camera_id}")

    def list_cameras(self, domain: str | None = None, kind: str | None = None) -> list[CameraRecord]:
        cameras = [CameraRecord.from_dict(r) for r in self._read_jsonl("cameras.jsonl")]
        if domain is not None:
            cameras = [c for c in cameras if c.data_link.seed_domain == domain]
        if kind is not None:
            cameras = [c for c in cameras if c.data_link.kind.value == kind]
        return cameras

    # -- eval reports -----------------------------------------------------------------

    def put_eval(self, report: EvalReport, method: str, threshold: float | None) -> None:
        record = {"method": method, "threshold": threshold, "report": report.to_dict()}
        self._append_jsonl("eval.jsonl", record)

    def latest_eval(self, method: str | None = None) -> dict | None:
        records = self._read_jsonl("eval.jsonl")
        if method is not None:
            records = [r for r in records if r["method"] == method]
        return records[-1] if records else None

    # -- dead links ---------------------------------------------------------------------

    def record_dead_link(self, link: DataLink, reason: str) -> None:
        self._append_jsonl("dead_links.jsonl", {"link": link.to_dict(), "reason": reason})
