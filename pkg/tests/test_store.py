import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import frameset_from_means, gray_png, image_link
from camscout.evaluate import LABEL_CAMERA, LABEL_OTHER, LabeledSample, LabelGuardViolation
from camscout.identify import ClassificationResult, Method
from camscout.links import DataLink, LinkKind, Provenance
from camscout.store import CameraRecord, ConflictingLabel, NotFound, Store, frameset_id


def camera_result(link, score=50.0):
    return ClassificationResult(
        link=link, method=Method.LUMINANCE, score=score, is_camera=True, frames_used=[0.0, 43200.0]
    )


class TestFrames:
    def test_content_addressed_storage(self, tmp_store):
        data = gray_png(42)
        digest = tmp_store.put_frame_bytes(data)
        assert tmp_store.frame_bytes(digest) == data
        assert tmp_store.put_frame_bytes(data) == digest  # idempotent

    def test_missing_frame(self, tmp_store):
        with pytest.raises(NotFound):
            tmp_store.frame_bytes("0" * 32)


class TestFramesets:
    def test_round_trip(self, tmp_store):
        fs = frameset_from_means([10, 20, 30, 200])
        fsid = tmp_store.put_frameset(fs)
        loaded = tmp_store.load_frameset(fsid)
        assert [f.checksum for f in loaded.frames] == [f.checksum for f in fs.frames]
        assert loaded.offsets == fs.offsets
        assert loaded.link == fs.link

    def test_manifest_has_pixel_change_counts(self, tmp_store):
        fs = frameset_from_means([10, 10, 30, 200])
        manifest = tmp_store.get_frameset_manifest(tmp_store.put_frameset(fs))
        counts = [f["pixel_change_count"] for f in manifest["frames"]]
        assert counts[0] is None
        assert counts[1] == 0
        assert counts[2] == 64 and counts[3] == 64

    def test_upsert_by_link(self, tmp_store):
        fs = frameset_from_means([10, 20, 30, 40])
        first = tmp_store.put_frameset(fs)
        second = tmp_store.put_frameset(frameset_from_means([11, 21, 31, 41]))
        assert first == second
        assert len(tmp_store.list_framesets()) == 1

    def test_missing_frames_survive_round_trip(self, tmp_store):
        from conftest import frameset_from_bytes

        fs = frameset_from_bytes([gray_png(1), None, gray_png(2), None])
        loaded = tmp_store.load_frameset(tmp_store.put_frameset(fs))
        assert [f is None for f in loaded.frames] == [False, True, False, True]


class TestLabels:
    def _stored_changing(self, store):
        return store.put_frameset(frameset_from_means([10, 10, 10, 90]))

    def test_put_and_list(self, tmp_store):
        fsid = self._stored_changing(tmp_store)
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="me"))
        labels = tmp_store.list_labels()
        assert len(labels) == 1
        assert labels[0].is_camera

    def test_unknown_frameset_rejected(self, tmp_store):
        with pytest.raises(NotFound):
            tmp_store.put_label(LabeledSample(frameset_id="nope", label=LABEL_OTHER, labeler="me"))

    def test_same_labeler_conflicts(self, tmp_store):
        fsid = self._stored_changing(tmp_store)
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="me"))
        with pytest.raises(ConflictingLabel):
            tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_OTHER, labeler="me"))

    def test_second_labeler_allowed(self, tmp_store):
        fsid = self._stored_changing(tmp_store)
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="a"))
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="b"))
        assert len(tmp_store.list_labels()) == 2

    def test_guard_rejects_camera_label_on_static_frameset(self, tmp_store):
        fsid = tmp_store.put_frameset(frameset_from_means([7, 7, 7, 7]))
        with pytest.raises(LabelGuardViolation):
            tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="me"))
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_OTHER, labeler="me"))

    def test_pixel_change_count_filled_from_manifest(self, tmp_store):
        fsid = self._stored_changing(tmp_store)
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="me"))
        assert tmp_store.list_labels()[0].pixel_change_count == 64

    def test_unlabeled_filter(self, tmp_store):
        fsid = self._stored_changing(tmp_store)
        other = tmp_store.put_frameset(
            frameset_from_means([10, 10, 10, 90], link=image_link("http://site.test/b.jpg"))
        )
        tmp_store.put_label(LabeledSample(frameset_id=fsid, label=LABEL_CAMERA, labeler="me"))
        unlabeled = tmp_store.list_framesets(unlabeled=True)
        assert [m["id"] for m in unlabeled] == [other]


class TestCameras:
    def test_round_trip(self, tmp_store):
        link = image_link()
        record = CameraRecord(
            id=frameset_id(link.canonical_key),
            data_link=link,
            classification=camera_result(link),
            first_seen=1.0,
            last_verified=2.0,
            frame_refs=["a" * 32],
        )
        tmp_store.upsert_camera(record)
        loaded = tmp_store.get_camera(record.id)
        assert loaded.to_dict() == record.to_dict()

    def test_upsert_never_duplicates(self, tmp_store):
        link = image_link()
        for verified in (2.0, 9.0):
            tmp_store.upsert_camera(
                CameraRecord(
                    id=frameset_id(link.canonical_key),
                    data_link=link,
                    classification=camera_result(link),
                    first_seen=1.0,
                    last_verified=verified,
                    frame_refs=[],
                )
            )
        cameras = tmp_store.list_cameras()
        assert len(cameras) == 1
        assert cameras[0].last_verified == 9.0

    def test_requires_camera_verdict(self):
        link = image_link()
        not_camera = ClassificationResult(
            link=link, method=Method.LUMINANCE, score=0.0, is_camera=False
        )
        with pytest.raises(ValueError):
            CameraRecord(
                id="x",
                data_link=link,
                classification=not_camera,
                first_seen=0.0,
                last_verified=0.0,
                frame_refs=[],
            )

    def test_filters(self, tmp_store):
        a = image_link("http://a.test/cam.jpg", seed_domain="a.test", source_page="http://a.test/")
        b = image_link("http://b.test/cam.jpg", seed_domain="b.test", source_page="http://b.test/")
        for link in (a, b):
            tmp_store.upsert_camera(
                CameraRecord(
                    id=frameset_id(link.canonical_key),
                    data_link=link,
                    classification=camera_result(link),
                    first_seen=0.0,
                    last_verified=0.0,
                    frame_refs=[],
                )
            )
        assert len(tmp_store.list_cameras(domain="a.test")) == 1
        assert len(tmp_store.list_cameras(kind="image")) == 2
        assert tmp_store.list_cameras(kind="stream") == []

    def test_get_missing(self, tmp_store):
        with pytest.raises(NotFound):
            tmp_store.get_camera("missing")


_link_strategy = st.builds(
    lambda host, path, depth, ts: DataLink(
        raw_url=f"http://{host}/{path}.jpg",
        kind=LinkKind.IMAGE,
        stream_kind=None,
        provenance=Provenance.HTML_EMBED,
        source_page=f"http://{host}/",
        seed_domain=host,
        discovered_at=ts,
        depth=depth,
    ),
    host=st.from_regex(r"[a-z]{1,8}\.test", fullmatch=True),
    path=st.from_regex(r"[a-z0-9]{1,10}", fullmatch=True),
    depth=st.integers(0, 15),
    ts=st.floats(0, 1e9, allow_nan=False),
)


@given(_link_strategy, st.floats(0, 300, allow_nan=False), st.booleans())
@settings(max_examples=50)
def test_camera_record_round_trip_property(tmp_path_factory, link, score, stream_flag):
    store = Store(tmp_path_factory.mktemp("records"))
    record = CameraRecord(
        id=frameset_id(link.canonical_key),
        data_link=link,
        classification=ClassificationResult(
            link=link,
            method=Method.STREAM if stream_flag else Method.LUMINANCE,
            score=score + 1.4,
            is_camera=True,
            frames_used=[0.0],
        ),
        first_seen=link.discovered_at,
        last_verified=link.discovered_at + 1,
        frame_refs=[],
    )
    store.upsert_camera(record)
    assert store.get_camera(record.id).to_dict() == record.to_dict()
