import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camscout.links import (
    DataLink,
    LinkKind,
    MalformedUrl,
    Provenance,
    StreamKind,
    canonicalize,
    classify_link,
    load_suffixes,
    registrable_domain,
    same_domain,
)


class TestClassifyLink:
    @pytest.mark.parametrize(
        "url,kind,stream",
        [
            ("http://a.com/cams/17.jpg", LinkKind.IMAGE, None),
            ("http://a.com/cams/17.JPEG", LinkKind.IMAGE, None),
            ("https://a.com/x/y/z.png", LinkKind.IMAGE, None),
            ("rtsp://a.com/live", LinkKind.STREAM, StreamKind.RTSP),
            ("rtmp://a.com/app/stream", LinkKind.STREAM, StreamKind.RTMP),
            ("http://a.com/playlist.m3u8?token=x", LinkKind.STREAM, StreamKind.HLS),
            ("http://a.com/playlist.m3u", LinkKind.STREAM, StreamKind.HLS),
            ("http://a.com/video.mjpg", LinkKind.STREAM, StreamKind.MJPG),
            ("http://a.com/video.MJPEG", LinkKind.STREAM, StreamKind.MJPG),
            ("http://a.com/axis-cgi/mjpg", LinkKind.STREAM, StreamKind.MJPG),
            ("http://a.com/index.html", LinkKind.PAGE, None),
            ("http://a.com/page.php", LinkKind.PAGE, None),
            ("http://a.com/cameras", LinkKind.PAGE, None),
            ("http://a.com/", LinkKind.PAGE, None),
            ("http://a.com/photo.gif", LinkKind.PAGE, None),
            ("mailto:ops@a.com", LinkKind.OTHER, None),
            ("javascript:void(0)", LinkKind.OTHER, None),
            ("data:image/png;base64,AAAA", LinkKind.OTHER, None),
        ],
    )
    def test_kinds(self, url, kind, stream):
        assert classify_link(url) == (kind, stream)

    def test_query_stripped_before_extension_match(self):
        # the query must not hide or fake an extension
        assert classify_link("http://a.com/cam?file=x.jpg")[0] == LinkKind.PAGE
        assert classify_link("http://a.com/cam.jpg?kind=page")[0] == LinkKind.IMAGE

    def test_mjpg_heuristic_flag(self):
        url = "http://a.com/cgi-bin/mjpg"
        assert classify_link(url)[0] == LinkKind.STREAM
        assert classify_link(url, mjpg_path_heuristic=False)[0] == LinkKind.PAGE

    def test_malformed(self):
        with pytest.raises(MalformedUrl):
            classify_link("not a url at all")
        with pytest.raises(MalformedUrl):
            classify_link("http:///nohost.jpg")


class TestCanonicalize:
    def test_image_query_stripped(self):
        key = canonicalize("http://a.com/c/5.jpg?date-time=2019-01-01", LinkKind.IMAGE)
        assert key == "http://a.com/c/5.jpg"

    def test_fragment_removed(self):
        assert canonicalize("http://a.com/page#top", LinkKind.PAGE) == "http://a.com/page"

    def test_host_lowered_default_port_dropped_query_kept(self):
        key = canonicalize("HTTP://A.com:80/x.m3u8?id=3", LinkKind.STREAM)
        assert key == "http://a.com/x.m3u8?id=3"

    def test_non_default_port_kept(self):
        assert canonicalize("http://a.com:8080/x", LinkKind.PAGE) == "http://a.com:8080/x"

    def test_percent_encoding_uppercased(self):
        key = canonicalize("http://a.com/p%2fq?v=%3a", LinkKind.PAGE)
        assert key == "http://a.com/p%2Fq?v=%3A"

    def test_path_case_preserved(self):
        assert canonicalize("http://a.com/CAM/1.JPG", LinkKind.IMAGE) == "http://a.com/CAM/1.JPG"

    def test_images_differing_only_in_query_collide(self):
        a = canonicalize("http://a.com/c/5.jpg?ts=1", LinkKind.IMAGE)
        b = canonicalize("http://a.com/c/5.jpg?ts=2", LinkKind.IMAGE)
        assert a == b


class TestSameDomain:
    def test_subdomain_in_scope(self):
        assert same_domain("http://www.subdomain.example.com/cameras/", "example.com")

    def test_other_domain_out_of_scope(self):
        assert not same_domain("http://www.facebook.com/", "example.com")

    def test_suffix_spoof_rejected(self):
        assert not same_domain("http://example.com.evil.org/", "example.com")

    def test_exact_host(self):
        assert same_domain("http://example.com/x", "example.com")

    def test_no_substring_match(self):
        assert not same_domain("http://notexample.com/", "example.com")


class TestRegistrableDomain:
    @pytest.mark.parametrize(
        "host,expected",
        [
            ("www.subdomain.example.com", "example.com"),
            ("example.com", "example.com"),
            ("cameras.city.gov.uk", "city.gov.uk"),
            ("a.b.site.test", "site.test"),
            ("localhost", "localhost"),
            ("127.0.0.1", "127.0.0.1"),
            ("internal.corp", "internal.corp"),
        ],
    )
    def test_reduction(self, host, expected):
        assert registrable_domain(host) == expected

    def test_custom_suffix_file(self, tmp_path):
        table = tmp_path / "suffixes.txt"
        table.write_text("# custom\nlan\n")
        suffixes = load_suffixes(table)
        assert registrable_domain("printer.office.lan", suffixes) == "office.lan"


class TestDataLink:
    def test_stream_kind_required_iff_stream(self):
        with pytest.raises(ValueError):
            DataLink(
                raw_url="http://a.com/x.m3u8",
                kind=LinkKind.STREAM,
                stream_kind=None,
                provenance=Provenance.HTML_EMBED,
                source_page="http://a.com/",
                seed_domain="a.com",
                discovered_at=0.0,
            )
        with pytest.raises(ValueError):
            DataLink(
                raw_url="http://a.com/x.jpg",
                kind=LinkKind.IMAGE,
                stream_kind=StreamKind.HLS,
                provenance=Provenance.HTML_EMBED,
                source_page="http://a.com/",
                seed_domain="a.com",
                discovered_at=0.0,
            )

    def test_round_trip(self):
        link = DataLink(
            raw_url="http://a.com/c.jpg?ts=5",
            kind=LinkKind.IMAGE,
            stream_kind=None,
            provenance=Provenance.XHR_PAYLOAD,
            source_page="http://a.com/map",
            seed_domain="a.com",
            discovered_at=12.5,
            depth=2,
        )
        assert DataLink.from_dict(link.to_dict()) == link


# -- property tests -----------------------------------------------------------

_hosts = st.from_regex(r"[a-z][a-z0-9]{0,8}(\.[a-z][a-z0-9]{1,6}){1,3}", fullmatch=True)
_paths = st.from_regex(r"(/[a-zA-Z0-9_.%-]{0,10}){0,4}", fullmatch=True)
_queries = st.from_regex(r"([a-z]{1,5}=[a-zA-Z0-9%]{0,8}(&[a-z]{1,5}=[a-zA-Z0-9]{0,5}){0,2})?", fullmatch=True)
_schemes = st.sampled_from(["http", "https", "rtsp", "rtmp", "ftp", "mailto"])


_mailboxes = st.from_regex(r"[a-z]{1,8}@[a-z]{1,8}\.com", fullmatch=True)


@st.composite
def urls(draw):
    scheme = draw(_schemes)
    if scheme == "mailto":
        return "mailto:" + draw(_mailboxes)
    host = draw(_hosts)
    path = draw(_paths)
    query = draw(_queries)
    url = f"{scheme}://{host}{path}"
    if query:
        url += f"?{query}"
    return url


@given(urls())
@settings(max_examples=200)
def test_classification_is_total_and_deterministic(url):
    kind, stream = classify_link(url)
    assert kind in LinkKind
    assert (kind == LinkKind.STREAM) == (stream is not None)
    assert classify_link(url) == (kind, stream)


@given(urls())
@settings(max_examples=200)
def test_canonicalize_idempotent(url):
    kind, _ = classify_link(url)
    once = canonicalize(url, kind)
    assert canonicalize(once, kind) == once


@given(_hosts, _paths, _queries)
@settings(max_examples=100)
def test_image_keys_ignore_query(host, path, query):
    base = f"http://{host}{path or '/'}cam.jpg"
    with_query = f"{base}?{query}" if query else base
    assert canonicalize(with_query, LinkKind.IMAGE) == canonicalize(base, LinkKind.IMAGE)
