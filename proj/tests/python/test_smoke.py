import math

import pytest

import fwtriage


def test_window_entropy_limits():
    assert fwtriage.window_entropy(b"\x00" * 4096) == 0.0
    assert math.isclose(fwtriage.window_entropy(bytes(range(256))), 8.0)
    with pytest.raises(ValueError):
        fwtriage.window_entropy(b"")


def test_sparse_image_validates():
    img = fwtriage.sparse_image(1)
    assert img.size == 8 << 20
    verdict = fwtriage.validate([img, img])
    assert verdict["summary"] == "PASS/PASS/VALIDATED_FIRMWARE"
    assert verdict["layout_character"] == "SPARSE"


def test_scan_and_profile():
    img = fwtriage.sparse_image(1)
    hits = fwtriage.scan(img)
    assert hits[0].format == "UIMAGE"
    assert hits[0].offset == 0x90000
    assert hits[0].fields["image_name"] == "Linux-4.9.129"
    p = fwtriage.profile(img)
    assert len(p.window_entropies) == 2048
    assert 0.3 <= p.low_fraction <= 0.7


def test_bytes_round_trip_and_compare():
    img = fwtriage.erased_image(64 * 1024, 2, 3)
    copy = fwtriage.image_from_bytes(img.to_bytes(), model="copy")
    assert copy.sha256 == img.sha256
    assert fwtriage.compare(img, copy)["summary"] == "CONSISTENT"
    with pytest.raises(fwtriage.InsufficientDataError):
        fwtriage.profile(fwtriage.image_from_bytes(b"short"))


def test_rate_rendering():
    assert fwtriage.render_rate(5 / 8) == "~63%"
    assert fwtriage.render_rate(None) == "n/a"
