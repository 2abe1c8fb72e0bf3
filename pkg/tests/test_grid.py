import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from hzspf.grid import ImageError, as_field, load_image, mask_boundary, mask_from_phi, save_image, save_mask


def write_pgm(path, pixels, maxval=255, magic=b"P5"):
    pixels = np.asarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    path.write_bytes(magic + b"\n%d %d\n%d\n" % (w, h, maxval) + pixels.tobytes())
    return path


def test_load_all_white(tmp_path):
    f = load_image(write_pgm(tmp_path / "a.pgm", np.full((3, 3), 255)))
    assert f.shape == (3, 3) and f.dtype == np.float64 and np.all(f == 1.0)


def test_load_all_black(tmp_path):
    assert np.all(load_image(write_pgm(tmp_path / "a.pgm", np.zeros((3, 3)))) == 0.0)


def test_load_too_small(tmp_path):
    with pytest.raises(ImageError, match="at least"):
        load_image(write_pgm(tmp_path / "a.pgm", np.zeros((2, 2))))


def test_load_header_with_comment(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# made by hand\n4 3\n255\n" + bytes(range(12)))
    f = load_image(p)
    assert f.shape == (3, 4)
    assert f[2, 3] == pytest.approx(11 / 255)


def test_load_rejects_16bit(tmp_path):
    with pytest.raises(ImageError, match="maxval"):
        load_image(write_pgm(tmp_path / "a.pgm", np.zeros((4, 4)), maxval=65535))


def test_load_rejects_color_ppm(tmp_path):
    with pytest.raises(ImageError, match="P5"):
        load_image(write_pgm(tmp_path / "a.ppm", np.zeros((4, 12)), magic=b"P6"))


def test_load_rejects_truncated(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(ImageError, match="truncated"):
        load_image(p)


def test_load_missing_file_names_path(tmp_path):
    missing = tmp_path / "nope.pgm"
    with pytest.raises(ImageError, match="nope.pgm"):
        load_image(missing)


def test_load_unknown_format(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"hello world")
    with pytest.raises(ImageError, match="unsupported"):
        load_image(p)


def test_load_png_grayscale(tmp_path):
    px = np.arange(20, dtype=np.uint8).reshape(4, 5) * 10
    Image.fromarray(px, mode="L").save(tmp_path / "g.png")
    np.testing.assert_array_equal(load_image(tmp_path / "g.png"), px / 255.0)


def test_load_png_color_rejected(tmp_path):
    Image.new("RGB", (5, 5)).save(tmp_path / "c.png")
    with pytest.raises(ImageError, match="grayscale"):
        load_image(tmp_path / "c.png")


@pytest.mark.parametrize("value, byte", [(0.5, 128), (1.0, 255), (1.7, 255), (0.0, 0), (-0.3, 0)])
def test_save_rounding_and_clamp(tmp_path, value, byte):
    p = tmp_path / "o.pgm"
    save_image(np.full((3, 4), value), p)
    data = p.read_bytes()
    assert data.startswith(b"P5\n4 3\n255\n")
    assert set(data[len(b"P5\n4 3\n255\n"):]) == {byte}


@given(arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(3, 12)), elements=st.floats(0, 1)))
@settings(max_examples=40)
def test_round_trip_within_one_level(tmp_path_factory, field):
    p = tmp_path_factory.mktemp("rt") / "f.pgm"
    save_image(field, p)
    assert np.max(np.abs(load_image(p) - field)) <= 1 / 255 + 1e-15


def test_save_mask_values(tmp_path):
    m = np.zeros((3, 3), dtype=bool)
    m[1, 1] = True
    save_mask(m, tmp_path / "m.pgm")
    np.testing.assert_array_equal(load_image(tmp_path / "m.pgm"), m.astype(float))


def test_as_field_copies_and_validates():
    src = np.ones((3, 3), dtype=np.float32)
    f = as_field(src)
    assert f.dtype == np.float64 and f.flags.c_contiguous
    f[0, 0] = 5
    assert src[0, 0] == 1
    with pytest.raises(ValueError):
        as_field(np.ones(9))
    with pytest.raises(ValueError):
        as_field(np.array([[np.nan] * 3] * 3))


def test_mask_from_phi_examples():
    assert mask_from_phi(np.ones((3, 3))).all()
    assert not mask_from_phi(-np.ones((3, 3))).any()
    phi = -np.ones((3, 3))
    phi[0, 2] = 0.0
    m = mask_from_phi(phi)
    assert m[0, 2] and m.sum() == 1


@given(arrays(np.float64, (5, 6), elements=st.floats(-10, 10)))
def test_mask_complement_off_zero(phi):
    a, b = mask_from_phi(phi), mask_from_phi(-phi)
    nz = phi != 0
    assert np.array_equal(a[nz], ~b[nz])


def test_mask_boundary():
    m = np.zeros((5, 5), dtype=bool)
    m[1:4, 1:4] = True
    b = mask_boundary(m)
    expected = m.copy()
    expected[2, 2] = False
    np.testing.assert_array_equal(b, expected)
    # a full mask has no boundary: edge neighbors are replicated
    assert not mask_boundary(np.ones((4, 4), dtype=bool)).any()
