import numpy as np
import pytest

from l1pph.imaging import (
    BadBlockCount,
    Image,
    ParseError,
    adjust,
    default_threshold,
    dump_image,
    dump_raw_vector,
    load_image,
    load_raw_vector,
    mean_luminance,
    plan_blocks,
    read_image,
    split_blocks,
    timing_block,
    write_image,
)


def test_pgm_round_trip(tmp_path):
    img = Image.from_array(np.arange(12, dtype=np.uint8).reshape(3, 4))
    path = tmp_path / "a.pgm"
    write_image(path, img)
    back = read_image(path)
    assert back == img and back.n == 12 and back.channels == 1


def test_ppm_flattening_is_row_major_interleaved():
    arr = np.arange(2 * 2 * 3, dtype=np.uint8).reshape(2, 2, 3)
    img = load_image(dump_image(Image.from_array(arr)))
    assert img.channels == 3 and img.n == 12
    assert img.vector().tolist() == list(range(12))
    assert np.array_equal(img.array(), arr)


def test_header_comments_and_whitespace():
    buf = b"P5\n# made by hand\n2 1 # trailing\n255\n\x07\x09"
    img = load_image(buf)
    assert (img.width, img.height) == (2, 1)
    assert img.vector().tolist() == [7, 9]


@pytest.mark.parametrize(
    "buf",
    [
        b"P2\n1 1\n255\n1",
        b"P5\n2 2\n255\n\x00\x00\x00",
        b"P5\n1 1\n65535\n\x00\x00",
        b"P5\n1 1\n",
        b"P5\nx 1\n255\n\x00",
        b"P5\n0 1\n255\n",
    ],
)
def test_malformed_inputs(buf):
    with pytest.raises(ParseError):
        load_image(buf)


def test_raw_vector_round_trip():
    text = dump_raw_vector([1, 0, 255, 7], 256)
    q, x = load_raw_vector(text)
    assert q == 256 and x.tolist() == [1, 0, 255, 7]
    with pytest.raises(ParseError):
        load_raw_vector("3 4\n1 2")
    with pytest.raises(ParseError):
        load_raw_vector("2 4\n1 4")


def test_block_plan_covers_and_pads():
    x = np.arange(10)
    plan, blocks = split_blocks(x, 3, 9)
    assert (plan.n_B, plan.pad_len, plan.t_B) == (4, 2, 3)
    assert [b.tolist() for b in blocks] == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 0, 0]]
    assert plan.join(blocks).tolist() == x.tolist()


def test_block_plan_edges():
    plan = plan_blocks(784, 1, 2007)
    assert (plan.n_B, plan.t_B, plan.pad_len) == (784, 2007, 0)
    assert plan_blocks(5, 5, 5).n_B == 1
    with pytest.raises(BadBlockCount):
        plan_blocks(5, 0, 5)
    with pytest.raises(BadBlockCount):
        plan_blocks(5, 6, 10)
    with pytest.raises(BadBlockCount):
        plan_blocks(10, 4, 3)
    with pytest.raises(BadBlockCount):
        plan_blocks(10, 6, 12)  # 6 blocks of 2 would leave the last one empty


def test_block_params_balanced():
    prm = plan_blocks(784, 1, 2007).params()
    assert (prm.t_plus, prm.t_minus, prm.delta) == (1004, 1003, 3)


@pytest.mark.parametrize(
    "n,B,expected",
    [(150528, 1000, (150, 384)), (49152, 100, (491, 1256)), (12288, 100, (122, 312)),
     (2352, 10, (235, 601)), (784, 1, (784, 2007))],
)
def test_timing_grid_blocks(n, B, expected):
    assert timing_block(n, B) == expected


def test_default_threshold():
    assert default_threshold(256, 784) == 2008
    assert default_threshold(256, 100) == 256


def test_brightness_and_contrast():
    img = Image.from_array(np.array([[0, 100], [200, 255]], dtype=np.uint8))
    assert adjust(img, "brightness", 1.0) is img
    assert adjust(img, "brightness", 0.5).vector().tolist() == [0, 50, 100, 128]
    assert adjust(img, "brightness", 2.0).vector().tolist() == [0, 200, 255, 255]
    mu = mean_luminance(img)
    assert mu == pytest.approx(138.75)
    assert adjust(img, "contrast", 0.0).vector().tolist() == [139] * 4
    with pytest.raises(ValueError):
        adjust(img, "gamma", 1.2)
    with pytest.raises(ValueError):
        adjust(img, "brightness", -1)


def test_rgb_luminance():
    arr = np.zeros((1, 1, 3), dtype=np.uint8)
    arr[0, 0] = (255, 0, 0)
    assert mean_luminance(Image.from_array(arr)) == pytest.approx(0.299 * 255)


def test_image_validation():
    with pytest.raises(ValueError):
        Image(2, 2, 2, np.zeros(8))
    with pytest.raises(ValueError):
        Image(2, 2, 1, np.zeros(3))
    with pytest.raises(ValueError):
        Image.from_array(np.zeros((2, 2, 4)))
