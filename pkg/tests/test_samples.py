import numpy as np
import pytest
from hypothesis import given, strategies as st

from regenmark.errors import MaskOutOfBounds
from regenmark.samples import (
    ImageSample,
    PixelMask,
    TextSample,
    VectorSample,
    read_pnm,
    read_sample,
    sample_from_dict,
    sample_to_dict,
    write_sample,
)


def test_text_rejects_empty_tokens():
    with pytest.raises(ValueError):
        TextSample(("ok", ""))


def test_empty_sequence_is_allowed_as_explicit_degenerate_value():
    assert len(TextSample(())) == 0


def test_image_shape_and_range_validation():
    with pytest.raises(ValueError):
        ImageSample(np.zeros((4, 4, 2), dtype=np.uint8))  # 2 channels
    with pytest.raises(ValueError):
        ImageSample(np.full((2, 2, 1), 300, dtype=np.int32))


def test_vector_rejects_non_finite():
    with pytest.raises(ValueError):
        VectorSample(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        VectorSample(np.array([np.inf]))


def test_samples_are_immutable():
    image = ImageSample(np.zeros((2, 2, 1), dtype=np.uint8))
    with pytest.raises(ValueError):
        image.pixels[0, 0, 0] = 1
    vector = VectorSample(np.array([1.0]))
    with pytest.raises(ValueError):
        vector.values[0] = 2.0


def test_mask_bounds_checked():
    with pytest.raises(MaskOutOfBounds):
        PixelMask(frozenset({(2, 0)}), (2, 2))
    mask = PixelMask(frozenset({(0, 0), (1, 1)}), (2, 2))
    assert len(mask) == 2


@given(st.lists(st.text(alphabet="abcxyz", min_size=1, max_size=6), max_size=12))
def test_text_round_trip(tokens):
    sample = TextSample(tuple(tokens))
    assert sample_from_dict(sample_to_dict(sample)) == sample


@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from([1, 3]), st.integers(0, 2**32 - 1))
def test_image_round_trip(height, width, channels, seed):
    rng = np.random.default_rng(seed)
    sample = ImageSample(rng.integers(0, 256, size=(height, width, channels)).astype(np.uint8))
    assert sample_from_dict(sample_to_dict(sample)) == sample


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=8))
def test_vector_round_trip_is_bit_exact(values):
    sample = VectorSample(np.array(values, dtype=np.float64))
    restored = sample_from_dict(sample_to_dict(sample))
    assert restored.values.tobytes() == sample.values.tobytes()


def test_file_round_trip(tmp_path, rng):
    samples = [
        TextSample(("storm", "at", "sea")),
        ImageSample(rng.integers(0, 256, size=(5, 7, 3)).astype(np.uint8)),
        VectorSample(rng.normal(size=9)),
    ]
    for i, sample in enumerate(samples):
        path = tmp_path / f"s{i}.json"
        write_sample(path, sample)
        assert read_sample(path) == sample
        # Re-serialization is byte-identical (canonical format).
        data = path.read_bytes()
        write_sample(path, read_sample(path))
        assert path.read_bytes() == data


def test_pnm_import(tmp_path):
    pgm = tmp_path / "a.pgm"
    pgm.write_bytes(b"P5\n# comment\n3 2\n255\n" + bytes([0, 10, 20, 30, 40, 250]))
    image = read_pnm(pgm)
    assert image.shape == (2, 3, 1)
    assert image.pixels[1, 2, 0] == 250

    ppm_ascii = tmp_path / "b.ppm"
    ppm_ascii.write_bytes(b"P3\n2 1\n255\n1 2 3  4 5 6\n")
    color = read_pnm(ppm_ascii)
    assert color.shape == (1, 2, 3)
    assert list(color.pixels[0, 1]) == [4, 5, 6]
