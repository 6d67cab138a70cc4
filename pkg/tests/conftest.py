import numpy as np
import pytest

from regenmark.samples import ImageSample, TextSample, VectorSample
from regenmark.seeding import SeedSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_text(rng, length, vocab=("a", "b", "c", "d", "e", "f")):
    return TextSample(tuple(vocab[i] for i in rng.integers(0, len(vocab), size=length)))


def random_image(rng, height=8, width=8, channels=1):
    return ImageSample(rng.integers(0, 256, size=(height, width, channels)).astype(np.uint8))


def random_vector(rng, dim=16, scale=10.0):
    return VectorSample(rng.uniform(-scale, scale, size=dim))


@pytest.fixture
def seed():
    return SeedSpec(42)
