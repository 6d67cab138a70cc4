"""Content model: the universal sample unit and its canonical file format.

A sample is one of three modalities:

* text   -- an ordered sequence of unicode tokens (whitespace-split words),
* image  -- an 8-bit intensity grid of shape (height, width, channels),
* vector -- a finite float64 array.

Samples are immutable after construction and safe to share across workers.
The canonical file format is a single JSON document per sample; image pixels
travel as base64 of the row-major bytes so round trips are bit-exact.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import EmptySample, MaskOutOfBounds, ShapeMismatch


@dataclass(frozen=True, eq=False)
class TextSample:
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            if not isinstance(tok, str) or tok == "":
                raise ValueError("text tokens must be non-empty strings")

    modality = "text"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TextSample) and self.tokens == other.tokens

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    @staticmethod
    def from_string(text: str) -> "TextSample":
        """Whitespace-split ingestion; the project performs no subword splitting."""
        return TextSample(tuple(text.split()))

    def to_string(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True, eq=False)
class ImageSample:
    pixels: np.ndarray  # uint8, shape (H, W, C), read-only

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.integer) and arr.min(initial=0) >= 0 and arr.max(initial=0) <= 255:
                arr = arr.astype(np.uint8)
            else:
                raise ValueError("image pixels must be 8-bit intensities in [0, 255]")
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError("image pixels must have shape (height, width, channels)")
        if arr.shape[2] not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("height and width must be positive")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    modality = "image"

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.pixels.shape

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ImageSample)
            and self.shape == other.shape
            and np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class VectorSample:
    values: np.ndarray  # float64, read-only

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("vector values must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector values must be finite")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    modality = "vector"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VectorSample) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __len__(self) -> int:
        return len(self.values)


Sample = Union[TextSample, ImageSample, VectorSample]


@dataclass(frozen=True)
class PixelMask:
    """A set of (row, col) positions inside an image of a fixed shape."""

    positions: frozenset[tuple[int, int]]
    image_shape: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", frozenset(tuple(p) for p in self.positions))
        height, width = self.image_shape
        for row, col in self.positions:
            if not (0 <= row < height and 0 <= col < width):
                raise MaskOutOfBounds(f"position ({row}, {col}) outside {height}x{width} image")

    def __len__(self) -> int:
        return len(self.positions)

    def validate_against(self, image: ImageSample) -> None:
        if (image.height, image.width) != tuple(self.image_shape):
            raise MaskOutOfBounds(
                f"mask built for {self.image_shape}, image is {(image.height, image.width)}"
            )

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted (rows, cols) index arrays for vectorized assignment."""
        if not self.positions:
            empty = np.empty(0, dtype=np.intp)
            return empty, empty
        pos = np.array(sorted(self.positions), dtype=np.intp)
        return pos[:, 0], pos[:, 1]

    def boolean(self) -> np.ndarray:
        grid = np.zeros(self.image_shape, dtype=bool)
        rows, cols = self.index_arrays()
        grid[rows, cols] = True
        return grid


# --- canonical JSON format ------------------------------------------------


def sample_to_dict(sample: Sample) -> dict:
    if isinstance(sample, TextSample):
        return {"modality": "text", "tokens": list(sample.tokens)}
    if isinstance(sample, ImageSample):
        return {
            "modality": "image",
            "height": sample.height,
            "width": sample.width,
            "channels": sample.channels,
            "pixels_b64": base64.b64encode(sample.pixels.tobytes()).decode("ascii"),
        }
    if isinstance(sample, VectorSample):
        return {"modality": "vector", "values": [float(v) for v in sample.values]}
    raise TypeError(f"not a sample: {type(sample)!r}")


def sample_from_dict(doc: dict) -> Sample:
    modality = doc.get("modality")
    if modality == "text":
        return TextSample(tuple(doc["tokens"]))
    if modality == "image":
        height, width, channels = int(doc["height"]), int(doc["width"]), int(doc["channels"])
        raw = base64.b64decode(doc["pixels_b64"])
        if len(raw) != height * width * channels:
            raise ValueError("pixel payload length does not match height*width*channels")
        arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, channels)
        return ImageSample(arr)
    if modality == "vector":
        return VectorSample(np.array(doc["values"], dtype=np.float64))
    raise ValueError(f"unknown modality: {modality!r}")


def dumps_canonical(doc: dict) -> str:
    """Canonical JSON: sorted keys, no whitespace, trailing newline."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_sample(path: str | Path, sample: Sample) -> None:
    Path(path).write_text(dumps_canonical(sample_to_dict(sample)), encoding="utf-8", newline="")


def read_sample(path: str | Path) -> Sample:
    return sample_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --- PGM/PPM import ---------------------------------------------------------


def read_pnm(path: str | Path) -> ImageSample:
    """Import an 8-bit PGM (P2/P5) or PPM (P3/P6) image.

    Supports maxval up to 255 only; used for bringing user-supplied natural
    images into the canonical pipeline.
    """
    data = Path(path).read_bytes()
    magic = data[:2].decode("ascii", errors="replace")
    if magic not in ("P2", "P3", "P5", "P6"):
        raise ValueError(f"unsupported PNM magic {magic!r}")
    channels = 3 if magic in ("P3", "P6") else 1

    # Header: magic, width, height, maxval; '#' comments allowed between tokens.
    tokens: list[bytes] = []
    idx = 2
    while len(tokens) < 3:
        while idx < len(data) and data[idx : idx + 1].isspace():
            idx += 1
        if idx < len(data) and data[idx : idx + 1] == b"#":
            while idx < len(data) and data[idx : idx + 1] != b"\n":
                idx += 1
            continue
        start = idx
        while idx < len(data) and not data[idx : idx + 1].isspace():
            idx += 1
        tokens.append(data[start:idx])
    width, height, maxval = (int(t) for t in tokens)
    if maxval > 255:
        raise ValueError("only 8-bit PNM images are supported")

    count = width * height * channels
    if magic in ("P5", "P6"):
        idx += 1  # single whitespace byte after maxval
        raw = data[idx : idx + count]
        if len(raw) != count:
            raise ValueError("truncated PNM payload")
        arr = np.frombuffer(raw, dtype=np.uint8)
    else:
        values = data[idx:].split()
        if len(values) < count:
            raise ValueError("truncated PNM payload")
        arr = np.array([int(v) for v in values[:count]], dtype=np.uint8)
    return ImageSample(arr.reshape(height, width, channels))


def require_same_shape(a: ImageSample, b: ImageSample) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"image shapes differ: {a.shape} vs {b.shape}")


def require_non_empty(sample: TextSample) -> None:
    if len(sample.tokens) == 0:
        raise EmptySample("operation requires a non-empty token sequence")
