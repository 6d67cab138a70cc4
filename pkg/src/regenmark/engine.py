"""Stage I: iterative re-generation.

Starting from an initial sample, the engine applies the generator K times,
recording the distance between consecutive iterates for every configured
metric.  For a contraction with factor L the k-th step distance is bounded
by L^(k-1) times the first, so these traces carry the convergence evidence
the verification stage relies on.

Images support three re-generation modes:

* full        -- every pixel re-generated in one pass;
* watermark   -- a fixed mask (1/N of the pixels) re-generated each pass;
* fingerprint -- the pixel grid is partitioned into T segments, each segment
                 re-generated with the rest of the original image as context,
                 and the passes merged position-wise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameters, PlanMismatch, TooManySegments
from .generators.base import Generator
from .metrics import DistanceMetric
from .samples import (
    ImageSample,
    PixelMask,
    Sample,
    dumps_canonical,
    read_sample,
    write_sample,
)
from .seeding import SeedSpec, derive_seed


@dataclass(frozen=True)
class SegmentationPlan:
    """Balanced partition of all pixel positions into ``num_segments`` sets."""

    num_segments: int
    assignment: dict[tuple[int, int], int]
    image_shape: tuple[int, int]

    def masks(self) -> list[PixelMask]:
        buckets: list[set[tuple[int, int]]] = [set() for _ in range(self.num_segments)]
        for pos, seg in self.assignment.items():
            buckets[seg].add(pos)
        return [PixelMask(frozenset(b), self.image_shape) for b in buckets]

    def validate_against(self, image: ImageSample) -> None:
        if (image.height, image.width) != tuple(self.image_shape):
            raise PlanMismatch(
                f"segmentation built for {self.image_shape}, image is "
                f"{(image.height, image.width)}"
            )


@dataclass(frozen=True)
class WatermarkPlan:
    """A frozen mask covering floor(H*W/N) pixel positions."""

    n: int
    mask: PixelMask

    def validate_against(self, image: ImageSample) -> None:
        try:
            self.mask.validate_against(image)
        except Exception as exc:
            raise PlanMismatch(str(exc)) from exc


@dataclass(frozen=True)
class RegenMode:
    """Which re-generation rule one iteration step applies."""

    kind: str = "full"  # full | watermark | fingerprint
    watermark: WatermarkPlan | None = None
    segmentation: SegmentationPlan | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("full", "watermark", "fingerprint"):
            raise InvalidParameters(f"unknown regen mode {self.kind!r}")
        if self.kind == "watermark" and self.watermark is None:
            raise InvalidParameters("watermark mode requires a WatermarkPlan")
        if self.kind == "fingerprint" and self.segmentation is None:
            raise InvalidParameters("fingerprint mode requires a SegmentationPlan")


FULL_MODE = RegenMode("full")


@dataclass
class RegenTrace:
    """The iterate sequence x^<0>..x^<K> plus per-metric step distances."""

    generator_id: str
    samples: list[Sample]
    step_distances: dict[str, list[float]] = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.samples) - 1

    def final(self) -> Sample:
        return self.samples[-1]


def make_segmentation(
    height: int, width: int, num_segments: int, scheme: str = "striped", seed: SeedSpec | None = None
) -> SegmentationPlan:
    """Partition the H x W grid into segments whose sizes differ by at most 1.

    ``striped`` slices the row-major pixel order into contiguous runs;
    ``seeded-random`` slices a seeded permutation of it.
    """
    if num_segments < 2:
        raise InvalidParameters("num_segments must be >= 2")
    total = height * width
    if num_segments > total:
        raise TooManySegments(f"{num_segments} segments for {total} pixels")
    order = np.arange(total)
    if scheme == "seeded-random":
        if seed is None:
            raise InvalidParameters("seeded-random scheme requires a seed")
        order = seed.derive("segmentation").rng().permutation(total)
    elif scheme != "striped":
        raise InvalidParameters(f"unknown segmentation scheme {scheme!r}")

    base, extra = divmod(total, num_segments)
    assignment: dict[tuple[int, int], int] = {}
    cursor = 0
    for seg in range(num_segments):
        size = base + (1 if seg < extra else 0)
        for flat in order[cursor : cursor + size]:
            assignment[(int(flat) // width, int(flat) % width)] = seg
        cursor += size
    return SegmentationPlan(num_segments, assignment, (height, width))


def make_watermark(height: int, width: int, n: int, seed: SeedSpec) -> WatermarkPlan:
    """Draw floor(H*W/n) mask positions once; they stay fixed for the run."""
    if n < 2:
        raise InvalidParameters("watermark divisor n must be >= 2")
    total = height * width
    count = total // n
    flat = seed.derive("watermark").rng().choice(total, size=count, replace=False)
    positions = frozenset((int(f) // width, int(f) % width) for f in flat)
    return WatermarkPlan(n, PixelMask(positions, (height, width)))


def regenerate_watermark(
    generator: Generator, x: ImageSample, plan: WatermarkPlan, seed: SeedSpec
) -> ImageSample:
    """One inpainting pass over the frozen watermark mask."""
    plan.validate_against(x)
    return generator.regenerate_masked(x, plan.mask, seed)


def regenerate_fingerprint(
    generator: Generator, x: ImageSample, plan: SegmentationPlan, seed: SeedSpec
) -> ImageSample:
    """Re-generate each segment against the original image, then merge.

    Every segment pass conditions on the pre-iteration image (not on other
    segments' reconstructions), so passes are order-independent; the merge
    takes each position's value from its own segment's pass.
    """
    plan.validate_against(x)
    merged = np.array(x.pixels, copy=True)
    for seg_index, mask in enumerate(plan.masks()):
        regenerated = generator.regenerate_masked(x, mask, derive_seed(seed, seg_index))
        rows, cols = mask.index_arrays()
        merged[rows, cols, :] = regenerated.pixels[rows, cols, :]
    return ImageSample(merged)


def one_step_regenerate(generator: Generator, x: Sample, mode: RegenMode, seed: SeedSpec) -> Sample:
    """Apply one re-generation step in the given mode."""
    if x.modality != "image" or mode.kind == "full":
        return generator.regenerate(x, seed)
    if mode.kind == "watermark":
        return regenerate_watermark(generator, x, mode.watermark, seed)
    return regenerate_fingerprint(generator, x, mode.segmentation, seed)


def iterate_regenerate(
    generator: Generator,
    x0: Sample,
    iterations: int,
    metrics: list[DistanceMetric],
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
) -> RegenTrace:
    """Run Stage I: x^<k> = regenerate(x^<k-1>) for k = 1..iterations.

    Step k is seeded from derive_seed(seed, k).  Distances are computed as
    each iterate is produced, so callers may discard intermediates.
    """
    if iterations < 0:
        raise InvalidParameters("iterations must be >= 0")
    generator.check_modality(x0)
    trace = RegenTrace(generator.id, [x0], {m.id: [] for m in metrics})
    current = x0
    for k in range(1, iterations + 1):
        following = one_step_regenerate(generator, current, mode, derive_seed(seed, k))
        for metric in metrics:
            trace.step_distances[metric.id].append(metric.distance(following, current))
        trace.samples.append(following)
        current = following
    return trace


# --- trace persistence -------------------------------------------------------


def save_trace(directory: str | Path, trace: RegenTrace, seed: SeedSpec) -> list[Path]:
    """Persist a trace as canonical sample files plus a JSON manifest.

    Returns the written paths (manifest last) for digest bookkeeping.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for k, sample in enumerate(trace.samples):
        path = directory / f"iter_{k:03d}.json"
        write_sample(path, sample)
        written.append(path)
    manifest = {
        "generator_id": trace.generator_id,
        "iterations": trace.iterations,
        "seed": {"master_seed": seed.master_seed, "stream_labels": list(seed.stream_labels)},
        "samples": [p.name for p in written],
        "step_distances": trace.step_distances,
    }
    manifest_path = directory / "trace.json"
    manifest_path.write_text(dumps_canonical(manifest), encoding="utf-8", newline="")
    written.append(manifest_path)
    return written


def load_trace(directory: str | Path) -> RegenTrace:
    directory = Path(directory)
    manifest = json.loads((directory / "trace.json").read_text(encoding="utf-8"))
    samples = [read_sample(directory / name) for name in manifest["samples"]]
    return RegenTrace(
        manifest["generator_id"],
        samples,
        {m: list(v) for m, v in manifest["step_distances"].items()},
    )
