"""Similarity measures and the similarity-to-distance transform d = 1 - s.

Text measures (bleu, rouge_l) are directed: the candidate is always the
re-generated sample and the reference is the input it was produced from.
Image and vector measures are symmetric.  Every measure returns 0 for
identical inputs (up to 1e-12) and is finite and non-negative.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, IO

import numpy as np

from .errors import (
    EmptySample,
    InvalidParameters,
    LengthMismatch,
    WindowTooLarge,
    ZeroVector,
)
from .samples import ImageSample, Sample, TextSample, VectorSample, require_same_shape

BLEU_EPSILON = 1e-9
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2


def _ngram_counts(tokens: tuple[str, ...], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_distance(candidate: TextSample, reference: TextSample, max_n: int = 4) -> float:
    """1 - BLEU with add-epsilon smoothing on zero n-gram match counts.

    BLEU is the brevity penalty times the geometric mean of modified n-gram
    precisions over the effective orders n = 1..max_n (orders for which the
    candidate has at least one n-gram; shorter sentences simply use fewer
    orders, so identical short sentences still score distance 0).  An order
    with zero matches contributes epsilon / total instead of zero.
    """
    if max_n < 1:
        raise InvalidParameters("max_n must be >= 1")
    if len(candidate.tokens) == 0 or len(reference.tokens) == 0:
        raise EmptySample("bleu_distance requires non-empty candidate and reference")

    log_sum = 0.0
    orders = 0
    for n in range(1, max_n + 1):
        cand = _ngram_counts(candidate.tokens, n)
        ref = _ngram_counts(reference.tokens, n)
        total = sum(cand.values())
        if total == 0:
            continue
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        precision = matches / total if matches > 0 else BLEU_EPSILON / total
        log_sum += math.log(precision)
        orders += 1

    c, r = len(candidate.tokens), len(reference.tokens)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    bleu = brevity * math.exp(log_sum / orders)
    return 1.0 - min(bleu, 1.0)


def rouge_l_distance(candidate: TextSample, reference: TextSample) -> float:
    """1 - F1 of the longest common subsequence; 1.0 when there is no overlap."""
    if len(candidate.tokens) == 0 or len(reference.tokens) == 0:
        raise EmptySample("rouge_l_distance requires non-empty candidate and reference")

    a, b = candidate.tokens, reference.tokens
    # Two-row LCS dynamic program.
    prev = [0] * (len(b) + 1)
    for tok_a in a:
        cur = [0]
        for j, tok_b in enumerate(b, start=1):
            if tok_a == tok_b:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(cur[j - 1], prev[j]))
        prev = cur
    lcs = prev[-1]
    if lcs == 0:
        return 1.0
    precision = lcs / len(a)
    recall = lcs / len(b)
    f1 = 2.0 * precision * recall / (precision + recall)
    return 1.0 - f1


def mse_distance(a: ImageSample, b: ImageSample) -> float:
    """Mean squared intensity difference on the raw [0, 255] scale."""
    require_same_shape(a, b)
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    return float(np.mean(diff * diff))


def ssim_distance(a: ImageSample, b: ImageSample, window: int = 8) -> float:
    """1 - mean structural similarity over non-overlapping window tiles.

    Tiles are evaluated per channel with population moments, then averaged;
    edge remainders that do not fill a full window are dropped.  SSIM lies
    in [-1, 1], so the distance lies in [0, 2].
    """
    require_same_shape(a, b)
    if window < 1:
        raise InvalidParameters("window must be >= 1")
    if a.height < window or a.width < window:
        raise WindowTooLarge(f"{window}x{window} window exceeds {a.height}x{a.width} image")

    rows = a.height // window
    cols = a.width // window
    x = a.pixels[: rows * window, : cols * window].astype(np.float64)
    y = b.pixels[: rows * window, : cols * window].astype(np.float64)
    # (rows, cols, C, window*window) tile stacks.
    x = x.reshape(rows, window, cols, window, -1).transpose(0, 2, 4, 1, 3).reshape(rows, cols, -1, window * window)
    y = y.reshape(rows, window, cols, window, -1).transpose(0, 2, 4, 1, 3).reshape(rows, cols, -1, window * window)

    mu_x = x.mean(axis=-1)
    mu_y = y.mean(axis=-1)
    var_x = x.var(axis=-1)
    var_y = y.var(axis=-1)
    cov = ((x - mu_x[..., None]) * (y - mu_y[..., None])).mean(axis=-1)

    ssim = ((2 * mu_x * mu_y + SSIM_C1) * (2 * cov + SSIM_C2)) / (
        (mu_x**2 + mu_y**2 + SSIM_C1) * (var_x + var_y + SSIM_C2)
    )
    return 1.0 - float(ssim.mean())


def vector_distance(a: VectorSample, b: VectorSample, kind: str = "euclidean") -> float:
    if len(a.values) != len(b.values):
        raise LengthMismatch(f"vector lengths differ: {len(a.values)} vs {len(b.values)}")
    if kind == "euclidean":
        return float(np.linalg.norm(a.values - b.values))
    if kind == "cosine":
        norm_a = float(np.linalg.norm(a.values))
        norm_b = float(np.linalg.norm(b.values))
        if norm_a == 0.0 or norm_b == 0.0:
            raise ZeroVector("cosine distance is undefined for zero vectors")
        sim = float(np.dot(a.values, b.values)) / (norm_a * norm_b)
        return 1.0 - sim
    raise InvalidParameters(f"unknown vector distance kind: {kind!r}")


@dataclass(frozen=True)
class DistanceMetric:
    """A named distance with fixed parameters and a fixed argument order.

    ``distance(candidate, reference)``: the candidate is the re-generated
    sample, the reference the sample it was produced from.
    """

    id: str
    modality: str
    fn: Callable[[Sample, Sample], float]

    def distance(self, candidate: Sample, reference: Sample) -> float:
        if candidate.modality != self.modality or reference.modality != self.modality:
            raise InvalidParameters(
                f"metric {self.id!r} expects {self.modality} samples, got "
                f"{candidate.modality}/{reference.modality}"
            )
        return self.fn(candidate, reference)


def get_metric(metric_id: str, parameters: dict | None = None) -> DistanceMetric:
    """Resolve a built-in metric id to a configured DistanceMetric.

    Bridge-served metrics (``bridge:<name>``) are wired up by the experiment
    layer, which owns the endpoint; they are rejected here.
    """
    params = parameters or {}
    if metric_id == "bleu":
        max_n = int(params.get("max_n", 4))
        return DistanceMetric("bleu", "text", lambda c, r: bleu_distance(c, r, max_n))
    if metric_id == "rouge_l":
        return DistanceMetric("rouge_l", "text", rouge_l_distance)
    if metric_id == "mse":
        return DistanceMetric("mse", "image", mse_distance)
    if metric_id == "ssim":
        window = int(params.get("window", 8))
        return DistanceMetric("ssim", "image", lambda a, b: ssim_distance(a, b, window))
    if metric_id in ("euclidean", "cosine"):
        kind = metric_id
        return DistanceMetric(kind, "vector", lambda a, b: vector_distance(a, b, kind))
    raise InvalidParameters(f"unknown metric id: {metric_id!r}")


METRICS_FOR_MODALITY = {
    "text": ("bleu", "rouge_l"),
    "image": ("mse", "ssim"),
    "vector": ("euclidean", "cosine"),
}

# MSE has no bounded similarity form, so it feeds convergence curves only.
VERIFICATION_METRICS = {"bleu", "rouge_l", "ssim", "euclidean", "cosine"}


@dataclass(frozen=True)
class DistanceRecord:
    metric_id: str
    sample_ref: str
    generator_id: str
    iteration_k: int
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"distance must be finite and >= 0, got {self.value}")
        if self.iteration_k < 0:
            raise ValueError("iteration_k must be >= 0")


DISTANCE_CSV_HEADER = ["metric", "sample", "generator", "k", "value"]


def write_distance_records(stream: IO[str], records: list[DistanceRecord]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(DISTANCE_CSV_HEADER)
    for rec in records:
        writer.writerow([rec.metric_id, rec.sample_ref, rec.generator_id, rec.iteration_k, repr(rec.value)])
