"""Robustness battery: content perturbations and the cross-model paraphrase.

Perturbations model a malicious user editing content before it is disputed:
random word substitution for text, additive Gaussian noise and brightness
scaling for images.  Each touches exactly the contracted number of sites
and leaves everything else bit-identical; a rate of zero (or factor 1,
sigma 0) is the identity.

The paraphrase attack re-generates authentic content once with a second
model, producing content both models have shaped.
"""

from __future__ import annotations

import numpy as np

from .analysis import DensityReport, rank_auc
from .engine import FULL_MODE, RegenMode, one_step_regenerate
from .errors import EmptyCorpus, EmptySample, InvalidParameters
from .generators.base import Generator
from .generators.synthetic import round_half_away
from .metrics import DistanceMetric
from .samples import ImageSample, Sample, TextSample
from .seeding import SeedSpec


def perturb_text(x: TextSample, rate: float, vocabulary: tuple[str, ...], seed: SeedSpec) -> TextSample:
    """Replace round(rate * len) distinct positions with random vocabulary words."""
    if not 0.0 <= rate <= 1.0:
        raise InvalidParameters("rate must lie in [0, 1]")
    if not vocabulary:
        raise InvalidParameters("vocabulary must be non-empty")
    if len(x.tokens) == 0:
        raise EmptySample("perturb_text requires a non-empty sample")
    count = int(round(rate * len(x.tokens)))
    if count == 0:
        return x
    rng = seed.rng()
    positions = rng.choice(len(x.tokens), size=count, replace=False)
    tokens = list(x.tokens)
    for pos in positions:
        tokens[pos] = vocabulary[rng.integers(len(vocabulary))]
    return TextSample(tuple(tokens))


def _pick_pixel_sites(x: ImageSample, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    total = x.height * x.width
    count = int(round(fraction * total))
    flat = rng.choice(total, size=count, replace=False)
    return flat // x.width, flat % x.width


def perturb_gaussian(
    x: ImageSample, fraction: float, mu: float = 0.0, sigma: float = 4.0, seed: SeedSpec | None = None
) -> ImageSample:
    """Add Normal(mu, sigma^2) noise, per channel, at a random fraction of pixel sites."""
    if not 0.0 <= fraction <= 1.0:
        raise InvalidParameters("fraction must lie in [0, 1]")
    if sigma < 0:
        raise InvalidParameters("sigma must be >= 0")
    if fraction == 0.0 or (sigma == 0.0 and mu == 0.0):
        return x
    rng = (seed or SeedSpec(0)).rng()
    rows, cols = _pick_pixel_sites(x, fraction, rng)
    if len(rows) == 0:
        return x
    out = np.array(x.pixels, copy=True)
    noise = rng.normal(mu, sigma, size=(len(rows), x.channels))
    shifted = out[rows, cols, :].astype(np.float64) + noise
    out[rows, cols, :] = np.clip(round_half_away(shifted), 0, 255).astype(np.uint8)
    return ImageSample(out)


def perturb_brightness(
    x: ImageSample, fraction: float = 0.1, factor: float = 1.0, seed: SeedSpec | None = None
) -> ImageSample:
    """Scale the channels of a random fraction of pixel sites by ``factor``."""
    if not 0.0 <= fraction <= 1.0:
        raise InvalidParameters("fraction must lie in [0, 1]")
    if factor <= 0:
        raise InvalidParameters("factor must be > 0")
    if fraction == 0.0 or factor == 1.0:
        return x
    rng = (seed or SeedSpec(0)).rng()
    rows, cols = _pick_pixel_sites(x, fraction, rng)
    if len(rows) == 0:
        return x
    out = np.array(x.pixels, copy=True)
    scaled = out[rows, cols, :].astype(np.float64) * factor
    out[rows, cols, :] = np.clip(round_half_away(scaled), 0, 255).astype(np.uint8)
    return ImageSample(out)


def paraphrase_attack(
    x: Sample, paraphraser: Generator, seed: SeedSpec, mode: RegenMode = FULL_MODE
) -> Sample:
    """One full re-generation pass by a second model over finished content."""
    paraphraser.check_modality(x)
    return one_step_regenerate(paraphraser, x, mode, seed.derive("paraphrase"))


def natural_vs_generated(
    natural: list[Sample],
    generated: list[Sample],
    generator: Generator,
    metric: DistanceMetric,
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
    bins: int = 20,
) -> DensityReport:
    """One-step distances for natural vs model-generated corpora under one model.

    The AUC entry scores how separable the generated distances (expected
    low) are from the natural ones (expected high).
    """
    if not natural or not generated:
        raise EmptyCorpus("both corpora must be non-empty")
    series: dict[str, list[float]] = {"generated": [], "natural": []}
    for label, corpus in (("generated", generated), ("natural", natural)):
        for i, x in enumerate(corpus):
            y = one_step_regenerate(generator, x, mode, seed.derive(label).derive(i))
            series[label].append(metric.distance(y, x))
    pooled = np.concatenate([np.asarray(v) for v in series.values()])
    edges = np.histogram_bin_edges(pooled, bins=bins)
    auc = {"natural": rank_auc(series["generated"], series["natural"])}
    return DensityReport(metric.id, 0, series, [float(e) for e in edges], auc)
