"""Stage II: authorship verification via the exceed-distance ratio.

The claimed-authentic generator and a contrast generator each re-generate
the disputed sample once; authorship is declared when the contrast model's
re-generation distance exceeds the authentic one by more than the margin:

    r = D(y_contrast, x) / D(y_authentic, x) > 1 + delta.

Corpus-level evaluation treats the authentic model's outputs as positives
and the contrast model's outputs as negatives for the same ordered pair,
yielding the precision/recall grid over (authentic, contrast) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import FULL_MODE, RegenMode, one_step_regenerate
from .errors import EmptyCorpus, InvalidParameters
from .generators.base import Generator
from .metrics import DistanceMetric
from .samples import Sample
from .seeding import SeedSpec, derive_seed

RATIO_FLOOR = 1e-12


@dataclass(frozen=True)
class VerificationOutcome:
    sample_ref: str
    authentic_id: str
    contrast_id: str
    d_auth: float
    d_contrast: float
    ratio: float
    delta: float
    verified: bool


@dataclass(frozen=True)
class PairEvaluation:
    authentic_id: str
    contrast_id: str
    k: int
    delta: float
    metric_id: str
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) > 0 else 1.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) > 0 else 0.0


def exceed_ratio(d_auth: float, d_contrast: float) -> float:
    """d_contrast / d_auth with a floor guard; two exact zeros compare as 1."""
    if d_contrast == 0.0 and d_auth == 0.0:
        return 1.0
    return d_contrast / max(d_auth, RATIO_FLOOR)


def decide(d_auth: float, d_contrast: float, delta: float) -> tuple[float, bool]:
    if delta <= 0:
        raise InvalidParameters("delta must be > 0")
    ratio = exceed_ratio(d_auth, d_contrast)
    return ratio, ratio > 1.0 + delta


def regeneration_distances(
    x: Sample,
    authentic: Generator,
    contrast: Generator,
    metric: DistanceMetric,
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
) -> tuple[float, float]:
    """One-step re-generation distances (d_auth, d_contrast) for one sample.

    The two generators draw from independent derived seed streams; images
    use the configured mode (fingerprint by default in experiments), other
    modalities a full pass.
    """
    authentic.check_modality(x)
    contrast.check_modality(x)
    y_auth = one_step_regenerate(authentic, x, mode, derive_seed(seed, "auth"))
    y_contrast = one_step_regenerate(contrast, x, mode, derive_seed(seed, "contrast"))
    return metric.distance(y_auth, x), metric.distance(y_contrast, x)


def verify_sample(
    x: Sample,
    authentic: Generator,
    contrast: Generator,
    metric: DistanceMetric,
    delta: float,
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
    sample_ref: str = "",
) -> VerificationOutcome:
    """Run the ratio test for one disputed sample."""
    d_auth, d_contrast = regeneration_distances(x, authentic, contrast, metric, seed, mode)
    ratio, verified = decide(d_auth, d_contrast, delta)
    return VerificationOutcome(
        sample_ref, authentic.id, contrast.id, d_auth, d_contrast, ratio, delta, verified
    )


def pair_distance_table(
    corpus_authentic: list[Sample],
    corpus_contrast: list[Sample],
    authentic: Generator,
    contrast: Generator,
    metric: DistanceMetric,
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """(d_auth, d_contrast) per sample for positives and negatives.

    Decisions are a pure function of this table, so threshold sweeps reuse
    it without re-running any generator.
    """
    if not corpus_authentic or not corpus_contrast:
        raise EmptyCorpus("both corpora must be non-empty")
    positives = [
        regeneration_distances(
            x, authentic, contrast, metric, seed.derive("pos").derive(i), mode
        )
        for i, x in enumerate(corpus_authentic)
    ]
    negatives = [
        regeneration_distances(
            x, authentic, contrast, metric, seed.derive("neg").derive(i), mode
        )
        for i, x in enumerate(corpus_contrast)
    ]
    return positives, negatives


def counts_from_table(
    positives: list[tuple[float, float]],
    negatives: list[tuple[float, float]],
    delta: float,
) -> tuple[int, int, int, int]:
    tp = sum(1 for d_a, d_c in positives if decide(d_a, d_c, delta)[1])
    fn = len(positives) - tp
    fp = sum(1 for d_a, d_c in negatives if decide(d_a, d_c, delta)[1])
    tn = len(negatives) - fp
    return tp, fp, fn, tn


def evaluate_pair(
    corpus_authentic: list[Sample],
    corpus_contrast: list[Sample],
    authentic: Generator,
    contrast: Generator,
    metric: DistanceMetric,
    delta: float,
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
    k: int = 0,
) -> PairEvaluation:
    """Precision/recall for one ordered (authentic, contrast) pair."""
    positives, negatives = pair_distance_table(
        corpus_authentic, corpus_contrast, authentic, contrast, metric, seed, mode
    )
    tp, fp, fn, tn = counts_from_table(positives, negatives, delta)
    return PairEvaluation(authentic.id, contrast.id, k, delta, metric.id, tp, fp, fn, tn)


def delta_sweep(
    corpus_authentic: list[Sample],
    corpus_contrast: list[Sample],
    authentic: Generator,
    contrast: Generator,
    metric: DistanceMetric,
    deltas: list[float],
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
    k: int = 0,
) -> list[PairEvaluation]:
    """One PairEvaluation per threshold, re-generating each sample only once."""
    if not deltas or any(d <= 0 for d in deltas):
        raise InvalidParameters("deltas must all be > 0")
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise InvalidParameters("deltas must be strictly increasing")
    positives, negatives = pair_distance_table(
        corpus_authentic, corpus_contrast, authentic, contrast, metric, seed, mode
    )
    evaluations = []
    for delta in deltas:
        tp, fp, fn, tn = counts_from_table(positives, negatives, delta)
        evaluations.append(
            PairEvaluation(authentic.id, contrast.id, k, delta, metric.id, tp, fp, fn, tn)
        )
    return evaluations
