"""Convergence curves, one-step distance densities, and Lipschitz estimation.

The density report summarizes how separable the authentic model's one-step
re-generation distances are from each contrast model's using a rank
statistic (the probability that a random authentic distance is smaller than
a random contrast one), which is invariant under any monotone rescaling of
the metric.

The Lipschitz estimator uses the definitional ratio orientation,

    ratio = D(f(x), f(y)) / D(x, y),

whose supremum the contraction constant bounds from above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import FULL_MODE, RegenMode, RegenTrace, one_step_regenerate
from .errors import EmptyCorpus, EmptyInput, InconsistentTraces, InsufficientSamples
from .generators.base import Generator
from .metrics import DistanceMetric
from .samples import Sample
from .seeding import SeedSpec

NEAR_ZERO_BASE = 1e-12


@dataclass(frozen=True)
class ConvergenceCurve:
    generator_id: str
    metric_id: str
    means: tuple[float, ...]
    stddevs: tuple[float, ...]


@dataclass(frozen=True)
class LipschitzEstimate:
    generator_id: str
    metric_id: str
    ratios: tuple[float, ...]
    mean: float
    std: float
    max: float
    skipped_pairs: int


@dataclass
class DensityReport:
    metric_id: str
    k: int
    series: dict[str, list[float]]  # generator_id -> one-step distances
    bins: list[float]
    auc_separation: dict[str, float] = field(default_factory=dict)


def rank_auc(smaller: list[float], larger: list[float]) -> float:
    """P(a < b) + 0.5 P(a = b) for a from ``smaller``, b from ``larger``."""
    a = np.sort(np.asarray(smaller, dtype=np.float64))
    b = np.asarray(larger, dtype=np.float64)
    below = np.searchsorted(a, b, side="left")
    at = np.searchsorted(a, b, side="right") - below
    return float((below.sum() + 0.5 * at.sum()) / (len(a) * len(b)))


def convergence_curve(traces: list[RegenTrace], metric: DistanceMetric) -> ConvergenceCurve:
    """Pointwise mean/std of per-step distances across traces."""
    if not traces:
        raise EmptyInput("convergence_curve requires at least one trace")
    generator_id = traces[0].generator_id
    iterations = traces[0].iterations
    for trace in traces:
        if trace.generator_id != generator_id or trace.iterations != iterations:
            raise InconsistentTraces("traces must share generator and iteration count")
        if metric.id not in trace.step_distances:
            raise InconsistentTraces(f"trace lacks distances for metric {metric.id!r}")
    table = np.array([trace.step_distances[metric.id] for trace in traces], dtype=np.float64)
    if table.size == 0:
        return ConvergenceCurve(generator_id, metric.id, (), ())
    return ConvergenceCurve(
        generator_id,
        metric.id,
        tuple(float(v) for v in table.mean(axis=0)),
        tuple(float(v) for v in table.std(axis=0)),
    )


def density_report(
    corpus: list[Sample],
    generators: list[Generator],
    authentic_id: str,
    metric: DistanceMetric,
    seed: SeedSpec,
    bins: int = 20,
    k: int = 0,
    mode: RegenMode = FULL_MODE,
) -> DensityReport:
    """One-step distances D(x, G(x)) per generator over a shared corpus.

    Bin edges are shared across generators so the densities superimpose;
    the AUC map scores each contrast generator against the authentic one.
    """
    if not corpus:
        raise EmptyCorpus("density_report requires a non-empty corpus")
    if authentic_id not in {g.id for g in generators}:
        raise EmptyInput(f"authentic generator {authentic_id!r} not among generators")
    series: dict[str, list[float]] = {}
    for gen in generators:
        distances = []
        for i, x in enumerate(corpus):
            y = one_step_regenerate(gen, x, mode, seed.derive(gen.id).derive(i))
            distances.append(metric.distance(y, x))
        series[gen.id] = distances

    pooled = np.concatenate([np.asarray(v) for v in series.values()])
    edges = np.histogram_bin_edges(pooled, bins=bins)
    auc = {
        gen_id: rank_auc(series[authentic_id], values)
        for gen_id, values in series.items()
        if gen_id != authentic_id
    }
    return DensityReport(metric.id, k, series, [float(e) for e in edges], auc)


def estimate_lipschitz(
    generator: Generator,
    corpus: list[Sample],
    metric: DistanceMetric,
    seed: SeedSpec,
    mode: RegenMode = FULL_MODE,
) -> LipschitzEstimate:
    """Empirical contraction ratios over all unordered corpus pairs.

    Each sample is re-generated once under its own derived seed; pairs whose
    base distance is below 1e-12 are skipped to avoid dividing by noise.
    """
    if len(corpus) < 2:
        raise InsufficientSamples("estimate_lipschitz needs at least two samples")
    mapped = [
        one_step_regenerate(generator, x, mode, seed.derive("lipschitz").derive(i))
        for i, x in enumerate(corpus)
    ]
    ratios: list[float] = []
    skipped = 0
    for i in range(len(corpus)):
        for j in range(i + 1, len(corpus)):
            base = metric.distance(corpus[i], corpus[j])
            if base < NEAR_ZERO_BASE:
                skipped += 1
                continue
            ratios.append(metric.distance(mapped[i], mapped[j]) / base)
    if not ratios:
        raise InsufficientSamples("all pairs had near-zero base distance")
    arr = np.asarray(ratios)
    return LipschitzEstimate(
        generator.id,
        metric.id,
        tuple(ratios),
        float(arr.mean()),
        float(arr.std()),
        float(arr.max()),
        skipped,
    )
