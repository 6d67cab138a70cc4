import numpy as np
import pytest

from regenmark.analysis import (
    convergence_curve,
    density_report,
    estimate_lipschitz,
    rank_auc,
)
from regenmark.engine import iterate_regenerate
from regenmark.errors import EmptyCorpus, EmptyInput, InconsistentTraces, InsufficientSamples
from regenmark.generators import VectorGenParams, VectorGenerator
from regenmark.generators.base import generate_initial
from regenmark.metrics import get_metric
from regenmark.samples import VectorSample
from regenmark.seeding import SeedSpec

from .oracles import auc_oracle

EUCLIDEAN = get_metric("euclidean")
SEED = SeedSpec(17)


def vector_gen(gen_id="g", fixed_point=(0.0, 0.0), contraction=0.5, noise=0.0, rotation=0):
    return VectorGenerator(
        gen_id,
        VectorGenParams(
            dim=len(fixed_point), fixed_point=fixed_point, contraction=contraction,
            rotation_seed=rotation, noise_sigma=noise,
        ),
    )


class TestConvergenceCurve:
    def test_single_trace_passthrough(self):
        trace = iterate_regenerate(vector_gen(), VectorSample(np.array([1.0, 0.0])), 3, [EUCLIDEAN], SEED)
        curve = convergence_curve([trace], EUCLIDEAN)
        assert curve.means == pytest.approx((0.5, 0.25, 0.125), abs=1e-12)
        assert curve.stddevs == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)

    def test_noiseless_means_stay_geometric(self, rng):
        gen = vector_gen(contraction=0.5)
        traces = [
            iterate_regenerate(gen, VectorSample(rng.uniform(-4, 4, 2)), 5, [EUCLIDEAN], SEED.derive(i))
            for i in range(200)
        ]
        curve = convergence_curve(traces, EUCLIDEAN)
        for a, b in zip(curve.means, curve.means[1:]):
            assert b == pytest.approx(0.5 * a, rel=1e-9)

    def test_inconsistent_traces_rejected(self):
        t1 = iterate_regenerate(vector_gen("a"), VectorSample(np.ones(2)), 2, [EUCLIDEAN], SEED)
        t2 = iterate_regenerate(vector_gen("b"), VectorSample(np.ones(2)), 2, [EUCLIDEAN], SEED)
        with pytest.raises(InconsistentTraces):
            convergence_curve([t1, t2], EUCLIDEAN)
        t3 = iterate_regenerate(vector_gen("a"), VectorSample(np.ones(2)), 3, [EUCLIDEAN], SEED)
        with pytest.raises(InconsistentTraces):
            convergence_curve([t1, t3], EUCLIDEAN)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            convergence_curve([], EUCLIDEAN)


class TestRankAuc:
    def test_matches_enumeration_oracle(self, rng):
        for _ in range(25):
            a = list(rng.normal(0, 1, size=int(rng.integers(2, 30))))
            b = list(rng.normal(0.5, 1, size=int(rng.integers(2, 30))))
            assert rank_auc(a, b) == pytest.approx(auc_oracle(a, b), abs=1e-12)

    def test_ties_count_half(self):
        assert rank_auc([1.0, 1.0], [1.0, 1.0]) == 0.5

    def test_perfect_separation(self):
        assert rank_auc([0.1, 0.2], [0.9, 1.1]) == 1.0

    def test_monotone_rescaling_invariance(self, rng):
        a = list(rng.uniform(0, 1, 40))
        b = list(rng.uniform(0.2, 1.2, 40))
        base = rank_auc(a, b)
        assert rank_auc([np.expm1(v) for v in a], [np.expm1(v) for v in b]) == pytest.approx(base)


def _corpus(gen, size, iterations):
    out = []
    for i in range(size):
        s = SEED.derive(gen.id).derive(i)
        x0 = generate_initial(gen, f"p{i}", s)
        out.append(iterate_regenerate(gen, x0, iterations, [], s).final())
    return out


class TestDensityReport:
    def test_authentic_only_has_empty_auc_map(self):
        gen = vector_gen("solo", (1.0, 1.0), noise=0.05)
        corpus = _corpus(gen, 10, 2)
        report = density_report(corpus, [gen], "solo", EUCLIDEAN, SEED)
        assert report.auc_separation == {}
        assert len(report.series["solo"]) == 10

    def test_separated_zoo_has_high_auc(self):
        authentic = vector_gen("a", (8.0,) * 8, contraction=0.7, noise=0.05)
        contrast = vector_gen("c", (-8.0,) * 8, contraction=0.7, noise=0.05)
        corpus = _corpus(authentic, 60, 5)
        report = density_report(corpus, [authentic, contrast], "a", EUCLIDEAN, SEED)
        assert report.auc_separation["c"] >= 0.95

    def test_twin_generator_sits_at_half(self):
        params = dict(fixed_point=(2.0,) * 6, contraction=0.8, noise=0.3)
        authentic = vector_gen("a", **params)
        twin = vector_gen("a-twin", **params)
        corpus = _corpus(authentic, 120, 3)
        report = density_report(corpus, [authentic, twin], "a", EUCLIDEAN, SEED)
        assert report.auc_separation["a-twin"] == pytest.approx(0.5, abs=0.1)

    def test_series_lengths_and_shared_bins(self):
        a = vector_gen("a", (1.0, 1.0), noise=0.1)
        b = vector_gen("b", (-1.0, -1.0), noise=0.1)
        corpus = _corpus(a, 25, 1)
        report = density_report(corpus, [a, b], "a", EUCLIDEAN, SEED, bins=12)
        assert all(len(v) == 25 for v in report.series.values())
        assert len(report.bins) == 13

    def test_empty_corpus(self):
        gen = vector_gen()
        with pytest.raises(EmptyCorpus):
            density_report([], [gen], "g", EUCLIDEAN, SEED)


class TestLipschitzEstimate:
    def test_noiseless_linear_map_is_exact(self, rng):
        gen = vector_gen("g", (3.0,) * 16, contraction=0.9, rotation=41)
        corpus = [VectorSample(rng.uniform(-10, 10, 16)) for _ in range(50)]
        est = estimate_lipschitz(gen, corpus, EUCLIDEAN, SEED)
        assert est.mean == pytest.approx(0.9, abs=1e-6)
        assert est.max == pytest.approx(0.9, abs=1e-6)
        assert est.std == pytest.approx(0.0, abs=1e-6)
        assert len(est.ratios) == 50 * 49 // 2

    def test_near_identity_contraction(self, rng):
        gen = vector_gen("g", (0.0, 0.0), contraction=0.999)
        corpus = [VectorSample(rng.uniform(-5, 5, 2)) for _ in range(12)]
        est = estimate_lipschitz(gen, corpus, EUCLIDEAN, SEED)
        assert est.mean == pytest.approx(0.999, abs=1e-9)

    def test_max_bounds_mean(self, rng):
        gen = vector_gen("g", (1.0,) * 4, contraction=0.6, noise=0.2)
        corpus = [VectorSample(rng.uniform(-5, 5, 4)) for _ in range(15)]
        est = estimate_lipschitz(gen, corpus, EUCLIDEAN, SEED)
        assert est.max >= est.mean

    def test_duplicate_samples_skipped(self, rng):
        gen = vector_gen("g", (0.0, 0.0), contraction=0.5, noise=0.1)
        point = VectorSample(np.array([1.0, 1.0]))
        corpus = [point, point, VectorSample(np.array([2.0, 0.5]))]
        est = estimate_lipschitz(gen, corpus, EUCLIDEAN, SEED)
        assert est.skipped_pairs == 1
        assert len(est.ratios) == 2

    def test_insufficient_samples(self):
        gen = vector_gen()
        with pytest.raises(InsufficientSamples):
            estimate_lipschitz(gen, [VectorSample(np.ones(2))], EUCLIDEAN, SEED)
