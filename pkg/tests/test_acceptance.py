"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion with its elapsed time against the stated budget.

Synthetic scale: the default four-model zoos, 200 samples per model, five
re-generation rounds, decision margin 0.05.  "Well-separated" means every
ordered pair of the default zoos: their fixed points are constructed far
apart relative to each model's noise and contraction residual.
"""

import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from regenmark.analysis import estimate_lipschitz, rank_auc
from regenmark.attacks import (
    natural_vs_generated,
    paraphrase_attack,
    perturb_brightness,
    perturb_gaussian,
    perturb_text,
)
from regenmark.config import parse_config
from regenmark.engine import FULL_MODE, iterate_regenerate, one_step_regenerate
from regenmark.experiments import build_metrics, build_zoo, regen_mode
from regenmark.generators import VectorGenParams, VectorGenerator
from regenmark.generators.base import generate_initial
from regenmark.metrics import get_metric
from regenmark.samples import ImageSample, VectorSample
from regenmark.seeding import SeedSpec
from regenmark.verification import counts_from_table, pair_distance_table, verify_sample
from regenmark.zoo import default_config, paraphrase_config

from .conftest import random_image, random_text
from .oracles import bleu_oracle, mse_oracle, rouge_l_oracle, ssim_oracle

MASTER = SeedSpec(20240501)
CORPUS = 200
K = 5
DELTA = 0.05


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\n[FAIL] {name} ({time.perf_counter() - start:.1f}s)")
        raise
    elapsed = time.perf_counter() - start
    print(f"\n[PASS] {name} ({elapsed:.1f}s, budget {budget_s:.0f}s)")
    assert elapsed <= budget_s, f"{name}: {elapsed:.1f}s exceeded the {budget_s:.0f}s budget"


# --- shared corpora ---------------------------------------------------------


def _experiment(modality):
    config = parse_config(default_config(modality, output_dir="unused"))
    zoo = build_zoo(config)
    metrics = [m for m in build_metrics(config) if m.modality == modality]
    mode = regen_mode(config, modality)
    return config, zoo, metrics, mode


def _make_traces(zoo, metrics, mode, size=CORPUS, iterations=K, seed=MASTER):
    traces = {}
    for gen in zoo:
        rows = []
        for i in range(size):
            s = seed.derive("gen").derive(gen.id).derive(i)
            x0 = generate_initial(gen, f"sample-{i:06d}", s)
            rows.append(iterate_regenerate(gen, x0, iterations, metrics, s, mode))
        traces[gen.id] = rows
    return traces


@pytest.fixture(scope="module", params=["vector", "text", "image"])
def modality_setup(request):
    modality = request.param
    config, zoo, metrics, mode = _experiment(modality)
    traces = _make_traces(zoo, metrics, mode)
    return modality, zoo, metrics, mode, traces


@pytest.fixture(scope="module")
def all_setups():
    out = {}
    for modality in ("vector", "text", "image"):
        config, zoo, metrics, mode = _experiment(modality)
        out[modality] = (zoo, metrics, mode, _make_traces(zoo, metrics, mode))
    return out


def _verification_metric(modality):
    return {"vector": "euclidean", "text": "rouge_l", "image": "ssim"}[modality]


def _pair_tables(zoo, mode, metric, traces, k=K, seed=MASTER):
    """(d_auth, d_contrast) tables for every ordered pair at iteration k."""
    corpora = {gid: [t.samples[k] for t in rows] for gid, rows in traces.items()}
    tables = {}
    for authentic in zoo:
        for contrast in zoo:
            if authentic.id == contrast.id:
                continue
            pair_seed = seed.derive("verify").derive(metric.id).derive(k).derive(authentic.id).derive(contrast.id)
            tables[(authentic.id, contrast.id)] = pair_distance_table(
                corpora[authentic.id], corpora[contrast.id],
                authentic, contrast, metric, pair_seed, mode,
            )
    return tables


@pytest.fixture(scope="module")
def verification_tables(all_setups):
    tables = {}
    for modality, (zoo, _metrics, mode, traces) in all_setups.items():
        metric = get_metric(_verification_metric(modality))
        tables[modality] = (zoo, _pair_tables(zoo, mode, metric, traces))
    return tables


# --- criteria ----------------------------------------------------------------


def test_theorem_bound_noiseless_vector_zoo():
    """Step distances of a noiseless contraction obey d_k <= L^(k-1) d_1."""
    with criterion("Theorem-1 bound (noiseless vector zoo, K=10, 100 starts)", 5.0):
        euclidean = get_metric("euclidean")
        config = parse_config(default_config("vector", output_dir="unused"))
        for spec in config.zoo:
            params = dict(spec.parameters, noise_sigma=0.0)
            gen = VectorGenerator(spec.id, VectorGenParams(**params))
            contraction = params["contraction"]
            for start in range(100):
                s = MASTER.derive("thm1").derive(spec.id).derive(start)
                x0 = VectorSample(s.rng().uniform(-10.0, 10.0, size=16))
                trace = iterate_regenerate(gen, x0, 10, [euclidean], s)
                steps = trace.step_distances["euclidean"]
                for k in range(1, len(steps) + 1):
                    assert steps[k - 1] <= contraction ** (k - 1) * steps[0] + 1e-9, (
                        f"{spec.id}, start {start}, step {k}"
                    )


def test_lipschitz_estimator_exactness():
    """Noiseless L=0.9 linear map estimates mean = max = 0.9 within 1e-6."""
    with criterion("Lipschitz estimator exactness (L=0.9, 50 samples)", 5.0):
        config = parse_config(default_config("vector", output_dir="unused"))
        spec = next(s for s in config.zoo if s.parameters["contraction"] == 0.9)
        gen = VectorGenerator(spec.id, VectorGenParams(**dict(spec.parameters, noise_sigma=0.0)))
        rng = MASTER.derive("lip").rng()
        corpus = [VectorSample(rng.uniform(-10, 10, 16)) for _ in range(50)]
        estimate = estimate_lipschitz(gen, corpus, get_metric("euclidean"), MASTER.derive("lipseed"))
        assert estimate.mean == pytest.approx(0.9, abs=1e-6)
        assert estimate.max == pytest.approx(0.9, abs=1e-6)


def test_metric_oracle_equivalence(rng):
    """bleu/rouge_l within 1e-6 and mse/ssim within 1e-9 of brute force, 50 instances each."""
    with criterion("Metric oracle equivalence (50 randomized instances each)", 10.0):
        for _ in range(50):
            cand = random_text(rng, int(rng.integers(1, 12)))
            ref = random_text(rng, int(rng.integers(1, 12)))
            assert get_metric("bleu").distance(cand, ref) == pytest.approx(
                bleu_oracle(list(cand.tokens), list(ref.tokens)), abs=1e-6
            )
            assert get_metric("rouge_l").distance(cand, ref) == pytest.approx(
                rouge_l_oracle(list(cand.tokens), list(ref.tokens)), abs=1e-6
            )
        for _ in range(50):
            height, width = int(rng.integers(8, 17)), int(rng.integers(8, 17))
            a, b = random_image(rng, height, width), random_image(rng, height, width)
            assert get_metric("mse").distance(a, b) == pytest.approx(
                mse_oracle(a.pixels, b.pixels), abs=1e-9
            )
            assert get_metric("ssim").distance(a, b) == pytest.approx(
                ssim_oracle(a.pixels, b.pixels), abs=1e-9
            )


def test_convergence_trend(modality_setup):
    """Corpus-mean step distance non-increasing in k within a 5% band, all zoos.

    The band is 5% of the curve's initial step scale (i.e. the normalized
    curve may rise by at most 0.05 between steps), so genuine upward trends
    fail while counting jitter at the converged floor does not.
    """
    modality, zoo, metrics, mode, traces = modality_setup
    with criterion(f"Convergence trend ({modality} zoo, 200 samples, K=5)", 120.0):
        for metric in metrics:
            for gen in zoo:
                table = np.array([t.step_distances[metric.id] for t in traces[gen.id]])
                means = table.mean(axis=0)
                assert means[0] > 0, f"{gen.id}/{metric.id}: first step distance is zero"
                normalized = means / means[0]
                for k, (a, b) in enumerate(zip(normalized, normalized[1:]), start=1):
                    assert b <= a + 0.05, (
                        f"{gen.id}/{metric.id}: normalized mean step {k + 1} = {b:.4g} "
                        f"rises more than 0.05 above step {k} = {a:.4g}"
                    )


def test_verification_quality(verification_tables):
    """Precision/recall at k=5, delta=0.05: >= 0.95 vector and text, >= 0.85 image."""
    with criterion("Verification quality (4-model zoos, 200 samples)", 300.0):
        floors = {"vector": 0.95, "text": 0.95, "image": 0.85}
        for modality, (zoo, tables) in verification_tables.items():
            floor = floors[modality]
            for (aid, cid), (positives, negatives) in tables.items():
                tp, fp, fn, tn = counts_from_table(positives, negatives, DELTA)
                precision = tp / (tp + fp) if tp + fp else 1.0
                recall = tp / (tp + fn)
                assert precision >= floor, f"{modality} {aid} vs {cid}: precision {precision:.3f}"
                assert recall >= floor, f"{modality} {aid} vs {cid}: recall {recall:.3f}"


def test_delta_monotonicity(verification_tables):
    """Over deltas {0.05, 0.1, 0.2, 0.4}: recall non-increasing exactly,
    precision non-increasing within 2 points, reusing cached re-generations."""
    with criterion("Delta monotonicity (cached re-generations)", 60.0):
        deltas = [0.05, 0.1, 0.2, 0.4]
        for modality, (zoo, tables) in verification_tables.items():
            for (aid, cid), (positives, negatives) in tables.items():
                recalls, precisions = [], []
                for delta in deltas:
                    tp, fp, fn, tn = counts_from_table(positives, negatives, delta)
                    recalls.append(tp / (tp + fn))
                    precisions.append(tp / (tp + fp) if tp + fp else 1.0)
                for a, b in zip(recalls, recalls[1:]):
                    assert b <= a, f"{modality} {aid}/{cid}: recall increased {a} -> {b}"
                for a, b in zip(precisions, precisions[1:]):
                    assert b <= a + 0.02, f"{modality} {aid}/{cid}: precision rose {a} -> {b}"


def test_iteration_benefit():
    """Slowest vector model (L=0.95): recall at k=5 >= recall at k=1, 10 master seeds."""
    with criterion("Iteration benefit (L=0.95, 10 master seeds)", 180.0):
        config, zoo, _metrics, _mode = _experiment("vector")
        euclidean = get_metric("euclidean")
        slow = next(g for g in zoo if g.params.contraction == 0.95)
        contrasts = [g for g in zoo if g.id != slow.id]
        size = 100
        for master in range(10):
            seed = SeedSpec(1000 + master)
            finals = {}
            for i in range(size):
                s = seed.derive("gen").derive(slow.id).derive(i)
                x0 = generate_initial(slow, f"sample-{i:06d}", s)
                trace = iterate_regenerate(slow, x0, K, [], s)
                finals[i] = trace.samples
            for contrast in contrasts:
                recalls = {}
                for k in (1, K):
                    hits = 0
                    for i in range(size):
                        outcome = verify_sample(
                            finals[i][k], slow, contrast, euclidean, DELTA,
                            seed.derive("v").derive(contrast.id).derive(k).derive(i),
                        )
                        hits += outcome.verified
                    recalls[k] = hits / size
                assert recalls[K] >= recalls[1], (
                    f"seed {master}, contrast {contrast.id}: "
                    f"recall(k=5)={recalls[K]:.3f} < recall(k=1)={recalls[1]:.3f}"
                )


def _attack_precision(zoo, mode, metric, corpora, perturb, param, seed):
    """Precision per ordered pair after perturbing every disputed sample."""
    attacked = {
        gid: [perturb(x, param, seed.derive(gid).derive(i)) for i, x in enumerate(corpus)]
        for gid, corpus in corpora.items()
    }
    out = {}
    for authentic in zoo:
        for contrast in zoo:
            if authentic.id == contrast.id:
                continue
            pair_seed = seed.derive("pair").derive(authentic.id).derive(contrast.id)
            positives, negatives = pair_distance_table(
                attacked[authentic.id], attacked[contrast.id],
                authentic, contrast, metric, pair_seed, mode,
            )
            tp, fp, fn, tn = counts_from_table(positives, negatives, DELTA)
            out[(authentic.id, contrast.id)] = tp / (tp + fp) if tp + fp else 1.0
    return out


def test_attack_trends(all_setups):
    """Word-substitution decay, gaussian-noise stability, brightness degradation."""
    with criterion("Attack trends (word / gaussian / brightness)", 300.0):
        # Word substitution: precision non-increasing within 5 points.
        zoo, _metrics, mode, traces = all_setups["text"]
        metric = get_metric("rouge_l")
        corpora = {gid: [t.samples[K] for t in rows] for gid, rows in traces.items()}
        vocab = tuple({tok for g in zoo for tok in g.params.vocabulary()})
        rates = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
        by_rate = [
            _attack_precision(
                zoo, mode, metric, corpora,
                lambda x, rate, s: perturb_text(x, rate, vocab, s),
                rate, MASTER.derive("word").derive(str(rate)),
            )
            for rate in rates
        ]
        for pair in by_rate[0]:
            series = [p[pair] for p in by_rate]
            for a, b in zip(series, series[1:]):
                assert b <= a + 0.05, f"word substitution {pair}: precision rose {a:.2f} -> {b:.2f}"

        # Gaussian noise: precision within 10 points of unperturbed for r <= 0.5.
        zoo, _metrics, mode, traces = all_setups["image"]
        metric = get_metric("ssim")
        corpora = {gid: [t.samples[K] for t in rows] for gid, rows in traces.items()}
        fractions = [0.0, 0.01, 0.05, 0.1, 0.2, 0.5]
        noise_by_fraction = {
            fraction: _attack_precision(
                zoo, mode, metric, corpora,
                lambda x, f, s: perturb_gaussian(x, f, 0.0, 4.0, s),
                fraction, MASTER.derive("gauss").derive(str(fraction)),
            )
            for fraction in fractions
        }
        for pair, baseline in noise_by_fraction[0.0].items():
            for fraction in fractions[1:]:
                value = noise_by_fraction[fraction][pair]
                assert abs(value - baseline) <= 0.10, (
                    f"gaussian r={fraction} {pair}: precision {value:.2f} vs baseline {baseline:.2f}"
                )

        # Brightness: f >= 1.1 costs at least 10 points for some model pair.
        bright_base = noise_by_fraction[0.0]
        degraded = False
        for factor in (1.1, 1.5):
            bright = _attack_precision(
                zoo, mode, metric, corpora,
                lambda x, f, s: perturb_brightness(x, 0.1, f, s),
                factor, MASTER.derive("bright").derive(str(factor)),
            )
            degraded = degraded or any(
                bright[pair] <= bright_base[pair] - 0.10 for pair in bright
            )
        assert degraded, "no image-zoo pair lost >= 10 precision points under brightness"


def test_paraphrase_attack_asymmetry():
    """Involved models overlap (auc in [0.35, 0.65]); an unrelated model separates (>= 0.9)."""
    with criterion("Paraphrase asymmetry (equal-contraction zoo, 200 samples)", 120.0):
        config = parse_config(paraphrase_config(output_dir="unused"))
        zoo = build_zoo(config)
        by_id = {g.id: g for g in zoo}
        authentic, paraphraser = by_id["para-a"], by_id["para-b"]
        metric = get_metric("euclidean")
        seed = MASTER.derive("paraphrase")

        corpus = []
        for i in range(CORPUS):
            s = seed.derive("gen").derive(i)
            x0 = generate_initial(authentic, f"sample-{i:06d}", s)
            corpus.append(iterate_regenerate(authentic, x0, K, [], s).final())
        attacked = [
            paraphrase_attack(x, paraphraser, seed.derive("attack").derive(i))
            for i, x in enumerate(corpus)
        ]
        series = {}
        for gen in zoo:
            values = []
            for i, x in enumerate(attacked):
                y = one_step_regenerate(gen, x, FULL_MODE, seed.derive("step").derive(gen.id).derive(i))
                values.append(metric.distance(y, x))
            series[gen.id] = values

        involved_auc = rank_auc(series[paraphraser.id], series[authentic.id])
        assert 0.35 <= involved_auc <= 0.65, f"involved auc {involved_auc:.3f}"
        for unrelated in zoo:
            if unrelated.id in (authentic.id, paraphraser.id):
                continue
            auc = rank_auc(series[paraphraser.id], series[unrelated.id])
            assert auc >= 0.9, f"unrelated {unrelated.id} auc {auc:.3f}"
            assert auc > involved_auc, "third party must exceed the involved model"


def test_natural_vs_generated_separation(all_setups):
    """Random images vs 5-iteration outputs: one-step distance auc >= 0.95 per model."""
    with criterion("Natural-vs-generated separation (image zoo)", 60.0):
        zoo, _metrics, mode, traces = all_setups["image"]
        metric = get_metric("ssim")
        rng = MASTER.derive("natural").rng()
        natural = [
            ImageSample(rng.integers(0, 256, size=(24, 24, 1)).astype(np.uint8))
            for _ in range(CORPUS)
        ]
        for gen in zoo:
            generated = [t.samples[K] for t in traces[gen.id]]
            report = natural_vs_generated(
                natural, generated, gen, metric, MASTER.derive("nvg").derive(gen.id), mode
            )
            auc = report.auc_separation["natural"]
            assert auc >= 0.95, f"{gen.id}: auc {auc:.3f}"


def test_pipeline_determinism(tmp_path):
    """generate + verify re-run with one config/seed: byte-identical manifests."""
    with criterion("Pipeline determinism (corpus size 20)", 60.0):
        import json

        from regenmark.cli import main

        data = default_config("vector", output_dir=str(tmp_path / "run"), size=20, iterations=2)
        data["attacks"] = []
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(data), encoding="utf-8")

        assert main(["generate", "--config", str(config_path)]) == 0
        assert main(["verify", "--config", str(config_path)]) == 0
        root = tmp_path / "run"
        first = {
            name: (root / name).read_bytes()
            for name in ("generate.manifest.json", "verify.manifest.json")
        }
        assert main(["generate", "--config", str(config_path)]) == 0
        assert main(["verify", "--config", str(config_path)]) == 0
        for name, blob in first.items():
            assert (root / name).read_bytes() == blob, f"{name} changed across re-runs"


ADAPTER_DIST = Path(__file__).resolve().parent.parent / "bridge-adapter" / "dist" / "main.js"


def test_bridge_conformance_secondary():
    """[SECONDARY] echo adapter passes bridge-check; echo pipeline yields r=1 everywhere."""
    if not ADAPTER_DIST.exists():
        pytest.skip("bridge adapter not built (npm --prefix bridge-adapter run build)")
    with criterion("Bridge conformance (echo adapter, no network)", 60.0):
        from regenmark.bridge import BridgeClient, BridgeGenerator
        from regenmark.conformance import run_conformance_command

        command = ["node", str(ADAPTER_DIST), "--backend", "echo"]
        results = run_conformance_command(command, None, timeout=10.0)
        failed = [(r.name, r.detail) for r in results if not r.passed]
        assert not failed, f"conformance failures: {failed}"

        with BridgeClient.spawn(command, timeout=10.0) as client:
            authentic = BridgeGenerator("echo-a", "vector", client)
            contrast = BridgeGenerator("echo-c", "vector", client)
            euclidean = get_metric("euclidean")
            rng = MASTER.derive("echo").rng()
            for i in range(20):
                x = VectorSample(rng.uniform(-5, 5, 8))
                outcome = verify_sample(x, authentic, contrast, euclidean, DELTA, MASTER.derive(i))
                assert outcome.ratio == 1.0 and not outcome.verified
