"""Config-driven pipeline: generate -> verify -> analyze -> attack.

Each command reads the experiment config, performs its stage, writes its
artifacts under the config's output directory, and returns a RunManifest
listing every file with a content digest.  All randomness derives from the
master seed through labeled streams, so re-running any command with the
same config overwrites every artifact byte-identically.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, attacks, verification
from .config import (
    BrightnessAttack,
    ExperimentConfig,
    GaussianNoiseAttack,
    InpaintParams,
    NaturalVsGeneratedAttack,
    ParaphraseAttack,
    RunManifest,
    WordSubstitutionAttack,
    build_generator,
    build_manifest,
)
from .engine import (
    FULL_MODE,
    RegenMode,
    iterate_regenerate,
    load_trace,
    make_segmentation,
    make_watermark,
    one_step_regenerate,
    save_trace,
)
from .errors import ConfigInvalid, MissingArtifacts
from .generators.base import Generator, generate_initial
from .generators.synthetic import TextGenerator
from .metrics import (
    VERIFICATION_METRICS,
    DistanceMetric,
    DistanceRecord,
    get_metric,
    write_distance_records,
)
from .samples import ImageSample, Sample, read_pnm, read_sample
from .seeding import SeedSpec


def experiment_seed(config: ExperimentConfig) -> SeedSpec:
    return SeedSpec(config.master_seed)


def build_zoo(config: ExperimentConfig) -> list[Generator]:
    return [build_generator(spec) for spec in config.zoo]


def build_metrics(config: ExperimentConfig) -> list:
    """Resolve configured metric ids; bridge metrics open their endpoints.

    Callers that may receive bridge metrics must release them with
    :func:`close_metrics` when the stage finishes.
    """
    resolved = []
    for metric_id in config.metrics:
        if metric_id.startswith("bridge:"):
            from .bridge import BridgeClient, BridgeMetric

            params = config.bridge_metrics[metric_id.removeprefix("bridge:")]
            if params.command is not None:
                client = BridgeClient.spawn(params.command, params.timeout)
            else:
                client = BridgeClient.connect(params.address, params.timeout)
            resolved.append(BridgeMetric(metric_id, params.modality, client))
        else:
            resolved.append(get_metric(metric_id))
    return resolved


def close_metrics(metrics: list) -> None:
    for metric in metrics:
        client = getattr(metric, "client", None)
        if client is not None:
            client.close()


def verification_metrics(metrics: list, modality: str) -> list:
    """Configured metrics usable for ratio decisions on this modality."""
    usable = [
        m for m in metrics
        if m.modality == modality and (m.id in VERIFICATION_METRICS or m.id.startswith("bridge:"))
    ]
    if not usable:
        raise ConfigInvalid(
            f"no verification-capable metric configured for modality {modality!r}"
        )
    return usable


def zoo_modality(zoo: list[Generator]) -> str:
    modalities = {g.modality for g in zoo}
    if len(modalities) != 1:
        raise ConfigInvalid(f"zoo mixes modalities {sorted(modalities)}; use one per experiment")
    return modalities.pop()


def regen_mode(config: ExperimentConfig, modality: str) -> RegenMode:
    """The re-generation mode every stage shares, with plans frozen from the seed."""
    if modality != "image" or config.mode.kind == "full":
        return FULL_MODE
    image_specs = [
        p for g in config.zoo if isinstance(p := g.typed_parameters(), InpaintParams)
    ]
    height, width = image_specs[0].height, image_specs[0].width
    plan_seed = experiment_seed(config).derive("plan")
    if config.mode.kind == "watermark":
        return RegenMode("watermark", watermark=make_watermark(height, width, config.mode.watermark_n, plan_seed))
    plan = make_segmentation(height, width, config.mode.segments, config.mode.scheme, plan_seed)
    return RegenMode("fingerprint", segmentation=plan)


def corpus_prompt(config: ExperimentConfig, index: int) -> str:
    if config.corpus.prompts:
        return config.corpus.prompts[index % len(config.corpus.prompts)]
    return f"sample-{index:06d}"


def trace_dir(root: Path, generator_id: str, index: int) -> Path:
    return root / "traces" / generator_id / f"{index:05d}"


def _write_text(path: Path, content: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8", newline="")
    return path


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return _write_text(path, buf.getvalue())


def _fmt(value: float) -> str:
    return repr(round(float(value), 12))


# --- generate ----------------------------------------------------------------


def run_generate(config: ExperimentConfig, jobs: int = 1) -> RunManifest:
    root = Path(config.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    zoo = build_zoo(config)
    modality = zoo_modality(zoo)
    all_metrics = build_metrics(config)
    try:
        return _run_generate(config, jobs, root, zoo, modality, all_metrics)
    finally:
        close_metrics(all_metrics)


def _run_generate(config, jobs, root, zoo, modality, all_metrics) -> RunManifest:
    metrics = [m for m in all_metrics if m.modality == modality]
    mode = regen_mode(config, modality)
    base_seed = experiment_seed(config)

    written: list[Path] = []
    records: list[DistanceRecord] = []

    def one_trace(generator: Generator, index: int) -> tuple[list[Path], list[DistanceRecord]]:
        seed = base_seed.derive("gen").derive(generator.id).derive(index)
        x0 = generate_initial(generator, corpus_prompt(config, index), seed)
        trace = iterate_regenerate(generator, x0, config.iterations, metrics, seed, mode)
        files = save_trace(trace_dir(root, generator.id, index), trace, seed)
        recs = [
            DistanceRecord(m_id, f"{generator.id}/{index:05d}", generator.id, k + 1, value)
            for m_id, values in sorted(trace.step_distances.items())
            for k, value in enumerate(values)
        ]
        return files, recs

    tasks = [(generator, index) for generator in zoo for index in range(config.corpus.size)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda t: one_trace(*t), tasks))
    else:
        results = [one_trace(*t) for t in tasks]
    for files, recs in results:
        written.extend(files)
        records.extend(recs)

    buf = io.StringIO()
    write_distance_records(buf, records)
    written.append(_write_text(root / "distances.csv", buf.getvalue()))

    manifest = build_manifest("generate", config, root, written)
    _write_text(root / "generate.manifest.json", manifest.to_json())
    return manifest


def load_corpus(config: ExperimentConfig, generator_id: str, k: int) -> list[Sample]:
    """The k-th iterates persisted by run_generate."""
    root = Path(config.output_dir)
    corpus = []
    for index in range(config.corpus.size):
        directory = trace_dir(root, generator_id, index)
        sample_path = directory / f"iter_{k:03d}.json"
        if not sample_path.exists():
            raise MissingArtifacts(
                f"missing {sample_path}; run the generate command first"
            )
        corpus.append(read_sample(sample_path))
    return corpus


# --- verify -------------------------------------------------------------------


PAIR_CSV_HEADER = [
    "authentic", "contrast", "k", "delta", "metric",
    "tp", "fp", "fn", "tn", "precision", "recall",
]


def run_verify(config: ExperimentConfig, jobs: int = 1) -> RunManifest:
    root = Path(config.output_dir)
    zoo = build_zoo(config)
    modality = zoo_modality(zoo)
    all_metrics = build_metrics(config)
    try:
        return _run_verify(config, jobs, root, zoo, modality, all_metrics)
    finally:
        close_metrics(all_metrics)


def _run_verify(config, jobs, root, zoo, modality, all_metrics) -> RunManifest:
    metrics = verification_metrics(all_metrics, modality)
    mode = regen_mode(config, modality)
    base_seed = experiment_seed(config).derive("verify")

    corpora = {
        (g.id, k): load_corpus(config, g.id, k)
        for g in zoo
        for k in config.verify_iterations
    }

    def eval_pair(args) -> list[verification.PairEvaluation]:
        authentic, contrast, metric, k = args
        seed = base_seed.derive(metric.id).derive(k).derive(authentic.id).derive(contrast.id)
        return verification.delta_sweep(
            corpora[(authentic.id, k)],
            corpora[(contrast.id, k)],
            authentic, contrast, metric, config.deltas, seed, mode, k,
        )

    tasks = [
        (a, c, metric, k)
        for metric in metrics
        for k in config.verify_iterations
        for a in zoo
        for c in zoo
        if a.id != c.id
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sweeps = list(pool.map(eval_pair, tasks))
    else:
        sweeps = [eval_pair(t) for t in tasks]
    evaluations = [e for sweep in sweeps for e in sweep]

    written = _write_pair_reports(root / "verification", zoo, config, evaluations)
    manifest = build_manifest("verify", config, root, written)
    _write_text(root / "verify.manifest.json", manifest.to_json())
    return manifest


def _write_pair_reports(
    directory: Path,
    zoo: list[Generator],
    config: ExperimentConfig,
    evaluations: list[verification.PairEvaluation],
) -> list[Path]:
    written = []
    rows = [
        [e.authentic_id, e.contrast_id, e.k, _fmt(e.delta), e.metric_id,
         e.tp, e.fp, e.fn, e.tn, _fmt(e.precision), _fmt(e.recall)]
        for e in evaluations
    ]
    written.append(_write_csv(directory / "pairs.csv", PAIR_CSV_HEADER, rows))

    doc = [
        {
            "authentic": e.authentic_id, "contrast": e.contrast_id, "k": e.k,
            "delta": e.delta, "metric": e.metric_id,
            "tp": e.tp, "fp": e.fp, "fn": e.fn, "tn": e.tn,
            "precision": round(e.precision, 12), "recall": round(e.recall, 12),
        }
        for e in evaluations
    ]
    written.append(_write_text(
        directory / "pairs.json",
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
    ))

    # Grid layout (rows: authentic, cols: contrast), one file per view.
    ids = [g.id for g in zoo]
    by_key = {(e.metric_id, e.k, e.delta, e.authentic_id, e.contrast_id): e for e in evaluations}
    seen = sorted({(e.metric_id, e.k, e.delta) for e in evaluations}, key=str)
    for metric_id, k, delta in seen:
        for field in ("precision", "recall"):
            rows = []
            for a in ids:
                row = [a]
                for c in ids:
                    if a == c:
                        row.append("")
                    else:
                        entry = by_key.get((metric_id, k, delta, a, c))
                        row.append(_fmt(getattr(entry, field)) if entry else "")
                rows.append(row)
            name = f"grid_{field}_{metric_id}_k{k}_delta{_compact(delta)}.csv"
            written.append(_write_csv(directory / name, ["authentic\\contrast"] + ids, rows))
    return written


def _compact(value: float) -> str:
    return f"{value:g}".replace(".", "p")


# --- analyze ------------------------------------------------------------------


def run_analyze(config: ExperimentConfig, jobs: int = 1) -> RunManifest:
    # Analysis is cheap next to generation; it runs serially regardless of jobs.
    root = Path(config.output_dir)
    zoo = build_zoo(config)
    modality = zoo_modality(zoo)
    all_metrics = build_metrics(config)
    try:
        return _run_analyze(config, root, zoo, modality, all_metrics)
    finally:
        close_metrics(all_metrics)


def _run_analyze(config, root, zoo, modality, all_metrics) -> RunManifest:
    metrics = [m for m in all_metrics if m.modality == modality]
    mode = regen_mode(config, modality)
    base_seed = experiment_seed(config).derive("analyze")
    written: list[Path] = []

    traces = {
        g.id: [load_trace(trace_dir(root, g.id, i)) for i in range(config.corpus.size)]
        for g in zoo
    }

    # Convergence curves.
    curve_rows, curve_doc = [], []
    for g in zoo:
        for metric in metrics:
            curve = analysis.convergence_curve(traces[g.id], metric)
            for k, (mean, std) in enumerate(zip(curve.means, curve.stddevs), start=1):
                curve_rows.append([g.id, metric.id, k, _fmt(mean), _fmt(std)])
            curve_doc.append({
                "generator": g.id, "metric": metric.id,
                "means": [round(v, 12) for v in curve.means],
                "stddevs": [round(v, 12) for v in curve.stddevs],
            })
    written.append(_write_csv(
        root / "analysis" / "convergence.csv",
        ["generator", "metric", "k", "mean", "std"], curve_rows,
    ))
    written.append(_write_text(
        root / "analysis" / "convergence.json",
        json.dumps(curve_doc, sort_keys=True, separators=(",", ":")) + "\n",
    ))

    # One-step distance densities with AUC separation.
    density_rows, density_doc = [], []
    for metric in metrics:
        for k in config.density_iterations:
            for authentic in zoo:
                corpus = [t.samples[k] for t in traces[authentic.id]]
                report = analysis.density_report(
                    corpus, zoo, authentic.id, metric,
                    base_seed.derive("density").derive(metric.id).derive(k).derive(authentic.id),
                    config.density_bins, k, mode,
                )
                for gen_id, values in sorted(report.series.items()):
                    density_rows.extend(
                        [authentic.id, gen_id, metric.id, k, _fmt(v)] for v in values
                    )
                density_doc.append({
                    "authentic": authentic.id, "metric": metric.id, "k": k,
                    "bins": [round(b, 12) for b in report.bins],
                    "auc_separation": {c: round(v, 12) for c, v in sorted(report.auc_separation.items())},
                })
    written.append(_write_csv(
        root / "analysis" / "density.csv",
        ["authentic", "generator", "metric", "k", "value"], density_rows,
    ))
    written.append(_write_text(
        root / "analysis" / "density.json",
        json.dumps(density_doc, sort_keys=True, separators=(",", ":")) + "\n",
    ))

    # Empirical contraction ratios over the initial corpus.
    lipschitz_rows, lipschitz_doc = [], []
    sample_count = min(config.lipschitz_samples, config.corpus.size)
    for g in zoo:
        corpus = [t.samples[0] for t in traces[g.id][:sample_count]]
        if len(corpus) < 2:
            continue
        for metric in metrics:
            est = analysis.estimate_lipschitz(
                g, corpus, metric, base_seed.derive("lipschitz").derive(g.id).derive(metric.id), mode
            )
            lipschitz_rows.append([
                g.id, metric.id, _fmt(est.mean), _fmt(est.std), _fmt(est.max),
                len(est.ratios), est.skipped_pairs,
            ])
            lipschitz_doc.append({
                "generator": g.id, "metric": metric.id,
                "mean": round(est.mean, 12), "std": round(est.std, 12),
                "max": round(est.max, 12),
                "pairs": len(est.ratios), "skipped": est.skipped_pairs,
            })
    written.append(_write_csv(
        root / "analysis" / "lipschitz.csv",
        ["generator", "metric", "mean", "std", "max", "pairs", "skipped"], lipschitz_rows,
    ))
    written.append(_write_text(
        root / "analysis" / "lipschitz.json",
        json.dumps(lipschitz_doc, sort_keys=True, separators=(",", ":")) + "\n",
    ))

    manifest = build_manifest("analyze", config, root, written)
    _write_text(root / "analyze.manifest.json", manifest.to_json())
    return manifest


# --- attack -------------------------------------------------------------------


def _perturbation_vocabulary(zoo: list[Generator]) -> tuple[str, ...]:
    # Union of all synonym groups plus the shared filler words.
    vocab: list[str] = []
    for g in zoo:
        if isinstance(g, TextGenerator):
            for token in g.params.vocabulary():
                if token not in vocab:
                    vocab.append(token)
    return tuple(vocab)


def _perturbed_pair_rows(
    config: ExperimentConfig,
    zoo: list[Generator],
    metrics: list[DistanceMetric],
    mode: RegenMode,
    seed: SeedSpec,
    attack_name: str,
    params: list[float],
    perturb,
) -> list[list]:
    """Precision/recall rows for a perturb-then-verify sweep.

    ``perturb(sample, param, seed)`` applies the attack at one intensity to
    one sample; both positives and negatives are perturbed, mirroring an
    attacker editing whatever content is about to be disputed.
    """
    k = config.iterations
    delta = config.deltas[0]
    corpora = {g.id: load_corpus(config, g.id, k) for g in zoo}
    rows = []
    for param in params:
        attacked = {
            gid: [
                perturb(x, param, seed.derive(attack_name).derive(gid).derive(i))
                for i, x in enumerate(corpus)
            ]
            for gid, corpus in corpora.items()
        }
        for metric in metrics:
            for authentic in zoo:
                for contrast in zoo:
                    if authentic.id == contrast.id:
                        continue
                    pair_seed = (
                        seed.derive(attack_name).derive(_fmt(param))
                        .derive(metric.id).derive(authentic.id).derive(contrast.id)
                    )
                    evaluation = verification.evaluate_pair(
                        attacked[authentic.id], attacked[contrast.id],
                        authentic, contrast, metric, delta, pair_seed, mode, k,
                    )
                    rows.append([
                        attack_name, _fmt(param), authentic.id, contrast.id,
                        metric.id, k, _fmt(delta),
                        _fmt(evaluation.precision), _fmt(evaluation.recall),
                    ])
    return rows


ATTACK_CSV_HEADER = [
    "attack", "param", "authentic", "contrast", "metric", "k", "delta", "precision", "recall",
]


def run_attack(config: ExperimentConfig, jobs: int = 1) -> RunManifest:
    # Attack sweeps reuse the stored traces and run serially regardless of jobs.
    root = Path(config.output_dir)
    zoo = build_zoo(config)
    modality = zoo_modality(zoo)
    all_metrics = build_metrics(config)
    try:
        return _run_attack(config, root, zoo, modality, all_metrics)
    finally:
        close_metrics(all_metrics)


def _run_attack(config, root, zoo, modality, all_metrics) -> RunManifest:
    metrics = verification_metrics(all_metrics, modality)
    mode = regen_mode(config, modality)
    base_seed = experiment_seed(config).derive("attack")
    written: list[Path] = []

    for attack in config.attacks:
        if isinstance(attack, WordSubstitutionAttack):
            if modality != "text":
                raise ConfigInvalid("word_substitution attack requires a text zoo")
            vocab = _perturbation_vocabulary(zoo)
            rows = _perturbed_pair_rows(
                config, zoo, metrics, mode, base_seed, "word_substitution", attack.rates,
                lambda x, rate, s: attacks.perturb_text(x, rate, vocab, s),
            )
            written.append(_write_csv(root / "attacks" / "word_substitution.csv", ATTACK_CSV_HEADER, rows))
        elif isinstance(attack, GaussianNoiseAttack):
            if modality != "image":
                raise ConfigInvalid("gaussian_noise attack requires an image zoo")
            rows = _perturbed_pair_rows(
                config, zoo, metrics, mode, base_seed, "gaussian_noise", attack.fractions,
                lambda x, fraction, s: attacks.perturb_gaussian(x, fraction, attack.mu, attack.sigma, s),
            )
            written.append(_write_csv(root / "attacks" / "gaussian_noise.csv", ATTACK_CSV_HEADER, rows))
        elif isinstance(attack, BrightnessAttack):
            if modality != "image":
                raise ConfigInvalid("brightness attack requires an image zoo")
            rows = _perturbed_pair_rows(
                config, zoo, metrics, mode, base_seed, "brightness", attack.factors,
                lambda x, factor, s: attacks.perturb_brightness(x, attack.fraction, factor, s),
            )
            written.append(_write_csv(root / "attacks" / "brightness.csv", ATTACK_CSV_HEADER, rows))
        elif isinstance(attack, ParaphraseAttack):
            written.append(_run_paraphrase(config, zoo, metrics[0], mode, base_seed, attack, root))
        elif isinstance(attack, NaturalVsGeneratedAttack):
            written.append(_run_natural(config, zoo, metrics[0], mode, base_seed, attack, root))

    manifest = build_manifest("attack", config, root, written)
    _write_text(root / "attack.manifest.json", manifest.to_json())
    return manifest


def _run_paraphrase(
    config: ExperimentConfig,
    zoo: list[Generator],
    metric: DistanceMetric,
    mode: RegenMode,
    seed: SeedSpec,
    attack: ParaphraseAttack,
    root: Path,
) -> Path:
    """Cross-model paraphrase: one-step distances of every model on A_B content.

    AUC scores compare each model's distances against the paraphraser's own:
    the authentic model should overlap (it co-shaped the content), while a
    model uninvolved in generation or paraphrasing should separate.
    """
    by_id = {g.id: g for g in zoo}
    authentic, paraphraser = by_id[attack.authentic], by_id[attack.paraphraser]
    rows = []
    for k in attack.ks:
        corpus = load_corpus(config, authentic.id, k)
        attacked = [
            attacks.paraphrase_attack(
                x, paraphraser, seed.derive("paraphrase").derive(k).derive(i), mode
            )
            for i, x in enumerate(corpus)
        ]
        series: dict[str, list[float]] = {}
        for g in zoo:
            values = []
            for i, x in enumerate(attacked):
                regen_seed = seed.derive("paraphrase-step").derive(k).derive(g.id).derive(i)
                y = one_step_regenerate(g, x, mode, regen_seed)
                values.append(metric.distance(y, x))
            series[g.id] = values
        for g in zoo:
            if g.id == paraphraser.id:
                continue
            role = "authentic" if g.id == authentic.id else "third_party"
            auc = analysis.rank_auc(series[paraphraser.id], series[g.id])
            rows.append(["paraphrase", k, g.id, role, metric.id, _fmt(auc)])
    return _write_csv(
        root / "attacks" / "paraphrase.csv",
        ["attack", "k", "generator", "role", "metric", "auc_vs_paraphraser"], rows,
    )


def _synthesize_natural(config: ExperimentConfig, zoo: list[Generator], count: int, seed: SeedSpec) -> list[Sample]:
    """Stand-in natural corpus: uniform random content of the zoo's shape."""
    modality = zoo_modality(zoo)
    rng = seed.derive("natural").rng()
    if modality == "image":
        spec = next(p for g in config.zoo if isinstance(p := g.typed_parameters(), InpaintParams))
        return [
            ImageSample(rng.integers(0, 256, size=(spec.height, spec.width, spec.channels)).astype(np.uint8))
            for _ in range(count)
        ]
    if modality == "vector":
        dim = len(build_zoo(config)[0].params.fixed_point)
        from .samples import VectorSample

        return [VectorSample(rng.uniform(-50.0, 50.0, size=dim)) for _ in range(count)]
    from .samples import TextSample

    vocab = _perturbation_vocabulary(zoo)
    return [
        TextSample(tuple(vocab[rng.integers(len(vocab))] for _ in range(32)))
        for _ in range(count)
    ]


def _load_natural_dir(directory: Path) -> list[Sample]:
    samples = []
    for path in sorted(directory.iterdir()):
        if path.suffix in (".pgm", ".ppm"):
            samples.append(read_pnm(path))
        elif path.suffix == ".json":
            samples.append(read_sample(path))
    if not samples:
        raise MissingArtifacts(f"no .json/.pgm/.ppm samples found in {directory}")
    return samples


def _run_natural(
    config: ExperimentConfig,
    zoo: list[Generator],
    metric: DistanceMetric,
    mode: RegenMode,
    seed: SeedSpec,
    attack: NaturalVsGeneratedAttack,
    root: Path,
) -> Path:
    count = attack.natural_size or config.corpus.size
    if attack.natural_dir is not None:
        natural = _load_natural_dir(Path(attack.natural_dir))
    else:
        natural = _synthesize_natural(config, zoo, count, seed)
    rows = []
    for g in zoo:
        generated = load_corpus(config, g.id, config.iterations)
        report = attacks.natural_vs_generated(
            natural, generated, g, metric, seed.derive("nvg").derive(g.id), mode, config.density_bins
        )
        rows.append([
            "natural_vs_generated", g.id, metric.id, config.iterations,
            _fmt(report.auc_separation["natural"]),
        ])
    return _write_csv(
        root / "attacks" / "natural_vs_generated.csv",
        ["attack", "generator", "metric", "k", "auc"], rows,
    )
