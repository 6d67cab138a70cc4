"""Experiment configuration: one JSON document describes a full run.

The schema validates completely before any work starts; invalid values are
rejected with messages naming the offending field.  Everything downstream
(generator zoo, corpus, iteration count, metrics, thresholds, re-generation
mode, attacks, output paths) is derived from this document plus the master
seed, which is what makes re-runs byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ._version import __version__
from .errors import ConfigInvalid
from .generators.base import Generator
from .generators.synthetic import (
    InpaintGenParams,
    InpaintGenerator,
    TextGenParams,
    TextGenerator,
    VectorGenParams,
    VectorGenerator,
)


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class VectorParams(_StrictModel):
    dim: int = Field(ge=1)
    fixed_point: list[float]
    contraction: float = Field(gt=0.0, lt=1.0)
    rotation_seed: int = 0
    noise_sigma: float = Field(default=0.0, ge=0.0)
    init_spread: float = Field(default=2.0, gt=0.0)


class TextParams(_StrictModel):
    synonym_groups: list[list[str]]
    preference: dict[str, str]  # group index (as string key) -> preferred token
    p_sub: float = Field(default=0.9, ge=0.0, le=1.0)
    p_noise: float = Field(default=0.0, ge=0.0, le=1.0)
    init_length: int = Field(default=32, ge=1)
    group_fraction: float = Field(default=0.6, ge=0.0, le=1.0)


class InpaintParams(_StrictModel):
    kernel: list[list[float]]
    bias: list[float] = [0.0]
    noise_sigma: float = Field(default=0.0, ge=0.0)
    height: int = Field(default=24, ge=1)
    width: int = Field(default=24, ge=1)
    channels: Literal[1, 3] = 1


class BridgeParams(_StrictModel):
    modality: Literal["text", "image", "vector"]
    command: list[str] | None = None
    address: str | None = None  # host:port
    timeout: float = Field(default=30.0, gt=0.0)

    @model_validator(mode="after")
    def _one_endpoint(self) -> "BridgeParams":
        if (self.command is None) == (self.address is None):
            raise ValueError("exactly one of command or address must be set")
        return self


class GeneratorSpec(_StrictModel):
    id: str = Field(min_length=1)
    kind: Literal["synthetic-vector", "synthetic-text", "synthetic-inpaint", "bridge"]
    parameters: dict

    def typed_parameters(self) -> VectorParams | TextParams | InpaintParams | BridgeParams:
        model = {
            "synthetic-vector": VectorParams,
            "synthetic-text": TextParams,
            "synthetic-inpaint": InpaintParams,
            "bridge": BridgeParams,
        }[self.kind]
        return model.model_validate(self.parameters)

    @model_validator(mode="after")
    def _check_parameters(self) -> "GeneratorSpec":
        self.typed_parameters()
        return self


class CorpusConfig(_StrictModel):
    size: int = Field(ge=1)
    prompts: list[str] | None = None

    @field_validator("prompts")
    @classmethod
    def _non_empty_prompts(cls, prompts: list[str] | None) -> list[str] | None:
        if prompts is not None and any(not p for p in prompts):
            raise ValueError("prompts must be non-empty strings")
        return prompts


class ModeConfig(_StrictModel):
    kind: Literal["full", "watermark", "fingerprint"] = "full"
    watermark_n: int = Field(default=10, ge=2)
    segments: int = Field(default=8, ge=2)
    scheme: Literal["striped", "seeded-random"] = "striped"


class WordSubstitutionAttack(_StrictModel):
    kind: Literal["word_substitution"]
    rates: list[float] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]

    @field_validator("rates")
    @classmethod
    def _rates_in_range(cls, rates: list[float]) -> list[float]:
        if not rates or any(not 0.0 <= r <= 1.0 for r in rates):
            raise ValueError("rates must be non-empty and lie in [0, 1]")
        return rates


class GaussianNoiseAttack(_StrictModel):
    kind: Literal["gaussian_noise"]
    fractions: list[float] = [0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0]
    mu: float = 0.0
    sigma: float = Field(default=4.0, ge=0.0)

    @field_validator("fractions")
    @classmethod
    def _fractions_in_range(cls, fractions: list[float]) -> list[float]:
        if not fractions or any(not 0.0 <= f <= 1.0 for f in fractions):
            raise ValueError("fractions must be non-empty and lie in [0, 1]")
        return fractions


class BrightnessAttack(_StrictModel):
    kind: Literal["brightness"]
    factors: list[float] = [1.0, 1.01, 1.02, 1.05, 1.1, 1.5]
    fraction: float = Field(default=0.1, ge=0.0, le=1.0)

    @field_validator("factors")
    @classmethod
    def _factors_positive(cls, factors: list[float]) -> list[float]:
        if not factors or any(f <= 0 for f in factors):
            raise ValueError("factors must be non-empty and > 0")
        return factors


class ParaphraseAttack(_StrictModel):
    kind: Literal["paraphrase"]
    authentic: str
    paraphraser: str
    ks: list[int] = [1, 3, 5]

    @field_validator("ks")
    @classmethod
    def _ks_non_negative(cls, ks: list[int]) -> list[int]:
        if not ks or any(k < 0 for k in ks):
            raise ValueError("ks must be non-empty and >= 0")
        return ks


class NaturalVsGeneratedAttack(_StrictModel):
    kind: Literal["natural_vs_generated"]
    natural_dir: str | None = None  # canonical / PGM / PPM files; synthesized when absent
    natural_size: int | None = Field(default=None, ge=1)


AttackSpec = Union[
    WordSubstitutionAttack,
    GaussianNoiseAttack,
    BrightnessAttack,
    ParaphraseAttack,
    NaturalVsGeneratedAttack,
]

KNOWN_METRICS = {"bleu", "rouge_l", "mse", "ssim", "euclidean", "cosine"}


class ExperimentConfig(_StrictModel):
    master_seed: int = Field(ge=0, lt=2**64)
    output_dir: str = Field(min_length=1)
    corpus: CorpusConfig
    iterations: int = Field(ge=0)
    metrics: list[str] = Field(min_length=1)
    deltas: list[float]
    zoo: list[GeneratorSpec] = Field(min_length=1)
    mode: ModeConfig = ModeConfig()
    verify_at: list[int] | None = None
    density_at: list[int] | None = None
    attacks: list[AttackSpec] = []
    density_bins: int = Field(default=20, ge=2)
    lipschitz_samples: int = Field(default=50, ge=2)
    # Endpoints backing "bridge:<name>" metrics, keyed by <name>.
    bridge_metrics: dict[str, BridgeParams] = {}

    @model_validator(mode="before")
    @classmethod
    def _accept_scalar_delta(cls, data: dict) -> dict:
        if isinstance(data, dict) and "delta" in data and "deltas" not in data:
            data = dict(data)
            data["deltas"] = [data.pop("delta")]
        return data

    @field_validator("metrics")
    @classmethod
    def _known_metrics(cls, metrics: list[str]) -> list[str]:
        for metric in metrics:
            if metric not in KNOWN_METRICS and not metric.startswith("bridge:"):
                raise ValueError(f"unknown metric {metric!r}")
        return metrics

    @field_validator("deltas")
    @classmethod
    def _deltas_increasing(cls, deltas: list[float]) -> list[float]:
        if not deltas or any(d <= 0 for d in deltas):
            raise ValueError("deltas must be non-empty and > 0")
        if any(b <= a for a, b in zip(deltas, deltas[1:])):
            raise ValueError("deltas must be strictly increasing")
        return deltas

    @model_validator(mode="after")
    def _cross_checks(self) -> "ExperimentConfig":
        ids = [g.id for g in self.zoo]
        if len(set(ids)) != len(ids):
            raise ValueError("zoo generator ids must be unique")
        for metric in self.metrics:
            if metric.startswith("bridge:") and metric.removeprefix("bridge:") not in self.bridge_metrics:
                raise ValueError(f"metric {metric!r} has no bridge_metrics endpoint entry")
        for ks, name in ((self.verify_at, "verify_at"), (self.density_at, "density_at")):
            if ks is not None and any(not 0 <= k <= self.iterations for k in ks):
                raise ValueError(f"{name} entries must lie in [0, iterations]")
        shapes = {
            (p.height, p.width, p.channels)
            for g in self.zoo
            if isinstance(p := g.typed_parameters(), InpaintParams)
        }
        if len(shapes) > 1:
            raise ValueError("all image generators in a zoo must share one shape")
        for attack in self.attacks:
            if isinstance(attack, ParaphraseAttack):
                missing = {attack.authentic, attack.paraphraser} - set(ids)
                if missing:
                    raise ValueError(f"paraphrase attack references unknown generators {sorted(missing)}")
                if any(k > self.iterations for k in attack.ks):
                    raise ValueError("paraphrase attack ks must not exceed iterations")
        return self

    @property
    def verify_iterations(self) -> list[int]:
        return self.verify_at if self.verify_at is not None else [self.iterations]

    @property
    def density_iterations(self) -> list[int]:
        return self.density_at if self.density_at is not None else [self.iterations]

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def parse_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        lines = [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        ]
        raise ConfigInvalid("invalid experiment config:\n  " + "\n  ".join(lines)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    return parse_config(data)


def build_generator(spec: GeneratorSpec) -> Generator:
    """Instantiate the generator a spec describes (bridge specs need a live endpoint)."""
    params = spec.typed_parameters()
    if isinstance(params, VectorParams):
        return VectorGenerator(
            spec.id,
            VectorGenParams(
                dim=params.dim,
                fixed_point=tuple(params.fixed_point),
                contraction=params.contraction,
                rotation_seed=params.rotation_seed,
                noise_sigma=params.noise_sigma,
                init_spread=params.init_spread,
            ),
        )
    if isinstance(params, TextParams):
        return TextGenerator(
            spec.id,
            TextGenParams(
                synonym_groups=tuple(tuple(g) for g in params.synonym_groups),
                preference={int(k): v for k, v in params.preference.items()},
                p_sub=params.p_sub,
                p_noise=params.p_noise,
                init_length=params.init_length,
                group_fraction=params.group_fraction,
            ),
        )
    if isinstance(params, InpaintParams):
        return InpaintGenerator(
            spec.id,
            InpaintGenParams(
                kernel=tuple(tuple(row) for row in params.kernel),
                bias=tuple(params.bias),
                noise_sigma=params.noise_sigma,
                height=params.height,
                width=params.width,
                channels=params.channels,
            ),
        )
    # Bridge generators hold subprocess state; the bridge module owns them.
    from .bridge import bridge_generator_from_params

    return bridge_generator_from_params(spec.id, params)


class RunManifest(BaseModel):
    """Deterministic record of one pipeline command's outputs.

    Wall-clock timing lives in the run log, not here, so that re-runs with
    the same config and seed produce byte-identical manifests.
    """

    command: str
    tool_version: str = __version__
    config_sha256: str
    output_dir: str
    artifacts: list[dict]  # {"path": relative path, "sha256": hex, "bytes": int}

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":")) + "\n"


def file_digest(path: Path) -> dict:
    data = path.read_bytes()
    return {"sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}


def build_manifest(command: str, config: ExperimentConfig, root: Path, files: list[Path]) -> RunManifest:
    artifacts = []
    for path in sorted(files):
        entry = {"path": path.relative_to(root).as_posix()}
        entry.update(file_digest(path))
        artifacts.append(entry)
    return RunManifest(
        command=command,
        config_sha256=config.sha256(),
        output_dir=str(root),
        artifacts=artifacts,
    )
