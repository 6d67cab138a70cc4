"""Request/response models for the HTTP service.

Sample payloads reuse the canonical JSON sample format, so a sample file
can be POSTed as-is and a response body saved directly back to disk.
"""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from ..config import ExperimentConfig, GeneratorSpec, RunManifest
from ..samples import Sample, sample_from_dict, sample_to_dict


class TextDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    modality: Literal["text"]
    tokens: list[str]


class ImageDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    modality: Literal["image"]
    height: int = Field(ge=1)
    width: int = Field(ge=1)
    channels: Literal[1, 3]
    pixels_b64: str


class VectorDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    modality: Literal["vector"]
    values: list[float]


SampleDoc = Union[TextDoc, ImageDoc, VectorDoc]


def to_sample(doc: SampleDoc) -> Sample:
    return sample_from_dict(doc.model_dump())


def from_sample(sample: Sample) -> dict:
    return sample_to_dict(sample)


class HealthResponse(BaseModel):
    status: str
    version: str


class DistanceRequest(BaseModel):
    metric: str
    candidate: SampleDoc
    reference: SampleDoc
    parameters: dict = {}


class DistanceResponse(BaseModel):
    metric: str
    value: float


class GenerateInitialRequest(BaseModel):
    generator: GeneratorSpec
    prompt: str = Field(min_length=1)
    seed: int = Field(ge=0, lt=2**64)


class RegenerateRequest(BaseModel):
    generator: GeneratorSpec
    sample: SampleDoc
    seed: int = Field(ge=0, lt=2**64)
    labels: list[str | int] = []


class SampleResponse(BaseModel):
    sample: dict


class VerifyRequest(BaseModel):
    sample: SampleDoc
    authentic: GeneratorSpec
    contrast: GeneratorSpec
    metric: str
    delta: float = Field(gt=0.0)
    seed: int = Field(ge=0, lt=2**64)


class VerifyResponse(BaseModel):
    authentic: str
    contrast: str
    d_auth: float
    d_contrast: float
    ratio: float
    delta: float
    verified: bool


class ExperimentRequest(BaseModel):
    config: ExperimentConfig
    jobs: int = Field(default=1, ge=1, le=64)


class ManifestResponse(BaseModel):
    manifest: RunManifest
