"""HTTP service wrapping the core toolkit.

One-shot endpoints expose distances, re-generation, and the ratio test for
interactive use; the /experiments endpoints run whole pipeline stages from
a posted config, writing artifacts server-side and returning the manifest.
Validation problems map to 400/422, missing pipeline artifacts to 409, and
anything else to 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .._version import __version__
from ..config import build_generator
from ..errors import MissingArtifacts, RegenmarkError
from ..experiments import run_analyze, run_attack, run_generate, run_verify
from ..generators.base import generate_initial
from ..metrics import get_metric
from ..seeding import SeedSpec
from ..verification import verify_sample
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="regenmark", version=__version__)

    @app.exception_handler(RegenmarkError)
    async def _domain_error(_request: Request, exc: RegenmarkError) -> JSONResponse:
        status = 409 if isinstance(exc, MissingArtifacts) else 400
        return JSONResponse(
            status_code=status,
            content={"detail": str(exc), "error": type(exc).__name__},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/distance", response_model=schemas.DistanceResponse)
    def distance(request: schemas.DistanceRequest) -> schemas.DistanceResponse:
        metric = get_metric(request.metric, request.parameters)
        value = metric.distance(schemas.to_sample(request.candidate), schemas.to_sample(request.reference))
        return schemas.DistanceResponse(metric=metric.id, value=value)

    @app.post("/generate-initial", response_model=schemas.SampleResponse)
    def generate_initial_endpoint(request: schemas.GenerateInitialRequest) -> schemas.SampleResponse:
        generator = build_generator(request.generator)
        sample = generate_initial(generator, request.prompt, SeedSpec(request.seed))
        return schemas.SampleResponse(sample=schemas.from_sample(sample))

    @app.post("/regenerate", response_model=schemas.SampleResponse)
    def regenerate(request: schemas.RegenerateRequest) -> schemas.SampleResponse:
        generator = build_generator(request.generator)
        seed = SeedSpec(request.seed, tuple(request.labels))
        sample = generator.regenerate(schemas.to_sample(request.sample), seed)
        return schemas.SampleResponse(sample=schemas.from_sample(sample))

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(request: schemas.VerifyRequest) -> schemas.VerifyResponse:
        outcome = verify_sample(
            schemas.to_sample(request.sample),
            build_generator(request.authentic),
            build_generator(request.contrast),
            get_metric(request.metric),
            request.delta,
            SeedSpec(request.seed),
        )
        return schemas.VerifyResponse(
            authentic=outcome.authentic_id,
            contrast=outcome.contrast_id,
            d_auth=outcome.d_auth,
            d_contrast=outcome.d_contrast,
            ratio=outcome.ratio,
            delta=outcome.delta,
            verified=outcome.verified,
        )

    runners = {
        "generate": run_generate,
        "verify": run_verify,
        "analyze": run_analyze,
        "attack": run_attack,
    }
    for name, runner in runners.items():

        def experiment(request: schemas.ExperimentRequest, _runner=runner) -> schemas.ManifestResponse:
            return schemas.ManifestResponse(manifest=_runner(request.config, request.jobs))

        app.post(f"/experiments/{name}", response_model=schemas.ManifestResponse)(experiment)

    return app


app = create_app()
