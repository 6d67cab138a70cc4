"""Conformance suite for bridge endpoints (the ``bridge-check`` command).

Exercises every protocol operation, the framing error path, id bookkeeping
across many sequential calls, and the client-side timeout machinery (the
latter against a deliberately silent child process, since a conformant
endpoint never goes quiet).
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass

import numpy as np

from .bridge import BridgeClient, PROTOCOL_VERSION
from .errors import BridgeProtocolError, BridgeTimeout, RegenmarkError
from .samples import ImageSample, PixelMask, TextSample, VectorSample, sample_from_dict, sample_to_dict

SILENT_ENDPOINT = [sys.executable, "-c", "import time; time.sleep(60)"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _sample_fixtures() -> dict:
    image = ImageSample(np.arange(36, dtype=np.uint8).reshape(6, 6, 1))
    return {
        "vector": VectorSample(np.array([1.0, -2.5, 3.25])),
        "text": TextSample(("the", "quick", "fox")),
        "image": image,
        "mask": PixelMask(frozenset({(0, 0), (2, 3)}), (6, 6)),
    }


def run_conformance(make_client, timeout: float = 10.0) -> list[CheckResult]:
    """Run all checks; ``make_client`` builds a fresh client per phase."""
    fixtures = _sample_fixtures()
    results: list[CheckResult] = []

    def check(name: str, fn) -> None:
        try:
            fn()
            results.append(CheckResult(name, True))
        except AssertionError as exc:
            results.append(CheckResult(name, False, str(exc)))
        except RegenmarkError as exc:
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))

    with make_client() as client:

        def op_regenerate():
            payload = client.call("regenerate", {"sample": sample_to_dict(fixtures["vector"])}, seed=7)
            sample = sample_from_dict(payload["sample"])
            assert sample.modality == "vector", "regenerate must preserve modality"

        def op_regenerate_masked():
            from .bridge import mask_to_payload

            payload = client.call(
                "regenerate_masked",
                {"sample": sample_to_dict(fixtures["image"]), "mask": mask_to_payload(fixtures["mask"])},
                seed=7,
            )
            sample = sample_from_dict(payload["sample"])
            assert sample.modality == "image", "regenerate_masked must return an image"
            assert sample.shape == fixtures["image"].shape, "image shape must be preserved"
            masked = {(0, 0), (2, 3)}
            for r in range(6):
                for c in range(6):
                    if (r, c) not in masked:
                        assert (
                            sample.pixels[r, c, 0] == fixtures["image"].pixels[r, c, 0]
                        ), f"unmasked pixel ({r},{c}) changed"

        def op_generate_initial():
            payload = client.call("generate_initial", {"prompt": "a storm at sea", "modality": "text"}, seed=3)
            sample = sample_from_dict(payload["sample"])
            assert sample.modality == "text", "generate_initial must honor the requested modality"
            assert len(sample.tokens) > 0, "initial text sample must be non-empty"

        def op_distance():
            doc = sample_to_dict(fixtures["vector"])
            payload = client.call("distance", {"metric": "echo", "candidate": doc, "reference": doc})
            assert payload["value"] == 0.0, "identical samples must be at distance 0"

        def framing_error():
            response = client.call_raw("this is not json")
            assert response.ok is False, "malformed request line must produce ok=false"
            # The connection must survive a framing error.
            payload = client.call("regenerate", {"sample": sample_to_dict(fixtures["vector"])}, seed=1)
            sample_from_dict(payload["sample"])

        def unknown_op():
            request = {"v": PROTOCOL_VERSION, "op": "transmogrify", "id": 999_999, "payload": {}, "seed": 0}
            response = client.call_raw(json.dumps(request, separators=(",", ":")))
            assert response.ok is False, "unknown op must produce ok=false"
            assert response.id == 999_999, "error responses must echo the request id"

        def sequential_ids():
            doc = sample_to_dict(fixtures["text"])
            for i in range(100):
                client.call("regenerate", {"sample": doc}, seed=i)

        check("op: regenerate", op_regenerate)
        check("op: regenerate_masked", op_regenerate_masked)
        check("op: generate_initial", op_generate_initial)
        check("op: distance", op_distance)
        check("framing: malformed request line", framing_error)
        check("framing: unknown op", unknown_op)
        check("ids: 100 sequential calls", sequential_ids)

    def timeout_path():
        with BridgeClient.spawn(SILENT_ENDPOINT, timeout=0.3) as silent:
            try:
                silent.call("regenerate", {"sample": sample_to_dict(fixtures["vector"])})
            except BridgeTimeout:
                return
            raise AssertionError("expected BridgeTimeout against a silent endpoint")

    check("client: timeout path", timeout_path)
    return results


def run_conformance_command(command: list[str] | None, address: str | None, timeout: float = 10.0) -> list[CheckResult]:
    if command is not None:
        make_client = lambda: BridgeClient.spawn(command, timeout)
    elif address is not None:
        make_client = lambda: BridgeClient.connect(address, timeout)
    else:
        raise BridgeProtocolError("bridge-check needs a command or an address")
    return run_conformance(make_client, timeout)
