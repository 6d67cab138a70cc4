"""Wire protocol for serving external generators and metrics.

Transport is line-delimited JSON: one request object per line on the
endpoint's standard input, one response per line on its standard output
(TCP with identical framing is also supported).  Each request carries a
protocol version, an operation, a client-chosen id the response must echo,
and a plain integer seed; the back-end owns its own determinism story.

See PROTOCOL.md for byte-level examples.
"""

from __future__ import annotations

import json
import queue
import socket
import subprocess
import threading
from dataclasses import dataclass

from .errors import (
    BridgeProtocolError,
    BridgeTimeout,
    EndpointDead,
    UnsupportedModality,
)
from .generators.base import Generator
from .samples import ImageSample, PixelMask, Sample, sample_from_dict, sample_to_dict
from .seeding import SeedSpec

PROTOCOL_VERSION = 1
OPS = ("regenerate", "regenerate_masked", "generate_initial", "distance")


class _Endpoint:
    """One connection with framed line I/O and a receive deadline."""

    def send_line(self, line: str) -> None:
        raise NotImplementedError

    def recv_line(self, timeout: float) -> str:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError


class SubprocessEndpoint(_Endpoint):
    """Child process speaking the protocol over stdin/stdout."""

    def __init__(self, command: list[str]):
        try:
            self.process = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise EndpointDead(f"could not start endpoint {command!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        assert self.process.stdout is not None
        for line in self.process.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def send_line(self, line: str) -> None:
        if self.process.poll() is not None:
            raise EndpointDead("endpoint process has exited")
        try:
            assert self.process.stdin is not None
            self.process.stdin.write(line + "\n")
            self.process.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise EndpointDead(f"endpoint pipe closed: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise BridgeTimeout(f"no response within {timeout:.3f}s") from None
        if line is None:
            raise EndpointDead("endpoint closed its output stream")
        return line

    def close(self) -> None:
        if self.process.poll() is None:
            try:
                if self.process.stdin:
                    self.process.stdin.close()
                self.process.terminate()
                self.process.wait(timeout=5)
            except Exception:
                self.process.kill()


class TcpEndpoint(_Endpoint):
    def __init__(self, address: str, connect_timeout: float = 10.0):
        host, _, port = address.rpartition(":")
        try:
            self.sock = socket.create_connection((host, int(port)), timeout=connect_timeout)
        except OSError as exc:
            raise EndpointDead(f"could not connect to {address}: {exc}") from exc
        self._file = self.sock.makefile("rw", encoding="utf-8", newline="\n")

    def send_line(self, line: str) -> None:
        try:
            self._file.write(line + "\n")
            self._file.flush()
        except OSError as exc:
            raise EndpointDead(f"connection lost: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        self.sock.settimeout(timeout)
        try:
            line = self._file.readline()
        except TimeoutError:
            raise BridgeTimeout(f"no response within {timeout:.3f}s") from None
        except OSError as exc:
            raise EndpointDead(f"connection lost: {exc}") from exc
        if line == "":
            raise EndpointDead("endpoint closed the connection")
        return line

    def close(self) -> None:
        try:
            self._file.close()
            self.sock.close()
        except OSError:
            pass


@dataclass
class BridgeResponse:
    id: int | None
    ok: bool
    payload: dict | None
    error: str | None


class BridgeClient:
    """Blocking request/response client with at-most-once semantics.

    One request is in flight per connection; parallelism comes from running
    multiple endpoint instances.
    """

    def __init__(self, endpoint: _Endpoint, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._next_id = 0
        self._line_number = 0
        # One request in flight per connection; concurrent callers queue here.
        self._lock = threading.Lock()
        self._id_lock = threading.Lock()

    @classmethod
    def spawn(cls, command: list[str], timeout: float = 30.0) -> "BridgeClient":
        return cls(SubprocessEndpoint(command), timeout)

    @classmethod
    def connect(cls, address: str, timeout: float = 30.0) -> "BridgeClient":
        return cls(TcpEndpoint(address), timeout)

    def close(self) -> None:
        self.endpoint.close()

    def __enter__(self) -> "BridgeClient":
        return self

    def __exit__(self, *_exc) -> None:
        self.close()

    def call_raw(self, request_line: str) -> BridgeResponse:
        """Send one pre-framed line and parse the response (conformance hook)."""
        with self._lock:
            self.endpoint.send_line(request_line)
            line = self.endpoint.recv_line(self.timeout)
            self._line_number += 1
            line_number = self._line_number
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeProtocolError(
                f"response line {line_number} is not valid JSON: {exc}"
            ) from exc
        if not isinstance(doc, dict) or "ok" not in doc:
            raise BridgeProtocolError(
                f"response line {line_number} lacks the required fields"
            )
        return BridgeResponse(doc.get("id"), bool(doc["ok"]), doc.get("payload"), doc.get("error"))

    def call(self, op: str, payload: dict, seed: int = 0) -> dict:
        if op not in OPS:
            raise BridgeProtocolError(f"unknown op {op!r}")
        with self._id_lock:
            self._next_id += 1
            request_id = self._next_id
        request = {"v": PROTOCOL_VERSION, "op": op, "id": request_id, "payload": payload, "seed": seed}
        response = self.call_raw(json.dumps(request, separators=(",", ":")))
        if response.id != request_id:
            raise BridgeProtocolError(
                f"response id {response.id!r} does not match request id {request_id}"
            )
        if not response.ok:
            raise BridgeProtocolError(f"endpoint reported failure: {response.error}")
        if response.payload is None:
            raise BridgeProtocolError("ok response carries no payload")
        return response.payload


def bridge_call(client: BridgeClient, op: str, payload: dict, seed: int = 0) -> dict:
    """Module-level form of :meth:`BridgeClient.call`."""
    return client.call(op, payload, seed)


def mask_to_payload(mask: PixelMask) -> dict:
    return {
        "positions": [[r, c] for r, c in sorted(mask.positions)],
        "height": mask.image_shape[0],
        "width": mask.image_shape[1],
    }


class BridgeGenerator(Generator):
    """A Generator served by an external process; interchangeable with built-ins."""

    kind = "bridge"

    def __init__(self, id: str, modality: str, client: BridgeClient):
        if modality not in ("text", "image", "vector"):
            raise UnsupportedModality(f"unknown modality {modality!r}")
        self.id = id
        self.modality = modality
        self.client = client

    def _sample_back(self, payload: dict) -> Sample:
        try:
            sample = sample_from_dict(payload["sample"])
        except (KeyError, ValueError, TypeError) as exc:
            raise BridgeProtocolError(f"endpoint returned an invalid sample: {exc}") from exc
        if sample.modality != self.modality:
            raise BridgeProtocolError(
                f"endpoint returned {sample.modality}, expected {self.modality}"
            )
        return sample

    def generate_initial(self, prompt: str, seed: SeedSpec) -> Sample:
        payload = self.client.call(
            "generate_initial", {"prompt": prompt, "modality": self.modality}, seed.as_int()
        )
        return self._sample_back(payload)

    def regenerate(self, sample: Sample, seed: SeedSpec) -> Sample:
        self.check_modality(sample)
        payload = self.client.call("regenerate", {"sample": sample_to_dict(sample)}, seed.as_int())
        result = self._sample_back(payload)
        if sample.modality == "image" and result.shape != sample.shape:
            raise BridgeProtocolError("endpoint changed the image shape")
        return result

    def regenerate_masked(self, sample: ImageSample, mask: PixelMask, seed: SeedSpec) -> ImageSample:
        self.check_modality(sample)
        mask.validate_against(sample)
        payload = self.client.call(
            "regenerate_masked",
            {"sample": sample_to_dict(sample), "mask": mask_to_payload(mask)},
            seed.as_int(),
        )
        result = self._sample_back(payload)
        if result.shape != sample.shape:
            raise BridgeProtocolError("endpoint changed the image shape")
        return result


class BridgeMetric:
    """Distance served over the bridge (embedding models and the like)."""

    def __init__(self, metric_id: str, modality: str, client: BridgeClient):
        self.id = metric_id
        self.modality = modality
        self.client = client

    def distance(self, candidate: Sample, reference: Sample) -> float:
        payload = self.client.call(
            "distance",
            {
                "metric": self.id.removeprefix("bridge:"),
                "candidate": sample_to_dict(candidate),
                "reference": sample_to_dict(reference),
            },
        )
        value = payload.get("value")
        if not isinstance(value, (int, float)) or value < 0:
            raise BridgeProtocolError(f"endpoint returned an invalid distance: {value!r}")
        return float(value)


def bridge_generator_from_params(generator_id: str, params) -> BridgeGenerator:
    if params.command is not None:
        client = BridgeClient.spawn(params.command, params.timeout)
    else:
        client = BridgeClient.connect(params.address, params.timeout)
    return BridgeGenerator(generator_id, params.modality, client)
