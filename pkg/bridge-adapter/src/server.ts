// The serving loop: read requests line by line, answer each one in order.
// Request-level failures (bad payloads, upstream errors, unsupported ops)
// become ok=false responses; nothing short of stdin closing stops the loop.

import * as readline from "node:readline";

import {
  BackendError,
  BridgeRequest,
  BridgeResponse,
  ImageSample,
  Modality,
  fail,
  ok,
  parseRequest,
  salvageId,
  serialize,
} from "./protocol.js";
import { requireModality, validateMask, validateSample } from "./samples.js";
import { Backend } from "./backends/base.js";

const MODALITIES: Modality[] = ["text", "image", "vector"];

async function dispatch(backend: Backend, request: BridgeRequest): Promise<BridgeResponse> {
  const payload = request.payload;
  switch (request.op) {
    case "regenerate": {
      const sample = validateSample(payload.sample);
      return ok(request.id, { sample: await backend.regenerate(sample, request.seed) });
    }
    case "regenerate_masked": {
      const sample = validateSample(payload.sample);
      requireModality(sample, "image");
      const image = sample as ImageSample;
      const mask = validateMask(payload.mask, image);
      return ok(request.id, { sample: await backend.regenerateMasked(image, mask, request.seed) });
    }
    case "generate_initial": {
      const prompt = payload.prompt;
      const modality = payload.modality;
      if (typeof prompt !== "string" || prompt === "") {
        throw new BackendError("generate_initial requires a non-empty prompt");
      }
      if (typeof modality !== "string" || !MODALITIES.includes(modality as Modality)) {
        throw new BackendError(`unsupported modality ${JSON.stringify(modality)}`);
      }
      const sample = await backend.generateInitial(prompt, modality as Modality, request.seed);
      return ok(request.id, { sample });
    }
    case "distance": {
      const metric = typeof payload.metric === "string" ? payload.metric : "";
      const candidate = validateSample(payload.candidate);
      const reference = validateSample(payload.reference);
      const value = await backend.distance(metric, candidate, reference);
      if (!Number.isFinite(value) || value < 0) {
        throw new BackendError(`backend produced an invalid distance ${value}`);
      }
      return ok(request.id, { value });
    }
  }
}

export async function handleLine(backend: Backend, line: string): Promise<BridgeResponse | null> {
  const trimmed = line.trim();
  if (trimmed === "") {
    return null;
  }
  let doc: unknown;
  try {
    doc = JSON.parse(trimmed);
  } catch (error) {
    return fail(null, `malformed request line: ${String(error)}`);
  }
  try {
    return await dispatch(backend, parseRequest(doc));
  } catch (error) {
    const message = error instanceof BackendError ? error.message : `internal error: ${String(error)}`;
    return fail(salvageId(doc), message);
  }
}

export async function serve(backend: Backend): Promise<void> {
  const lines = readline.createInterface({ input: process.stdin, terminal: false });
  for await (const line of lines) {
    const response = await handleLine(backend, line);
    if (response !== null) {
      process.stdout.write(serialize(response) + "\n");
    }
  }
}
