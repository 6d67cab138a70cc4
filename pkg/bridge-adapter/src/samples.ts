// Canonical sample payload validation and small helpers.

import {
  BackendError,
  ImageSample,
  Mask,
  Modality,
  Sample,
  TextSample,
  VectorSample,
} from "./protocol.js";

export function validateSample(doc: unknown): Sample {
  if (typeof doc !== "object" || doc === null) {
    throw new BackendError("sample must be an object");
  }
  const record = doc as Record<string, unknown>;
  switch (record.modality) {
    case "text": {
      const tokens = record.tokens;
      if (!Array.isArray(tokens) || tokens.some((t) => typeof t !== "string" || t === "")) {
        throw new BackendError("text sample tokens must be non-empty strings");
      }
      return { modality: "text", tokens: tokens as string[] };
    }
    case "vector": {
      const values = record.values;
      if (!Array.isArray(values) || values.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
        throw new BackendError("vector sample values must be finite numbers");
      }
      return { modality: "vector", values: values as number[] };
    }
    case "image": {
      const { height, width, channels, pixels_b64 } = record;
      if (
        typeof height !== "number" ||
        typeof width !== "number" ||
        (channels !== 1 && channels !== 3) ||
        typeof pixels_b64 !== "string"
      ) {
        throw new BackendError("image sample requires height, width, channels in {1,3}, pixels_b64");
      }
      const bytes = Buffer.from(pixels_b64, "base64");
      if (bytes.length !== height * width * channels) {
        throw new BackendError("image payload length does not match height*width*channels");
      }
      return { modality: "image", height, width, channels, pixels_b64 };
    }
    default:
      throw new BackendError(`unknown modality ${JSON.stringify(record.modality)}`);
  }
}

export function validateMask(doc: unknown, image: ImageSample): Mask {
  if (typeof doc !== "object" || doc === null) {
    throw new BackendError("mask must be an object");
  }
  const record = doc as Record<string, unknown>;
  const { positions, height, width } = record;
  if (!Array.isArray(positions) || typeof height !== "number" || typeof width !== "number") {
    throw new BackendError("mask requires positions, height, width");
  }
  if (height !== image.height || width !== image.width) {
    throw new BackendError("mask shape does not match the image");
  }
  const out: [number, number][] = [];
  for (const entry of positions) {
    if (!Array.isArray(entry) || entry.length !== 2) {
      throw new BackendError("mask positions must be [row, col] pairs");
    }
    const [row, col] = entry as [number, number];
    if (!Number.isInteger(row) || !Number.isInteger(col) || row < 0 || col < 0 || row >= height || col >= width) {
      throw new BackendError(`mask position [${row}, ${col}] outside the image`);
    }
    out.push([row, col]);
  }
  return { positions: out, height, width };
}

export function requireModality(sample: Sample, modality: Modality): void {
  if (sample.modality !== modality) {
    throw new BackendError(`expected a ${modality} sample, got ${sample.modality}`);
  }
}

export function samplesEqual(a: Sample, b: Sample): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}

export function textToString(sample: TextSample): string {
  return sample.tokens.join(" ");
}

export function stringToText(text: string): TextSample {
  const tokens = text.split(/\s+/).filter((t) => t.length > 0);
  if (tokens.length === 0) {
    throw new BackendError("backend produced an empty sentence");
  }
  return { modality: "text", tokens };
}

export function cosineDistance(a: number[], b: number[]): number {
  if (a.length !== b.length) {
    throw new BackendError("embedding lengths differ");
  }
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na === 0 || nb === 0) {
    throw new BackendError("zero-norm embedding");
  }
  return 1 - dot / (Math.sqrt(na) * Math.sqrt(nb));
}

export const FIXED_SAMPLES: Record<Modality, Sample> = {
  text: { modality: "text", tokens: ["echo"] },
  vector: { modality: "vector", values: [0, 1] },
  image: {
    modality: "image",
    height: 1,
    width: 1,
    channels: 1,
    pixels_b64: Buffer.from([0]).toString("base64"),
  },
};

export { VectorSample };
