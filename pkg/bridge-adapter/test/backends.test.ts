import { afterEach, describe, expect, it } from "vitest";

import { DiffusionBackend } from "../src/backends/diffusion.js";
import { loadConfig } from "../src/config.js";
import { BackendError, ImageSample } from "../src/protocol.js";
import { cosineDistance, validateSample } from "../src/samples.js";

const IMAGE: ImageSample = {
  modality: "image",
  height: 2,
  width: 2,
  channels: 1,
  pixels_b64: Buffer.from([9, 8, 7, 6]).toString("base64"),
};

afterEach(() => {
  delete process.env.BRIDGE_BASE_URL;
});

describe("config", () => {
  it("applies the reference sampling defaults", () => {
    const config = loadConfig("echo");
    expect(config.temperature).toBe(0.7);
    expect(config.topP).toBe(0.95);
  });

  it("requires a base url for remote backends", () => {
    expect(() => loadConfig("llm-paraphrase")).toThrow(/base_url/);
  });

  it("rejects out-of-range sampling values", () => {
    process.env.BRIDGE_BASE_URL = "http://localhost:1";
    process.env.BRIDGE_TEMPERATURE = "9";
    expect(() => loadConfig("llm-paraphrase")).toThrow(/temperature/);
    delete process.env.BRIDGE_TEMPERATURE;
  });
});

describe("diffusion backend", () => {
  it("treats an empty mask as a no-op without calling upstream", async () => {
    process.env.BRIDGE_BASE_URL = "http://localhost:1";  // never contacted
    const backend = new DiffusionBackend(loadConfig("diffusion-inpaint"));
    const out = await backend.regenerateMasked(IMAGE, { positions: [], height: 2, width: 2 }, 0);
    expect(out).toEqual(IMAGE);
  });

  it("refuses non-image initial generation", async () => {
    process.env.BRIDGE_BASE_URL = "http://localhost:1";
    const backend = new DiffusionBackend(loadConfig("diffusion-inpaint"));
    await expect(backend.generateInitial("p", "text", 0)).rejects.toThrow(BackendError);
  });
});

describe("sample helpers", () => {
  it("computes cosine distance", () => {
    expect(cosineDistance([1, 0], [0, 1])).toBeCloseTo(1.0, 12);
    expect(cosineDistance([2, 0], [1, 0])).toBeCloseTo(0.0, 12);
    expect(() => cosineDistance([0, 0], [1, 0])).toThrow(/zero-norm/);
  });

  it("validates samples strictly", () => {
    expect(() => validateSample({ modality: "text", tokens: ["a", ""] })).toThrow(BackendError);
    expect(() => validateSample({ modality: "vector", values: [1, Number.NaN] })).toThrow(BackendError);
    expect(() => validateSample({ modality: "audio" })).toThrow(/unknown modality/);
  });
});
