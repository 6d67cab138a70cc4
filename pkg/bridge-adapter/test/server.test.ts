import { describe, expect, it } from "vitest";

import { EchoBackend } from "../src/backends/echo.js";
import { handleLine } from "../src/server.js";

const echo = new EchoBackend();

function request(op: string, payload: Record<string, unknown>, id = 1): string {
  return JSON.stringify({ v: 1, op, id, payload, seed: 0 });
}

const VECTOR = { modality: "vector", values: [1, 2.5] };
const IMAGE = {
  modality: "image",
  height: 2,
  width: 2,
  channels: 1,
  pixels_b64: Buffer.from([1, 2, 3, 4]).toString("base64"),
};

describe("echo serving loop", () => {
  it("echoes regenerate payloads", async () => {
    const response = await handleLine(echo, request("regenerate", { sample: VECTOR }));
    expect(response).toEqual({ id: 1, ok: true, payload: { sample: VECTOR } });
  });

  it("echoes masked regeneration and keeps the shape", async () => {
    const mask = { positions: [[0, 0]], height: 2, width: 2 };
    const response = await handleLine(echo, request("regenerate_masked", { sample: IMAGE, mask }));
    expect(response?.ok).toBe(true);
    expect(response?.payload?.sample).toEqual(IMAGE);
  });

  it("serves fixed initial samples per modality", async () => {
    for (const modality of ["text", "image", "vector"]) {
      const response = await handleLine(echo, request("generate_initial", { prompt: "p", modality }));
      expect(response?.ok).toBe(true);
      expect((response?.payload?.sample as { modality: string }).modality).toBe(modality);
    }
  });

  it("reports distance 0 for equal and 1 for different payloads", async () => {
    const same = await handleLine(echo, request("distance", { metric: "m", candidate: VECTOR, reference: VECTOR }));
    expect(same?.payload?.value).toBe(0);
    const other = await handleLine(echo, request("distance", { metric: "m", candidate: VECTOR, reference: IMAGE }));
    expect(other?.payload?.value).toBe(1);
  });

  it("answers malformed lines with ok=false and a null id", async () => {
    const response = await handleLine(echo, "not json at all");
    expect(response).toMatchObject({ id: null, ok: false });
  });

  it("echoes the id on unknown ops", async () => {
    const response = await handleLine(echo, JSON.stringify({ v: 1, op: "transmogrify", id: 77, payload: {} }));
    expect(response).toMatchObject({ id: 77, ok: false });
  });

  it("rejects out-of-bounds masks", async () => {
    const mask = { positions: [[5, 0]], height: 2, width: 2 };
    const response = await handleLine(echo, request("regenerate_masked", { sample: IMAGE, mask }));
    expect(response?.ok).toBe(false);
    expect(response?.error).toMatch(/outside the image/);
  });

  it("rejects image payloads whose bytes disagree with the shape", async () => {
    const bad = { ...IMAGE, pixels_b64: Buffer.from([1, 2]).toString("base64") };
    const response = await handleLine(echo, request("regenerate", { sample: bad }));
    expect(response?.ok).toBe(false);
  });

  it("skips blank lines", async () => {
    expect(await handleLine(echo, "   ")).toBeNull();
  });
});
