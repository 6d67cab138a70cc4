// Line-delimited JSON protocol shared with the core pipeline (PROTOCOL.md).
// One request object per input line, one response object per output line.

export const PROTOCOL_VERSION = 1;

export type Modality = "text" | "image" | "vector";

export interface TextSample {
  modality: "text";
  tokens: string[];
}

export interface ImageSample {
  modality: "image";
  height: number;
  width: number;
  channels: 1 | 3;
  pixels_b64: string;
}

export interface VectorSample {
  modality: "vector";
  values: number[];
}

export type Sample = TextSample | ImageSample | VectorSample;

export interface Mask {
  positions: [number, number][];
  height: number;
  width: number;
}

export type Op = "regenerate" | "regenerate_masked" | "generate_initial" | "distance";

export interface BridgeRequest {
  v: number;
  op: Op;
  id: number;
  payload: Record<string, unknown>;
  seed: number;
}

export interface BridgeResponse {
  id: number | null;
  ok: boolean;
  payload?: Record<string, unknown>;
  error?: string;
}

/** Raised by backends for request-level failures; mapped to ok=false. */
export class BackendError extends Error {}

export function ok(id: number, payload: Record<string, unknown>): BridgeResponse {
  return { id, ok: true, payload };
}

export function fail(id: number | null, error: string): BridgeResponse {
  return { id, ok: false, error };
}

export function serialize(response: BridgeResponse): string {
  return JSON.stringify(response);
}

const OPS: Op[] = ["regenerate", "regenerate_masked", "generate_initial", "distance"];

/** Parse and structurally validate one request line; throws BackendError. */
export function parseRequest(doc: unknown): BridgeRequest {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new BackendError("request must be a JSON object");
  }
  const record = doc as Record<string, unknown>;
  if (record.v !== PROTOCOL_VERSION) {
    throw new BackendError(`unsupported protocol version ${JSON.stringify(record.v)}`);
  }
  if (typeof record.id !== "number" || !Number.isInteger(record.id)) {
    throw new BackendError("request id must be an integer");
  }
  if (typeof record.op !== "string" || !OPS.includes(record.op as Op)) {
    throw new BackendError(`unsupported op ${JSON.stringify(record.op)}`);
  }
  const payload = record.payload;
  if (typeof payload !== "object" || payload === null) {
    throw new BackendError("request payload must be an object");
  }
  const seed = typeof record.seed === "number" ? record.seed : 0;
  return {
    v: PROTOCOL_VERSION,
    op: record.op as Op,
    id: record.id,
    payload: payload as Record<string, unknown>,
    seed,
  };
}

/** The integer id of a malformed request, when one can be salvaged for the error reply. */
export function salvageId(doc: unknown): number | null {
  if (typeof doc === "object" && doc !== null && !Array.isArray(doc)) {
    const id = (doc as Record<string, unknown>).id;
    if (typeof id === "number" && Number.isInteger(id)) {
      return id;
    }
  }
  return null;
}
