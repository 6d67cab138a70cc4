import { appendFileSync } from "node:fs";

import { BackendConfig } from "../config.js";
import { BackendError, ImageSample, Mask, Modality, Sample } from "../protocol.js";

export interface Backend {
  generateInitial(prompt: string, modality: Modality, seed: number): Promise<Sample>;
  regenerate(sample: Sample, seed: number): Promise<Sample>;
  regenerateMasked(sample: ImageSample, mask: Mask, seed: number): Promise<Sample>;
  distance(metric: string, candidate: Sample, reference: Sample): Promise<number>;
}

export class UnsupportedOp extends BackendError {
  constructor(op: string, backend: string) {
    super(`backend ${backend} does not serve ${op}`);
  }
}

/** Append one upstream exchange to the audit log, if configured.
 *
 * Hosted APIs are stochastic even at fixed temperature, so raw responses
 * are recorded for audit instead of promising bit-reproducibility. */
export function audit(config: BackendConfig, entry: Record<string, unknown>): void {
  if (!config.auditLog) {
    return;
  }
  const line = JSON.stringify({ at: new Date().toISOString(), ...entry });
  try {
    appendFileSync(config.auditLog, line + "\n", "utf-8");
  } catch {
    // Auditing must never take the serving loop down.
  }
}

export async function httpJson(
  config: BackendConfig,
  url: string,
  body: Record<string, unknown>,
  headers: Record<string, string>,
): Promise<Record<string, unknown>> {
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "content-type": "application/json", ...headers },
      body: JSON.stringify(body),
      signal: AbortSignal.timeout(config.timeoutMs),
    });
  } catch (error) {
    throw new BackendError(`upstream request failed: ${String(error)}`);
  }
  const text = await response.text();
  audit(config, { url, request: body, status: response.status, response: text });
  if (!response.ok) {
    throw new BackendError(`upstream returned HTTP ${response.status}: ${text.slice(0, 300)}`);
  }
  try {
    return JSON.parse(text) as Record<string, unknown>;
  } catch {
    throw new BackendError("upstream returned non-JSON body");
  }
}
