// Backend configuration: JSON file merged over environment variables.

import { readFileSync } from "node:fs";

import { BackendError } from "./protocol.js";

export type BackendKind =
  | "echo"
  | "llm-paraphrase"
  | "llm-roundtrip-translation"
  | "diffusion-inpaint"
  | "embedding-metric";

export interface BackendConfig {
  backend: BackendKind;
  /** Base URL of the upstream API (OpenAI-compatible for LLM backends). */
  baseUrl?: string;
  /** Name of the environment variable holding the API credential. */
  apiKeyEnv: string;
  model?: string;
  temperature: number;
  topP: number;
  /** Optional path; every upstream exchange is appended here as JSON lines. */
  auditLog?: string;
  timeoutMs: number;
}

export const BACKEND_KINDS: BackendKind[] = [
  "echo",
  "llm-paraphrase",
  "llm-roundtrip-translation",
  "diffusion-inpaint",
  "embedding-metric",
];

const DEFAULTS = {
  apiKeyEnv: "BRIDGE_API_KEY",
  temperature: 0.7,
  topP: 0.95,
  timeoutMs: 120_000,
};

export function loadConfig(backend: BackendKind, configPath?: string): BackendConfig {
  let fileValues: Record<string, unknown> = {};
  if (configPath) {
    try {
      fileValues = JSON.parse(readFileSync(configPath, "utf-8"));
    } catch (error) {
      throw new BackendError(`cannot read backend config ${configPath}: ${String(error)}`);
    }
  }
  const env = process.env;
  const config: BackendConfig = {
    backend,
    baseUrl: (fileValues.base_url as string) ?? env.BRIDGE_BASE_URL,
    apiKeyEnv: (fileValues.api_key_env as string) ?? env.BRIDGE_API_KEY_ENV ?? DEFAULTS.apiKeyEnv,
    model: (fileValues.model as string) ?? env.BRIDGE_MODEL,
    temperature: Number(fileValues.temperature ?? env.BRIDGE_TEMPERATURE ?? DEFAULTS.temperature),
    topP: Number(fileValues.top_p ?? env.BRIDGE_TOP_P ?? DEFAULTS.topP),
    auditLog: (fileValues.audit_log as string) ?? env.BRIDGE_AUDIT_LOG,
    timeoutMs: Number(fileValues.timeout_ms ?? env.BRIDGE_TIMEOUT_MS ?? DEFAULTS.timeoutMs),
  };
  if (!(config.temperature >= 0 && config.temperature <= 2)) {
    throw new BackendError(`temperature ${config.temperature} outside [0, 2]`);
  }
  if (!(config.topP > 0 && config.topP <= 1)) {
    throw new BackendError(`top_p ${config.topP} outside (0, 1]`);
  }
  if (!(config.timeoutMs > 0)) {
    throw new BackendError("timeout_ms must be positive");
  }
  if (backend !== "echo" && !config.baseUrl) {
    throw new BackendError(`backend ${backend} requires base_url (or BRIDGE_BASE_URL)`);
  }
  return config;
}

export function apiKey(config: BackendConfig): string {
  const key = process.env[config.apiKeyEnv];
  if (!key) {
    throw new BackendError(`credential environment variable ${config.apiKeyEnv} is not set`);
  }
  return key;
}
