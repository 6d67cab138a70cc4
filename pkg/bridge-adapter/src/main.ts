#!/usr/bin/env node
// Entry point: pick a backend, then serve the line-delimited JSON protocol
// on stdin/stdout until end of stream.
//
//   regenmark-bridge --backend echo
//   regenmark-bridge --backend llm-roundtrip-translation --config backend.json

import { BACKEND_KINDS, BackendKind, loadConfig } from "./config.js";
import { BackendError } from "./protocol.js";
import { Backend } from "./backends/base.js";
import { DiffusionBackend } from "./backends/diffusion.js";
import { EchoBackend } from "./backends/echo.js";
import { EmbeddingBackend } from "./backends/embedding.js";
import { LlmBackend } from "./backends/llm.js";
import { serve } from "./server.js";

function parseArgs(argv: string[]): { backend: BackendKind; configPath?: string } {
  let backend: string | undefined;
  let configPath: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--backend") {
      backend = argv[++i];
    } else if (argv[i] === "--config") {
      configPath = argv[++i];
    } else {
      throw new BackendError(`unknown argument ${argv[i]}`);
    }
  }
  if (!backend || !BACKEND_KINDS.includes(backend as BackendKind)) {
    throw new BackendError(`--backend must be one of: ${BACKEND_KINDS.join(", ")}`);
  }
  return { backend: backend as BackendKind, configPath };
}

function buildBackend(backend: BackendKind, configPath?: string): Backend {
  const config = loadConfig(backend, configPath);
  switch (backend) {
    case "echo":
      return new EchoBackend();
    case "llm-paraphrase":
      return new LlmBackend(config, false);
    case "llm-roundtrip-translation":
      return new LlmBackend(config, true);
    case "diffusion-inpaint":
      return new DiffusionBackend(config);
    case "embedding-metric":
      return new EmbeddingBackend(config);
  }
}

async function main(): Promise<void> {
  try {
    const { backend, configPath } = parseArgs(process.argv.slice(2));
    await serve(buildBackend(backend, configPath));
  } catch (error) {
    process.stderr.write(`fatal: ${error instanceof Error ? error.message : String(error)}\n`);
    process.exit(1);
  }
}

void main();
