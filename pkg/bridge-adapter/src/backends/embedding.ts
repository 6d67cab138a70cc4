// Embedding-based distances (cosine distance between upstream embeddings).

import { BackendConfig, apiKey } from "../config.js";
import { BackendError, Sample, TextSample } from "../protocol.js";
import { cosineDistance, textToString } from "../samples.js";
import { Backend, UnsupportedOp, httpJson } from "./base.js";

export class EmbeddingBackend implements Backend {
  constructor(private readonly config: BackendConfig) {}

  private asInput(sample: Sample): string {
    if (sample.modality === "text") {
      return textToString(sample as TextSample);
    }
    throw new BackendError("embedding backend expects text samples");
  }

  async distance(_metric: string, candidate: Sample, reference: Sample): Promise<number> {
    const doc = await httpJson(
      this.config,
      `${this.config.baseUrl!.replace(/\/$/, "")}/embeddings`,
      {
        model: this.config.model ?? "text-embedding-3-small",
        input: [this.asInput(candidate), this.asInput(reference)],
      },
      { authorization: `Bearer ${apiKey(this.config)}` },
    );
    const data = doc.data as Array<{ embedding?: unknown }> | undefined;
    const a = data?.[0]?.embedding;
    const b = data?.[1]?.embedding;
    if (!Array.isArray(a) || !Array.isArray(b)) {
      throw new BackendError("upstream returned no embeddings");
    }
    return cosineDistance(a as number[], b as number[]);
  }

  async generateInitial(): Promise<Sample> {
    throw new UnsupportedOp("generate_initial", this.config.backend);
  }

  async regenerate(): Promise<Sample> {
    throw new UnsupportedOp("regenerate", this.config.backend);
  }

  async regenerateMasked(): Promise<Sample> {
    throw new UnsupportedOp("regenerate_masked", this.config.backend);
  }
}
