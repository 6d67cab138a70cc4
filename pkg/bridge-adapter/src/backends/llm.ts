// Text re-generation through an OpenAI-compatible chat-completions API,
// either as direct paraphrasing or as round-trip translation
// (English -> French -> English).

import { BackendConfig, apiKey } from "../config.js";
import { BackendError, ImageSample, Mask, Modality, Sample, TextSample } from "../protocol.js";
import { requireModality, stringToText, textToString } from "../samples.js";
import { Backend, UnsupportedOp, httpJson } from "./base.js";

const PARAPHRASE_PROMPT =
  "You are a professional language facilitator. You should paraphrase the following " +
  "sentence and output the final result only:";
const TO_ENGLISH_PROMPT =
  "You are a professional translator. You should translate the following sentence to " +
  "English and output the final result only:";
const TO_FRENCH_PROMPT =
  "You are a professional translator. You should translate the following sentence to " +
  "French and output the final result only:";

export class LlmBackend implements Backend {
  constructor(
    private readonly config: BackendConfig,
    private readonly roundTrip: boolean,
  ) {}

  private async complete(instruction: string, input: string, seed: number): Promise<string> {
    const body: Record<string, unknown> = {
      model: this.config.model ?? "gpt-3.5-turbo",
      temperature: this.config.temperature,
      top_p: this.config.topP,
      seed,
      messages: [{ role: "user", content: `${instruction} ${input}` }],
    };
    const doc = await httpJson(
      this.config,
      `${this.config.baseUrl!.replace(/\/$/, "")}/chat/completions`,
      body,
      { authorization: `Bearer ${apiKey(this.config)}` },
    );
    const choices = doc.choices as Array<{ message?: { content?: unknown } }> | undefined;
    const content = choices?.[0]?.message?.content;
    if (typeof content !== "string" || content.trim() === "") {
      throw new BackendError("upstream returned no completion text");
    }
    return content.trim();
  }

  private async rewrite(text: string, seed: number): Promise<string> {
    if (!this.roundTrip) {
      return this.complete(PARAPHRASE_PROMPT, text, seed);
    }
    const french = await this.complete(TO_FRENCH_PROMPT, text, seed);
    return this.complete(TO_ENGLISH_PROMPT, french, seed + 1);
  }

  async generateInitial(prompt: string, modality: Modality, seed: number): Promise<Sample> {
    if (modality !== "text") {
      throw new BackendError(`llm backend serves text, not ${modality}`);
    }
    return stringToText(await this.complete(prompt, "", seed));
  }

  async regenerate(sample: Sample, seed: number): Promise<Sample> {
    requireModality(sample, "text");
    return stringToText(await this.rewrite(textToString(sample as TextSample), seed));
  }

  async regenerateMasked(_sample: ImageSample, _mask: Mask, _seed: number): Promise<Sample> {
    throw new UnsupportedOp("regenerate_masked", this.config.backend);
  }

  async distance(): Promise<number> {
    throw new UnsupportedOp("distance", this.config.backend);
  }
}
