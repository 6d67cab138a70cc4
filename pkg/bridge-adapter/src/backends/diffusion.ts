// Masked image re-generation through a self-hosted diffusion inpainting
// HTTP service.
//
// Expected service contract (documented, not vendor-specific): POST
// {base_url}/inpaint with {image_b64, height, width, channels, mask, seed,
// prompt?} returning {image_b64} of identical shape.  A text-to-image
// endpoint POST {base_url}/generate with {prompt, seed} serves
// generate_initial.

import { BackendConfig, apiKey } from "../config.js";
import { BackendError, ImageSample, Mask, Modality, Sample } from "../protocol.js";
import { requireModality, validateSample } from "../samples.js";
import { Backend, UnsupportedOp, httpJson } from "./base.js";

export class DiffusionBackend implements Backend {
  constructor(private readonly config: BackendConfig) {}

  private async call(path: string, body: Record<string, unknown>): Promise<Record<string, unknown>> {
    return httpJson(
      this.config,
      `${this.config.baseUrl!.replace(/\/$/, "")}${path}`,
      { model: this.config.model, ...body },
      { authorization: `Bearer ${apiKey(this.config)}` },
    );
  }

  private imageBack(doc: Record<string, unknown>, like: ImageSample): ImageSample {
    const sample = validateSample({
      modality: "image",
      height: like.height,
      width: like.width,
      channels: like.channels,
      pixels_b64: doc.image_b64,
    });
    return sample as ImageSample;
  }

  async generateInitial(prompt: string, modality: Modality, seed: number): Promise<Sample> {
    if (modality !== "image") {
      throw new BackendError(`diffusion backend serves images, not ${modality}`);
    }
    const doc = await this.call("/generate", { prompt, seed });
    const sample = validateSample(doc.sample ?? doc);
    requireModality(sample, "image");
    return sample;
  }

  async regenerate(sample: Sample, seed: number): Promise<Sample> {
    requireModality(sample, "image");
    const image = sample as ImageSample;
    const positions: [number, number][] = [];
    for (let row = 0; row < image.height; row++) {
      for (let col = 0; col < image.width; col++) {
        positions.push([row, col]);
      }
    }
    return this.regenerateMasked(image, { positions, height: image.height, width: image.width }, seed);
  }

  async regenerateMasked(sample: ImageSample, mask: Mask, seed: number): Promise<Sample> {
    if (mask.positions.length === 0) {
      return sample;  // nothing to repaint; skip the upstream round trip
    }
    const doc = await this.call("/inpaint", {
      image_b64: sample.pixels_b64,
      height: sample.height,
      width: sample.width,
      channels: sample.channels,
      mask: mask.positions,
      seed,
    });
    return this.imageBack(doc, sample);
  }

  async distance(): Promise<number> {
    throw new UnsupportedOp("distance", this.config.backend);
  }
}
