// Identity backend for integration tests: re-generation returns the input
// unchanged, so the whole verification pipeline sees r = 1 everywhere.

import { ImageSample, Mask, Modality, Sample } from "../protocol.js";
import { FIXED_SAMPLES, samplesEqual } from "../samples.js";
import { Backend } from "./base.js";

export class EchoBackend implements Backend {
  async generateInitial(_prompt: string, modality: Modality, _seed: number): Promise<Sample> {
    return FIXED_SAMPLES[modality];
  }

  async regenerate(sample: Sample, _seed: number): Promise<Sample> {
    return sample;
  }

  async regenerateMasked(sample: ImageSample, _mask: Mask, _seed: number): Promise<Sample> {
    return sample;
  }

  async distance(_metric: string, candidate: Sample, reference: Sample): Promise<number> {
    return samplesEqual(candidate, reference) ? 0.0 : 1.0;
  }
}
