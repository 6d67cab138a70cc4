"""Generator abstraction: anything that can re-generate content.

A generator owns one modality and three operations: prompt-based initial
generation, full re-generation, and (images only) masked re-generation.
All three are deterministic given the SeedSpec passed in.
"""

from __future__ import annotations

import abc

from ..errors import ModalityMismatch, UnsupportedModality
from ..samples import ImageSample, PixelMask, Sample
from ..seeding import SeedSpec


class Generator(abc.ABC):
    """Behavioral contract shared by synthetic and bridge-backed generators."""

    id: str
    modality: str  # "text" | "image" | "vector"
    kind: str

    @abc.abstractmethod
    def generate_initial(self, prompt: str, seed: SeedSpec) -> Sample:
        """Produce an initial sample conditioned on the prompt."""

    @abc.abstractmethod
    def regenerate(self, sample: Sample, seed: SeedSpec) -> Sample:
        """One full re-generation pass; preserves modality and image shape."""

    def regenerate_masked(self, sample: ImageSample, mask: PixelMask, seed: SeedSpec) -> ImageSample:
        """Re-generate only the masked pixels; identical to input elsewhere."""
        raise UnsupportedModality(f"generator {self.id!r} does not support masked re-generation")

    def check_modality(self, sample: Sample) -> None:
        if sample.modality != self.modality:
            raise ModalityMismatch(
                f"generator {self.id!r} handles {self.modality}, got {sample.modality}"
            )

    def __repr__(self) -> str:
        return f"<{type(self).__name__} id={self.id!r}>"


def generate_initial(generator: Generator, prompt: str, seed: SeedSpec) -> Sample:
    """Prompt-conditioned initial generation (module-level form)."""
    if not prompt:
        raise ValueError("prompt must be non-empty")
    return generator.generate_initial(prompt, seed)
