"""regenmark: authorship verification for generated content.

Generative models leave intrinsic fingerprints in their outputs.  This
toolkit amplifies them by iteratively re-generating content with the
producing model (Stage I) and verifies authorship with a one-step
re-generation distance-ratio test against a contrast model (Stage II),
backed by synthetic generator families whose fingerprints and contraction
behavior are known exactly.
"""

from ._version import __version__
from .samples import ImageSample, PixelMask, Sample, TextSample, VectorSample
from .seeding import SeedSpec, derive_seed

__all__ = [
    "__version__",
    "ImageSample",
    "PixelMask",
    "Sample",
    "TextSample",
    "VectorSample",
    "SeedSpec",
    "derive_seed",
]
