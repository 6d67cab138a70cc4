from .base import Generator, generate_initial
from .synthetic import (
    InpaintGenParams,
    InpaintGenerator,
    TextGenParams,
    TextGenerator,
    VectorGenParams,
    VectorGenerator,
    canonical_text,
    inpaint_regenerate_masked,
    text_regenerate,
    vector_regenerate,
)

__all__ = [
    "Generator",
    "generate_initial",
    "InpaintGenParams",
    "InpaintGenerator",
    "TextGenParams",
    "TextGenerator",
    "VectorGenParams",
    "VectorGenerator",
    "canonical_text",
    "inpaint_regenerate_masked",
    "text_regenerate",
    "vector_regenerate",
]
