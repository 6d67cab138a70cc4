"""Synthetic generator families with controllable, known fingerprints.

Each family is a parameterized map with a distinct attractor, so the
contraction-driven convergence and verification behavior of the pipeline
can be tested against ground truth:

* vector  -- an affine contraction x* + L.Q.(x - x*) + noise whose Lipschitz
             constant under the Euclidean norm is exactly L when noiseless;
* text    -- per-token synonym canonicalization toward a preferred word per
             synonym group (a length-preserving stand-in for paraphrasing);
* inpaint -- masked kernel smoothing with a per-model bias, pulling images
             toward a model-specific intensity equilibrium.

How prompts map to initial states is our construction (real systems condition
on prompts internally): the prompt is hashed into the random stream and the
initial sample is one generator pass over a prompt-derived draft, so initial
outputs already carry the model's fingerprint.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import EmptySample, InvalidParameters, LengthMismatch
from ..samples import ImageSample, PixelMask, Sample, TextSample, VectorSample
from ..seeding import SeedSpec, stable_hash64
from .base import Generator

# Rounding is half-away-from-zero before clamping, project-wide.


def round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def clamp_to_u8(values: np.ndarray) -> np.ndarray:
    return np.clip(round_half_away(values), 0.0, 255.0).astype(np.uint8)


def _prompt_seed(seed: SeedSpec, prompt: str) -> SeedSpec:
    return seed.derive("prompt").derive(stable_hash64(prompt))


# --- vector family ----------------------------------------------------------


@dataclass(frozen=True)
class VectorGenParams:
    """Affine contraction toward ``fixed_point`` with factor ``contraction``.

    ``rotation_seed`` derives an orthogonal mixing map from composed Givens
    rotations (0 means identity), so the contraction need not be axis-aligned
    while its operator norm stays exactly ``contraction``.
    """

    dim: int
    fixed_point: tuple[float, ...]
    contraction: float
    rotation_seed: int = 0
    noise_sigma: float = 0.0
    init_spread: float = 2.0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidParameters("dim must be >= 1")
        if not 0.0 < self.contraction < 1.0:
            raise InvalidParameters("contraction must lie strictly inside (0, 1)")
        if self.noise_sigma < 0:
            raise InvalidParameters("noise_sigma must be >= 0")
        fp = tuple(float(v) for v in self.fixed_point)
        if len(fp) != self.dim:
            raise InvalidParameters("fixed_point length must equal dim")
        if not all(np.isfinite(fp)):
            raise InvalidParameters("fixed_point must be finite")
        object.__setattr__(self, "fixed_point", fp)


@lru_cache(maxsize=64)
def rotation_matrix(dim: int, rotation_seed: int) -> np.ndarray:
    """Orthogonal map from ``dim`` composed Givens rotations; 0 -> identity.

    Angles are kept small (|theta| <= 0.25 rad) so the residual map (I - L.Q)
    stays on the (1 - L) scale while still mixing coordinates.
    """
    q = np.eye(dim)
    if rotation_seed != 0 and dim > 1:
        rng = SeedSpec(rotation_seed & ((1 << 64) - 1), ("rotation",)).rng()
        for _ in range(dim):
            i, j = rng.choice(dim, size=2, replace=False)
            theta = rng.uniform(-0.25, 0.25)
            c, s = np.cos(theta), np.sin(theta)
            rot = np.eye(dim)
            rot[i, i] = c
            rot[j, j] = c
            rot[i, j] = -s
            rot[j, i] = s
            q = rot @ q
    q.setflags(write=False)
    return q


def vector_regenerate(params: VectorGenParams, x: VectorSample, seed: SeedSpec) -> VectorSample:
    """x* + L.Q.(x - x*) + Normal(0, sigma^2 I) noise."""
    if len(x.values) != params.dim:
        raise LengthMismatch(f"expected dim {params.dim}, got {len(x.values)}")
    q = rotation_matrix(params.dim, params.rotation_seed)
    fp = np.array(params.fixed_point)
    out = fp + params.contraction * (q @ (x.values - fp))
    if params.noise_sigma > 0:
        out = out + seed.rng().normal(0.0, params.noise_sigma, size=params.dim)
    return VectorSample(out)


class VectorGenerator(Generator):
    modality = "vector"
    kind = "synthetic-vector"

    def __init__(self, id: str, params: VectorGenParams):
        self.id = id
        self.params = params

    def generate_initial(self, prompt: str, seed: SeedSpec) -> VectorSample:
        # Drafts scatter around the model's own attractor: fresh outputs of a
        # generator already lie in its own distribution.
        rng = _prompt_seed(seed, prompt).rng()
        offset = rng.normal(0.0, self.params.init_spread, size=self.params.dim)
        draft = VectorSample(np.array(self.params.fixed_point) + offset)
        return self.regenerate(draft, seed.derive("init"))

    def regenerate(self, sample: Sample, seed: SeedSpec) -> VectorSample:
        self.check_modality(sample)
        return vector_regenerate(self.params, sample, seed)


# --- text family ------------------------------------------------------------

# Filler words shared by all text models so corpora are comparable.
NEUTRAL_VOCABULARY = (
    "the", "a", "and", "of", "to", "in", "it", "is", "was", "on", "for", "with",
    "as", "at", "by", "from", "then", "there", "here", "now", "some", "one",
    "two", "after",
)


@dataclass(frozen=True)
class TextGenParams:
    """Per-token synonym rewriting toward a model-specific preferred word.

    A token belonging to a synonym group is rewritten to the group's
    preferred token with probability ``p_sub``, to a uniformly random group
    member with probability ``p_noise``, and kept otherwise.  Tokens outside
    every group pass through unchanged; length is always preserved.
    """

    synonym_groups: tuple[tuple[str, ...], ...]
    preference: dict[int, str]  # group index -> preferred token
    p_sub: float = 0.9
    p_noise: float = 0.0
    init_length: int = 32
    group_fraction: float = 0.6

    def __post_init__(self) -> None:
        groups = tuple(tuple(g) for g in self.synonym_groups)
        object.__setattr__(self, "synonym_groups", groups)
        seen: set[str] = set()
        for group in groups:
            if not group:
                raise InvalidParameters("synonym groups must be non-empty")
            for token in group:
                if token in seen:
                    raise InvalidParameters(f"token {token!r} appears in more than one group")
                seen.add(token)
        if not (0.0 <= self.p_sub <= 1.0 and 0.0 <= self.p_noise <= 1.0):
            raise InvalidParameters("p_sub and p_noise must lie in [0, 1]")
        if self.p_sub + self.p_noise > 1.0:
            raise InvalidParameters("p_sub + p_noise must not exceed 1")
        pref = {int(k): v for k, v in self.preference.items()}
        for idx, token in pref.items():
            if not 0 <= idx < len(groups):
                raise InvalidParameters(f"preference references unknown group {idx}")
            if token not in groups[idx]:
                raise InvalidParameters(f"preferred token {token!r} not in group {idx}")
        object.__setattr__(self, "preference", pref)

    def group_of(self, token: str) -> int | None:
        return self._token_to_group.get(token)

    @property
    def _token_to_group(self) -> dict[str, int]:
        cached = self.__dict__.get("_token_to_group_cache")
        if cached is None:
            cached = {
                token: idx
                for idx, group in enumerate(self.synonym_groups)
                for token in group
            }
            object.__setattr__(self, "_token_to_group_cache", cached)
        return cached

    def vocabulary(self) -> tuple[str, ...]:
        group_tokens = tuple(t for g in self.synonym_groups for t in g)
        return group_tokens + NEUTRAL_VOCABULARY


def text_regenerate(params: TextGenParams, x: TextSample, seed: SeedSpec) -> TextSample:
    if len(x.tokens) == 0:
        raise EmptySample("text_regenerate requires a non-empty sample")
    rng = seed.rng()
    draws = rng.random(len(x.tokens))
    out: list[str] = []
    for token, u in zip(x.tokens, draws):
        idx = params.group_of(token)
        if idx is None:
            out.append(token)
        elif u < params.p_sub:
            out.append(params.preference.get(idx, token))
        elif u < params.p_sub + params.p_noise:
            group = params.synonym_groups[idx]
            out.append(group[rng.integers(len(group))])
        else:
            out.append(token)
    return TextSample(tuple(out))


def canonical_text(params: TextGenParams, x: TextSample) -> TextSample:
    """The model's fixed point for x: every group token forced to its preferred form."""
    return TextSample(
        tuple(
            params.preference.get(params.group_of(t), t) if params.group_of(t) is not None else t
            for t in x.tokens
        )
    )


class TextGenerator(Generator):
    modality = "text"
    kind = "synthetic-text"

    def __init__(self, id: str, params: TextGenParams):
        self.id = id
        self.params = params

    def generate_initial(self, prompt: str, seed: SeedSpec) -> TextSample:
        rng = _prompt_seed(seed, prompt).rng()
        groups = self.params.synonym_groups
        tokens: list[str] = []
        for _ in range(self.params.init_length):
            if groups and rng.random() < self.params.group_fraction:
                group = groups[rng.integers(len(groups))]
                tokens.append(group[rng.integers(len(group))])
            else:
                tokens.append(NEUTRAL_VOCABULARY[rng.integers(len(NEUTRAL_VOCABULARY))])
        return self.regenerate(TextSample(tuple(tokens)), seed.derive("init"))

    def regenerate(self, sample: Sample, seed: SeedSpec) -> TextSample:
        self.check_modality(sample)
        return text_regenerate(self.params, sample, seed)


# --- inpaint family ---------------------------------------------------------


@dataclass(frozen=True)
class InpaintGenParams:
    """Masked 3x3 kernel smoothing with a per-model bias and noise.

    The kernel weights are non-negative and sum to at most 1, so the
    noiseless pass is non-expansive; the bias injects the model-specific
    style that makes fingerprints distinct (equilibrium level near
    bias / (1 - weight_sum) for interior pixels).
    """

    kernel: tuple[tuple[float, float, float], ...]
    bias: tuple[float, ...] = (0.0,)
    noise_sigma: float = 0.0
    height: int = 24
    width: int = 24
    channels: int = 1

    def __post_init__(self) -> None:
        kernel = tuple(tuple(float(w) for w in row) for row in self.kernel)
        if len(kernel) != 3 or any(len(row) != 3 for row in kernel):
            raise InvalidParameters("kernel must be 3x3")
        flat = [w for row in kernel for w in row]
        if any(w < 0 for w in flat):
            raise InvalidParameters("kernel weights must be non-negative")
        if sum(flat) > 1.0 + 1e-12:
            raise InvalidParameters("kernel weights must sum to at most 1")
        object.__setattr__(self, "kernel", kernel)
        bias = tuple(float(b) for b in self.bias)
        if len(bias) not in (1, self.channels):
            raise InvalidParameters("bias must have one entry or one per channel")
        if not all(np.isfinite(bias)):
            raise InvalidParameters("bias must be finite")
        object.__setattr__(self, "bias", bias)
        if self.noise_sigma < 0:
            raise InvalidParameters("noise_sigma must be >= 0")
        if self.channels not in (1, 3):
            raise InvalidParameters("channels must be 1 or 3")
        if self.height < 1 or self.width < 1:
            raise InvalidParameters("height and width must be positive")

    def kernel_array(self) -> np.ndarray:
        return np.array(self.kernel, dtype=np.float64)

    def bias_array(self) -> np.ndarray:
        bias = np.array(self.bias, dtype=np.float64)
        return np.repeat(bias, self.channels) if len(bias) == 1 else bias


def _kernel_smooth(params: InpaintGenParams, pixels: np.ndarray) -> np.ndarray:
    """3x3 weighted sums over the input image with replicated edges, plus bias."""
    kernel = params.kernel_array()
    padded = np.pad(pixels.astype(np.float64), ((1, 1), (1, 1), (0, 0)), mode="edge")
    height, width = pixels.shape[:2]
    out = np.zeros_like(pixels, dtype=np.float64)
    for dr in range(3):
        for dc in range(3):
            weight = kernel[dr, dc]
            if weight != 0.0:
                out += weight * padded[dr : dr + height, dc : dc + width]
    return out + params.bias_array()[np.newaxis, np.newaxis, :]


def inpaint_regenerate_masked(
    params: InpaintGenParams, x: ImageSample, mask: PixelMask, seed: SeedSpec
) -> ImageSample:
    """Replace masked pixels by their smoothed neighborhood value.

    The neighborhood is always read from the input image (masked neighbors
    contribute their input values), so segment passes can run in parallel.
    Unmasked pixels are bit-identical to the input.
    """
    mask.validate_against(x)
    if len(mask) == 0:
        return x
    smoothed = _kernel_smooth(params, x.pixels)
    if params.noise_sigma > 0:
        smoothed = smoothed + seed.rng().normal(0.0, params.noise_sigma, size=smoothed.shape)
    rows, cols = mask.index_arrays()
    out = np.array(x.pixels, copy=True)
    out[rows, cols, :] = clamp_to_u8(smoothed[rows, cols, :])
    return ImageSample(out)


class InpaintGenerator(Generator):
    modality = "image"
    kind = "synthetic-inpaint"

    def __init__(self, id: str, params: InpaintGenParams):
        self.id = id
        self.params = params

    def generate_initial(self, prompt: str, seed: SeedSpec) -> ImageSample:
        rng = _prompt_seed(seed, prompt).rng()
        draft = ImageSample(
            rng.integers(
                0, 256, size=(self.params.height, self.params.width, self.params.channels)
            ).astype(np.uint8)
        )
        return self.regenerate(draft, seed.derive("init"))

    def regenerate(self, sample: Sample, seed: SeedSpec) -> ImageSample:
        """Full pass: every pixel re-generated from its input neighborhood."""
        self.check_modality(sample)
        mask = PixelMask(
            frozenset((r, c) for r in range(sample.height) for c in range(sample.width)),
            (sample.height, sample.width),
        )
        return inpaint_regenerate_masked(self.params, sample, mask, seed)

    def regenerate_masked(self, sample: ImageSample, mask: PixelMask, seed: SeedSpec) -> ImageSample:
        self.check_modality(sample)
        return inpaint_regenerate_masked(self.params, sample, mask, seed)
