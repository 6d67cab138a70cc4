"""Default synthetic model zoos.

Four models per modality, mirroring a four-way comparison grid: vector
models with contraction factors {0.5, 0.7, 0.9, 0.95} and distinct fixed
points, text models with disagreeing synonym preferences, and inpainting
models pulling images toward well-separated intensity equilibria.

Fixed points are drawn from a frozen seed so the zoo is identical on every
run; parameter blocks are plain dicts ready for ExperimentConfig.
"""

from __future__ import annotations

from .seeding import SeedSpec

ZOO_SEED = SeedSpec(0xF1A9)

VECTOR_DIM = 16
VECTOR_CONTRACTIONS = (0.5, 0.7, 0.9, 0.95)
VECTOR_NOISE = 0.02

SYNONYM_GROUPS = (
    ("car", "auto", "vehicle", "automobile"),
    ("big", "large", "huge", "vast"),
    ("quick", "fast", "rapid", "swift"),
    ("road", "street", "route", "lane"),
    ("house", "home", "dwelling", "residence"),
    ("happy", "glad", "joyful", "cheerful"),
    ("cold", "chilly", "frigid", "icy"),
    ("begin", "start", "commence", "initiate"),
    ("child", "kid", "youngster", "minor"),
    ("look", "glance", "gaze", "peek"),
    ("small", "little", "tiny", "petite"),
    ("speak", "talk", "converse", "chat"),
)

TEXT_P_SUB = (0.9, 0.9, 0.6, 0.6)
TEXT_P_NOISE = 0.05

# (weight sum, equilibrium level): bias = equilibrium * (1 - weight sum).
# Weight sums stay well below 1 so content reaches each model's intensity
# equilibrium within the five-round window; a near-unit sum would both
# converge too slowly and mimic other models' smooth outputs.
INPAINT_STYLES = (
    ("blur", 0.50, 215.0),
    ("corner", 0.55, 90.0),
    ("cross", 0.60, 165.0),
    ("band", 0.45, 40.0),
)
INPAINT_NOISE = 0.5
IMAGE_SIDE = 24


# All kernels share one center coefficient: the center weight is how much
# of a noisy pixel a pass copies straight through, and equalizing it keeps
# site-noise robustness comparable across models.  Fingerprints live in the
# ring shape, the weight sum, and the bias.
KERNEL_CENTER_WEIGHT = 0.1


def _ring_kernel(total: float) -> list[list[float]]:
    ring = (total - KERNEL_CENTER_WEIGHT) / 8.0
    return [
        [ring, ring, ring],
        [ring, KERNEL_CENTER_WEIGHT, ring],
        [ring, ring, ring],
    ]


def _cross_kernel(total: float) -> list[list[float]]:
    arm = (total - KERNEL_CENTER_WEIGHT) / 4.0
    return [
        [0.0, arm, 0.0],
        [arm, KERNEL_CENTER_WEIGHT, arm],
        [0.0, arm, 0.0],
    ]


def _band_kernel(total: float) -> list[list[float]]:
    side = (total - KERNEL_CENTER_WEIGHT) / 2.0
    return [
        [0.0, 0.0, 0.0],
        [side, KERNEL_CENTER_WEIGHT, side],
        [0.0, 0.0, 0.0],
    ]


def _corner_kernel(total: float) -> list[list[float]]:
    corner = (total - KERNEL_CENTER_WEIGHT) / 4.0
    return [
        [corner, 0.0, corner],
        [0.0, KERNEL_CENTER_WEIGHT, 0.0],
        [corner, 0.0, corner],
    ]


_KERNELS = {
    "blur": _ring_kernel,
    "corner": _corner_kernel,
    "cross": _cross_kernel,
    "band": _band_kernel,
}


def default_vector_zoo() -> list[dict]:
    blocks = []
    for index, contraction in enumerate(VECTOR_CONTRACTIONS):
        rng = ZOO_SEED.derive("vector").derive(index).rng()
        fixed_point = [round(float(v), 6) for v in rng.normal(0.0, 6.0, size=VECTOR_DIM)]
        blocks.append(
            {
                "id": f"vec-l{int(contraction * 100)}",
                "kind": "synthetic-vector",
                "parameters": {
                    "dim": VECTOR_DIM,
                    "fixed_point": fixed_point,
                    "contraction": contraction,
                    # The slow models contract along the axes so their
                    # self-distance stays on the (1 - L) scale; a rotation
                    # would dominate (1 - L) for L near 1 and blur the
                    # distinction between their residuals.
                    "rotation_seed": 0 if contraction >= 0.9 else 1000 + index,
                    "noise_sigma": VECTOR_NOISE,
                },
            }
        )
    return blocks


def default_text_zoo() -> list[dict]:
    blocks = []
    for index, p_sub in enumerate(TEXT_P_SUB):
        preference = {gi: group[index % len(group)] for gi, group in enumerate(SYNONYM_GROUPS)}
        blocks.append(
            {
                "id": f"text-{'abcd'[index]}",
                "kind": "synthetic-text",
                "parameters": {
                    "synonym_groups": [list(g) for g in SYNONYM_GROUPS],
                    "preference": {str(k): v for k, v in preference.items()},
                    "p_sub": p_sub,
                    "p_noise": TEXT_P_NOISE,
                },
            }
        )
    return blocks


def default_image_zoo() -> list[dict]:
    blocks = []
    for shape, weight_sum, equilibrium in INPAINT_STYLES:
        bias = round(equilibrium * (1.0 - weight_sum), 6)
        blocks.append(
            {
                "id": f"img-{shape}",
                "kind": "synthetic-inpaint",
                "parameters": {
                    "kernel": _KERNELS[shape](weight_sum),
                    "bias": [bias],
                    "noise_sigma": INPAINT_NOISE,
                    "height": IMAGE_SIDE,
                    "width": IMAGE_SIDE,
                    "channels": 1,
                },
            }
        )
    return blocks


def paraphrase_zoo() -> list[dict]:
    """Four equally-contractive vector models for the cross-model paraphrase study.

    The involved-models-overlap effect requires comparable models: with a
    shared contraction factor the self-edit distance scale matches across
    the zoo, so after a paraphrase by one model over another's output the
    two involved models become statistically indistinguishable while any
    third model stays clearly separable.  Noise is raised so per-sample
    spread dominates the residual asymmetry.
    """
    blocks = []
    for index, name in enumerate("abcd"):
        rng = ZOO_SEED.derive("paraphrase").derive(index).rng()
        fixed_point = [round(float(v), 6) for v in rng.normal(0.0, 5.0, size=VECTOR_DIM)]
        blocks.append(
            {
                "id": f"para-{name}",
                "kind": "synthetic-vector",
                "parameters": {
                    "dim": VECTOR_DIM,
                    "fixed_point": fixed_point,
                    "contraction": 0.5,
                    "rotation_seed": 0,
                    "noise_sigma": 0.35,
                },
            }
        )
    return blocks


def default_zoo(modality: str) -> list[dict]:
    if modality == "vector":
        return default_vector_zoo()
    if modality == "text":
        return default_text_zoo()
    if modality == "image":
        return default_image_zoo()
    raise ValueError(f"unknown modality {modality!r}")


def default_config(modality: str, output_dir: str = "out", size: int = 200, iterations: int = 5) -> dict:
    """A complete experiment config dict mirroring the reference setup:

    corpus of 200, five re-generation rounds, decision margin 0.05, images
    re-generated in fingerprint mode over 8 segments.
    """
    metrics = {"vector": ["euclidean"], "text": ["bleu", "rouge_l"], "image": ["mse", "ssim"]}
    attacks = {
        "vector": [
            {"kind": "paraphrase", "authentic": "vec-l90", "paraphraser": "vec-l95"},
            {"kind": "natural_vs_generated"},
        ],
        "text": [{"kind": "word_substitution"}],
        "image": [
            {"kind": "gaussian_noise"},
            {"kind": "brightness"},
            {"kind": "natural_vs_generated"},
        ],
    }
    return {
        "master_seed": 20240501,
        "output_dir": output_dir,
        "corpus": {"size": size},
        "iterations": iterations,
        "metrics": metrics[modality],
        "deltas": [0.05, 0.1, 0.2, 0.4],
        "zoo": default_zoo(modality),
        "mode": {"kind": "fingerprint", "segments": 8} if modality == "image" else {"kind": "full"},
        "attacks": attacks[modality],
    }


def paraphrase_config(output_dir: str = "out/paraphrase", size: int = 200) -> dict:
    """Config for the cross-model paraphrase study on the equal-contraction zoo."""
    return {
        "master_seed": 20240501,
        "output_dir": output_dir,
        "corpus": {"size": size},
        "iterations": 5,
        "metrics": ["euclidean"],
        "deltas": [0.05],
        "zoo": paraphrase_zoo(),
        "attacks": [
            {"kind": "paraphrase", "authentic": "para-a", "paraphraser": "para-b", "ks": [1, 3, 5]},
        ],
    }
