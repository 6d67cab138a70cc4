"""Deterministic, splittable random streams.

All randomness in the toolkit flows through :class:`SeedSpec`: a master seed
plus an ordered path of labels.  Streams are derived by hashing the full
label path with SHA-256, so the same (master_seed, labels) pair yields the
same stream on every platform and run, and sibling paths are statistically
independent.  There is no global RNG state anywhere.

Python's built-in ``hash()`` is salted per process and must never be used
for seed derivation; :func:`stable_hash64` is the project-wide replacement.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

Label = str | int


def stable_hash64(text: str) -> int:
    """Stable 64-bit hash of UTF-8 text (first 8 bytes of SHA-256, big-endian)."""
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


@dataclass(frozen=True)
class SeedSpec:
    """A master seed plus the derivation path identifying one random stream.

    Labels record where in the pipeline the stream is used (sample index,
    iteration index, ...), so corpus-parallel execution cannot reorder
    randomness.
    """

    master_seed: int
    stream_labels: tuple[Label, ...] = field(default=())

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit int")
        object.__setattr__(self, "stream_labels", tuple(self.stream_labels))

    def derive(self, label: Label) -> "SeedSpec":
        """Append one label to the derivation path."""
        return SeedSpec(self.master_seed, self.stream_labels + (label,))

    def digest(self) -> bytes:
        """32-byte digest identifying this stream."""
        h = hashlib.sha256()
        h.update(b"m:%d" % self.master_seed)
        for label in self.stream_labels:
            # Tag the type so derive(1) and derive("1") stay distinct.
            tag = b"i" if isinstance(label, int) else b"s"
            h.update(b"\x1f" + tag + b":" + str(label).encode("utf-8"))
        return h.digest()

    def rng(self) -> np.random.Generator:
        """Fresh generator for this stream; call sites must not share it."""
        return np.random.default_rng(int.from_bytes(self.digest(), "big"))

    def as_int(self) -> int:
        """64-bit form of the stream identity, for crossing process boundaries."""
        return int.from_bytes(self.digest()[:8], "big")


def derive_seed(base: SeedSpec, label: Label) -> SeedSpec:
    """Functional alias for :meth:`SeedSpec.derive`."""
    return base.derive(label)
