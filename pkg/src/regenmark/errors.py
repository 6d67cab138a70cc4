"""Exception hierarchy shared by every regenmark module."""


class RegenmarkError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameters(RegenmarkError):
    """A generator or metric parameter block failed validation."""


class UnsupportedModality(RegenmarkError):
    """An operation was asked to handle a modality it does not support."""


class EmptySample(RegenmarkError):
    """A text operation received an empty token sequence."""


class ShapeMismatch(RegenmarkError):
    """Two images with different shapes were compared."""


class WindowTooLarge(RegenmarkError):
    """SSIM window exceeds the image extent."""


class LengthMismatch(RegenmarkError):
    """Two vectors of different length were combined."""


class ZeroVector(RegenmarkError):
    """Cosine distance received a zero-norm vector."""


class MaskOutOfBounds(RegenmarkError):
    """A pixel mask references positions outside the image."""


class PlanMismatch(RegenmarkError):
    """A segmentation or watermark plan does not match the image shape."""


class TooManySegments(RegenmarkError):
    """Requested more segments than there are pixels."""


class ModalityMismatch(RegenmarkError):
    """Sample modality does not match the generator or operation."""


class EmptyCorpus(RegenmarkError):
    """A corpus-level operation received no samples."""


class EmptyInput(RegenmarkError):
    """An aggregation received no input records."""


class InsufficientSamples(RegenmarkError):
    """Pairwise estimation needs at least two samples."""


class InconsistentTraces(RegenmarkError):
    """Traces being aggregated disagree on generator or iteration count."""


class ConfigInvalid(RegenmarkError):
    """Experiment configuration failed schema validation."""


class MissingArtifacts(RegenmarkError):
    """A pipeline stage depends on files a previous stage has not produced."""


class BridgeProtocolError(RegenmarkError):
    """The remote endpoint violated the wire protocol."""


class BridgeTimeout(RegenmarkError):
    """The remote endpoint did not answer within the deadline."""


class EndpointDead(RegenmarkError):
    """The remote endpoint process or connection is gone."""
