"""Exception types shared across the toolkit.

Everything domain-level derives from SkatekitError so callers (and the CLI
exit-code mapping) can distinguish validation/domain failures from plain
I/O errors.
"""


class SkatekitError(Exception):
    """Base class for all domain errors raised by this package."""


class PoseFormatError(SkatekitError):
    """Keypoint file is malformed or violates a sequence invariant."""


class ManifestError(SkatekitError):
    """Clip manifest is malformed; message lists every offending row."""


class InsufficientKeypointsError(SkatekitError):
    """Frame has fewer valid keypoints than the scatter computation needs."""

    def __init__(self, n_valid: int, required: int = 3):
        self.n_valid = n_valid
        self.required = required
        super().__init__(
            f"need at least {required} valid keypoints, got {n_valid}"
        )


class EmptyCurveError(SkatekitError):
    """No frame in the sequence yields a computable scatter value."""


class UndefinedAxisError(SkatekitError):
    """Principal axis requested for a frame with zero scatter."""


class RangeEmptyError(SkatekitError):
    """Key-frame search range is empty (clip too short for the radius)."""


class SegmentationError(SkatekitError):
    """Segment layout is impossible (more segments than frames)."""


class ScoreLookupError(SkatekitError):
    """External score table has no entry for a requested frame."""


class ShortClipError(SkatekitError):
    """Clip too short to split into four non-empty jump phases."""


class PipelineError(SkatekitError):
    """Snippet scoring or prediction failed; message names the snippet."""
