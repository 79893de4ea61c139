"""Pose-sequence analysis toolkit for figure-skating clips.

Parses OpenPose-style keypoint streams and clip manifests, computes
per-frame pose-scatter curves, samples clips by segments and scatter-curve
key frames, composes snippet scores into clip-level predictions, and applies
ISU-style element and program scoring.
"""

from .errors import (
    EmptyCurveError,
    InsufficientKeypointsError,
    ManifestError,
    PipelineError,
    PoseFormatError,
    RangeEmptyError,
    ScoreLookupError,
    SegmentationError,
    ShortClipError,
    SkatekitError,
    UndefinedAxisError,
)
from .pipeline import (
    ProbVector,
    PrototypeScorer,
    ScoreTable,
    ScoreVector,
    SnippetScorer,
    consensus,
    load_score_table,
    pose_features,
    predict_clip,
    softmax,
)
from .pose_io import (
    COCO18_NAMES,
    FSD10_ACTION_TYPES,
    NUM_KEYPOINTS,
    ClipAnnotation,
    Keypoint,
    PoseFrame,
    PoseSequence,
    UnknownActionWarning,
    load_manifest,
    load_pose_sequence,
    parse_manifest,
    parse_pose_sequence,
    save_pose_sequence,
    write_pose_sequence,
)
from .sampling import (
    ExtremeFrame,
    KeyframeNeighborhood,
    SamplePlan,
    find_specific_keyframes,
    make_sample_plan,
    neighborhood,
    plan_from_json,
    plan_to_json,
    segment_bounds,
)
from .scatter import (
    COMPUTED,
    DEFAULT_CONF_THRESHOLD,
    INTERPOLATED,
    INVALID,
    ScatterCurve,
    ScatterSummary,
    ScatterValue,
    frame_scatter,
    moving_average,
    principal_axis,
    scatter_curve,
    scatter_summary,
)
from .scoring import (
    ActionScore,
    PhaseSegmentation,
    ProgramScore,
    score_action,
    score_program,
    segment_phases,
)

__version__ = "0.1.0"
