"""Parsing, validation, and serialization of keypoint streams and clip manifests.

Keypoint files are JSON with this exact layout (numbers at full precision):

    {"clip_id": str, "fps": number,
     "frames": [{"frame_index": int, "keypoints": [[x, y, confidence] * 18]}]}

Clip manifests are UTF-8 CSV with the header

    clip_id,action_type,bv_base,second_half,goe,skater_name,skater_gender,skater_age,coach,music

where second_half is "true"/"false", skater_gender is F/M/unknown (empty means
unknown), and skater_age is a nonnegative integer or empty/"unknown".

All parsers are total: any input either yields a fully validated value or
raises a structured error naming the frame/row and field; nothing
partially-populated is ever returned.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass

from .errors import ManifestError, PoseFormatError

NUM_KEYPOINTS = 18

# OpenPose BODY-18 ordering; positional, never reordered.
COCO18_NAMES = (
    "nose", "neck",
    "right_shoulder", "right_elbow", "right_wrist",
    "left_shoulder", "left_elbow", "left_wrist",
    "right_hip", "right_knee", "right_ankle",
    "left_hip", "left_knee", "left_ankle",
    "right_eye", "left_eye", "right_ear", "left_ear",
)

# The ten bundled action classes; anything else parses fine but is flagged.
FSD10_ACTION_TYPES = frozenset({
    "ChComboSpin4", "FlyCamelSpin4", "ChoreoSequence1", "StepSequence3",
    "2Axel", "3Loop", "3Flip", "3Axel", "3Lutz", "3Lutz_3Toeloop",
})

GENDERS = ("F", "M", "unknown")

MANIFEST_HEADER = [
    "clip_id", "action_type", "bv_base", "second_half", "goe",
    "skater_name", "skater_gender", "skater_age", "coach", "music",
]


class UnknownActionWarning(UserWarning):
    """Manifest row whose action_type is outside the ten bundled classes."""


@dataclass(frozen=True)
class Keypoint:
    """One 2-D image-plane keypoint with detector confidence.

    confidence == 0 means "not detected"; x and y are then meaningless and
    must be ignored downstream.
    """

    x: float
    y: float
    confidence: float


@dataclass(frozen=True)
class PoseFrame:
    """Exactly 18 keypoints in COCO18_NAMES order, for one video frame."""

    keypoints: tuple[Keypoint, ...]
    frame_index: int


@dataclass(frozen=True)
class PoseSequence:
    """Ordered frames of one clip; frame_index is contiguous from 0."""

    frames: tuple[PoseFrame, ...]
    fps: float
    clip_id: str

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class ClipAnnotation:
    """One manifest row: action label, scores, and skater metadata.

    skater_age is None when unknown.
    """

    clip_id: str
    action_type: str
    bv_base: float
    second_half: bool
    goe: float
    skater_name: str = ""
    skater_gender: str = "unknown"
    skater_age: int | None = None
    coach: str = ""
    music: str = ""


def _decode(data: bytes | str, what: str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise PoseFormatError(f"{what} is not valid UTF-8: {e}") from None


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _parse_keypoint(entry, frame_label: str, j: int) -> Keypoint:
    where = f"{frame_label}: keypoints[{j}]"
    if not isinstance(entry, (list, tuple)) or len(entry) != 3:
        raise PoseFormatError(f"{where}: expected [x, y, confidence]")
    x, y, conf = entry
    for name, v in (("x", x), ("y", y)):
        if not _is_number(v) or not math.isfinite(v):
            raise PoseFormatError(f"{where}: {name} must be a finite number")
    if not _is_number(conf):
        raise PoseFormatError(f"{where}: confidence must be a number")
    if not (0.0 <= conf <= 1.0):
        raise PoseFormatError(f"{where}: confidence {conf} outside [0, 1]")
    return Keypoint(float(x), float(y), float(conf))


def _parse_frame(obj, position: int) -> PoseFrame:
    if not isinstance(obj, dict):
        raise PoseFormatError(f"frames[{position}]: expected an object")
    idx = obj.get("frame_index")
    if not isinstance(idx, int) or isinstance(idx, bool) or idx < 0:
        raise PoseFormatError(
            f"frames[{position}].frame_index: expected a nonnegative integer"
        )
    label = f"frame {idx}"
    kps = obj.get("keypoints")
    if not isinstance(kps, list):
        raise PoseFormatError(f"{label}: keypoints must be an array")
    if len(kps) != NUM_KEYPOINTS:
        raise PoseFormatError(
            f"{label}: expected {NUM_KEYPOINTS} keypoints, got {len(kps)}"
        )
    points = tuple(_parse_keypoint(entry, label, j) for j, entry in enumerate(kps))
    return PoseFrame(keypoints=points, frame_index=idx)


def parse_pose_sequence(data: bytes | str, format: str = "json") -> PoseSequence:
    """Parse and validate a keypoint file into a PoseSequence.

    Frames are sorted by frame_index; indices must then be contiguous from 0.
    Raises PoseFormatError naming the frame and field on any violation.
    """
    if format != "json":
        raise PoseFormatError(f"unsupported keypoint format '{format}'")
    text = _decode(data, "keypoint file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise PoseFormatError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise PoseFormatError("top-level value must be an object")
    clip_id = doc.get("clip_id")
    if not isinstance(clip_id, str):
        raise PoseFormatError("clip_id: expected a string")
    fps = doc.get("fps")
    if not _is_number(fps) or not math.isfinite(fps) or fps <= 0:
        raise PoseFormatError("fps: expected a positive finite number")
    raw_frames = doc.get("frames")
    if not isinstance(raw_frames, list) or not raw_frames:
        raise PoseFormatError("frames: expected a non-empty array")

    frames = sorted(
        (_parse_frame(obj, pos) for pos, obj in enumerate(raw_frames)),
        key=lambda f: f.frame_index,
    )
    for pos, fr in enumerate(frames):
        if fr.frame_index != pos:
            raise PoseFormatError(f"non-contiguous frame_index at position {pos}")
    return PoseSequence(frames=tuple(frames), fps=float(fps), clip_id=clip_id)


def write_pose_sequence(seq: PoseSequence) -> bytes:
    """Serialize a PoseSequence so that parse(write(s)) == s on all fields."""
    doc = {
        "clip_id": seq.clip_id,
        "fps": seq.fps,
        "frames": [
            {
                "frame_index": f.frame_index,
                "keypoints": [[kp.x, kp.y, kp.confidence] for kp in f.keypoints],
            }
            for f in seq.frames
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def load_pose_sequence(path) -> PoseSequence:
    with open(path, "rb") as fh:
        return parse_pose_sequence(fh.read())


def save_pose_sequence(seq: PoseSequence, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_pose_sequence(seq))


def _row_problems(row: list[str], rownum: int) -> tuple[ClipAnnotation | None, list[str]]:
    clip_id = row[0].strip() if row else ""
    tag = f"row {rownum}" + (f" ({clip_id})" if clip_id else "")
    problems: list[str] = []

    def number(field: str, raw: str, required: bool) -> float | None:
        raw = raw.strip()
        if not raw:
            if required:
                problems.append(f"{tag}: missing required field {field}")
            return None
        try:
            v = float(raw)
        except ValueError:
            problems.append(f"{tag}: {field}: could not parse '{raw}' as a number")
            return None
        if not math.isfinite(v):
            problems.append(f"{tag}: {field}: must be finite")
            return None
        return v

    action_type = row[1].strip()
    if not action_type:
        problems.append(f"{tag}: missing required field action_type")

    bv_base = number("bv_base", row[2], required=True)
    if bv_base is not None and bv_base < 0:
        problems.append(f"{tag}: bv_base: must be nonnegative, got {bv_base}")
        bv_base = None

    raw_half = row[3].strip().lower()
    second_half: bool | None
    if raw_half == "true":
        second_half = True
    elif raw_half == "false":
        second_half = False
    else:
        problems.append(f"{tag}: second_half: expected true or false, got '{row[3]}'")
        second_half = None

    goe = number("goe", row[4], required=True)

    gender = row[6].strip() or "unknown"
    if gender not in GENDERS:
        problems.append(f"{tag}: skater_gender: expected F, M, or unknown, got '{row[6]}'")
        gender = "unknown"

    raw_age = row[7].strip()
    age: int | None = None
    if raw_age and raw_age != "unknown":
        try:
            age = int(raw_age)
        except ValueError:
            problems.append(f"{tag}: skater_age: could not parse '{raw_age}' as an integer")
        else:
            if age < 0:
                problems.append(f"{tag}: skater_age: must be nonnegative, got {age}")
                age = None

    if problems:
        return None, problems
    if action_type not in FSD10_ACTION_TYPES:
        warnings.warn(
            f"{tag}: unknown action type '{action_type}'", UnknownActionWarning,
            stacklevel=3,
        )
    ann = ClipAnnotation(
        clip_id=clip_id,
        action_type=action_type,
        bv_base=bv_base,
        second_half=second_half,
        goe=goe,
        skater_name=row[5].strip(),
        skater_gender=gender,
        skater_age=age,
        coach=row[8].strip(),
        music=row[9].strip(),
    )
    return ann, []


def parse_manifest(data: bytes | str) -> list[ClipAnnotation]:
    """Parse a clip-manifest CSV into an order-preserving annotation list.

    Accumulates every row-level violation into one ManifestError. Rows whose
    action_type is outside FSD10_ACTION_TYPES parse fine but raise an
    UnknownActionWarning.
    """
    text = _decode(data, "manifest")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError(f"missing header; expected {','.join(MANIFEST_HEADER)}") from None
    if [h.strip() for h in header] != MANIFEST_HEADER:
        raise ManifestError(
            f"bad header; expected {','.join(MANIFEST_HEADER)}, got {','.join(header)}"
        )

    annotations: list[ClipAnnotation] = []
    problems: list[str] = []
    rownum = 0
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        rownum += 1
        if len(row) != len(MANIFEST_HEADER):
            problems.append(f"row {rownum}: expected {len(MANIFEST_HEADER)} fields, got {len(row)}")
            continue
        ann, row_problems = _row_problems(row, rownum)
        if row_problems:
            problems.extend(row_problems)
        else:
            annotations.append(ann)
    if problems:
        raise ManifestError("\n".join(problems))
    return annotations


def load_manifest(path) -> list[ClipAnnotation]:
    with open(path, "rb") as fh:
        return parse_manifest(fh.read())
