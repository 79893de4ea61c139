"""Snippet scoring, consensus, and video-level prediction.

A snippet scorer assigns per-class scores to single sampled frames. Snippet
scores from the segment branch and the key-frame branch of a SamplePlan are
each reduced by a consensus function (mean by default, max optionally),
fused as a convex combination, and pushed through a softmax to give the
clip-level class distribution.

Two concrete scorers are provided: PrototypeScorer, a deterministic
nearest-prototype scorer over simple per-frame pose statistics, and
ScoreTable, a lookup over precomputed per-frame scores produced by an
external model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import PipelineError, ScoreLookupError, SkatekitError
from .pose_io import PoseSequence
from .sampling import SamplePlan
from .scatter import DEFAULT_CONF_THRESHOLD, principal_axis, scatter_summary

CONSENSUS_METHODS = ("mean", "max")
PROB_SUM_TOL = 1e-9


def _check_labels(labels: tuple[str, ...]) -> None:
    if len(labels) < 2:
        raise ValueError(f"need at least 2 classes, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ValueError("class labels must be unique")


@dataclass(frozen=True)
class ScoreVector:
    """Per-class raw scores for one snippet or one consensus."""

    scores: tuple[float, ...]
    class_labels: tuple[str, ...]

    def __post_init__(self):
        _check_labels(self.class_labels)
        if len(self.scores) != len(self.class_labels):
            raise ValueError(
                f"{len(self.scores)} scores for {len(self.class_labels)} labels"
            )
        if not all(math.isfinite(s) for s in self.scores):
            raise ValueError("scores must be finite")


@dataclass(frozen=True)
class ProbVector:
    """Softmax-normalized class distribution; sums to 1 within 1e-9."""

    probs: tuple[float, ...]
    class_labels: tuple[str, ...]

    def __post_init__(self):
        _check_labels(self.class_labels)
        if len(self.probs) != len(self.class_labels):
            raise ValueError(
                f"{len(self.probs)} probabilities for {len(self.class_labels)} labels"
            )
        if not all(0.0 <= p <= 1.0 for p in self.probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(sum(self.probs) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    def top_class(self) -> str:
        best = max(range(len(self.probs)), key=lambda i: (self.probs[i], -i))
        return self.class_labels[best]


class SnippetScorer(Protocol):
    """Deterministic per-frame scorer: same input, same output."""

    @property
    def class_labels(self) -> tuple[str, ...]: ...

    def score(self, seq: PoseSequence, frame_index: int) -> ScoreVector: ...


def consensus(snippet_scores: list[ScoreVector], method: str = "mean") -> ScoreVector:
    """Element-wise aggregation of snippet score vectors (mean or max)."""
    if not snippet_scores:
        raise ValueError("consensus of an empty snippet list")
    if method not in CONSENSUS_METHODS:
        raise ValueError(f"consensus method must be one of {CONSENSUS_METHODS}")
    labels = snippet_scores[0].class_labels
    for v in snippet_scores[1:]:
        if v.class_labels != labels:
            raise ValueError("snippet score vectors disagree on class labels")
    columns = zip(*(v.scores for v in snippet_scores))
    if method == "mean":
        agg = tuple(sum(col) / len(snippet_scores) for col in columns)
    else:
        agg = tuple(max(col) for col in columns)
    return ScoreVector(scores=agg, class_labels=labels)


def softmax(v: ScoreVector) -> ProbVector:
    """Max-shifted softmax; safe for arbitrarily large finite scores."""
    shift = max(v.scores)
    exps = [math.exp(s - shift) for s in v.scores]
    total = sum(exps)
    return ProbVector(
        probs=tuple(e / total for e in exps), class_labels=v.class_labels
    )


def predict_clip(
    seq: PoseSequence,
    plan: SamplePlan,
    scorer: SnippetScorer,
    fusion_weight: float = 0.5,
    consensus_method: str = "mean",
) -> ProbVector:
    """Clip-level class distribution from a sample plan and a snippet scorer.

    Computes one consensus over the segment picks and one over the key-frame
    picks, fuses them as w * segment + (1 - w) * keyframe, and applies the
    softmax. With no key-frame picks the fusion weight is treated as 1.
    """
    if not (0.0 <= fusion_weight <= 1.0):
        raise ValueError(f"fusion_weight must be in [0, 1], got {fusion_weight}")
    T = len(seq)

    def branch(picks: tuple[int, ...], name: str) -> ScoreVector:
        scores = []
        for pos, idx in enumerate(picks):
            if not (0 <= idx < T):
                raise PipelineError(
                    f"{name} snippet {pos}: frame {idx} outside clip of {T} frames"
                )
            try:
                scores.append(scorer.score(seq, idx))
            except SkatekitError as e:
                raise PipelineError(
                    f"{name} snippet {pos} (frame {idx}): {e}"
                ) from e
        return consensus(scores, consensus_method)

    seg = branch(plan.segment_picks, "segment")
    if not plan.keyframe_picks:
        return softmax(seg)
    key = branch(plan.keyframe_picks, "keyframe")
    fused = tuple(
        fusion_weight * s + (1.0 - fusion_weight) * g
        for s, g in zip(seg.scores, key.scores)
    )
    return softmax(ScoreVector(scores=fused, class_labels=seg.class_labels))


def pose_features(
    seq: PoseSequence,
    frame_index: int,
    conf_threshold: float = DEFAULT_CONF_THRESHOLD,
) -> np.ndarray:
    """Feature vector (zeta, n_valid, principal-axis angle, trace) of one frame.

    The angle is atan2 of the principal axis and lies in (-pi/2, pi/2] thanks
    to the axis sign convention; a zero-scatter frame gets angle 0 by
    convention. Raises InsufficientKeypointsError via scatter_summary when
    the frame has fewer than 3 valid keypoints.
    """
    if not (0 <= frame_index < len(seq)):
        raise PipelineError(
            f"frame {frame_index} outside clip of {len(seq)} frames"
        )
    summary = scatter_summary(seq.frames[frame_index], conf_threshold)
    if summary.lambda_max > 0.0:
        axis = principal_axis(summary)
        angle = math.atan2(axis[1], axis[0])
    else:
        angle = 0.0
    return np.array(
        [summary.lambda_min, float(summary.n_valid), angle, summary.trace]
    )


class PrototypeScorer:
    """Nearest-prototype scorer over per-frame pose statistics.

    Each class holds one or more 4-vector prototypes in pose_features space;
    a frame scores a class as the negative squared Euclidean distance to the
    nearest prototype of that class. Deterministic by construction.
    """

    def __init__(
        self,
        prototypes: dict[str, list],
        conf_threshold: float = DEFAULT_CONF_THRESHOLD,
    ):
        labels = tuple(prototypes)
        _check_labels(labels)
        self._prototypes: dict[str, np.ndarray] = {}
        for label in labels:
            arr = np.asarray(prototypes[label], dtype=float)
            if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] != 4:
                raise ValueError(
                    f"class '{label}': prototypes must be a non-empty list of 4-vectors"
                )
            self._prototypes[label] = arr
        self._labels = labels
        self._conf_threshold = conf_threshold

    @property
    def class_labels(self) -> tuple[str, ...]:
        return self._labels

    def score(self, seq: PoseSequence, frame_index: int) -> ScoreVector:
        feat = pose_features(seq, frame_index, self._conf_threshold)
        scores = tuple(
            -float(np.min(np.sum((self._prototypes[label] - feat) ** 2, axis=1)))
            for label in self._labels
        )
        return ScoreVector(scores=scores, class_labels=self._labels)

    @classmethod
    def from_json(
        cls, data: bytes | str, conf_threshold: float = DEFAULT_CONF_THRESHOLD
    ) -> "PrototypeScorer":
        """Load from {"class_labels": [...], "prototypes": {label: [[4 floats], ...]}}."""
        text = data.decode("utf-8") if isinstance(data, bytes) else data
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise SkatekitError(f"invalid prototype JSON: {e}") from None
        try:
            labels = [str(x) for x in doc["class_labels"]]
            protos = {label: doc["prototypes"][label] for label in labels}
        except (KeyError, TypeError) as e:
            raise SkatekitError(f"invalid prototype JSON: {e}") from None
        try:
            return cls(protos, conf_threshold)
        except ValueError as e:
            raise SkatekitError(f"invalid prototype JSON: {e}") from None


class ScoreTable:
    """Lookup scorer over precomputed per-frame score vectors."""

    def __init__(
        self,
        clip_id: str,
        class_labels: tuple[str, ...],
        frames: dict[int, tuple[float, ...]],
    ):
        _check_labels(class_labels)
        for idx, scores in frames.items():
            if len(scores) != len(class_labels):
                raise ValueError(
                    f"frame {idx}: {len(scores)} scores for {len(class_labels)} classes"
                )
            if not all(math.isfinite(s) for s in scores):
                raise ValueError(f"frame {idx}: scores must be finite")
        self.clip_id = clip_id
        self._labels = class_labels
        self._frames = dict(frames)

    @property
    def class_labels(self) -> tuple[str, ...]:
        return self._labels

    def score(self, seq: PoseSequence, frame_index: int) -> ScoreVector:
        try:
            scores = self._frames[frame_index]
        except KeyError:
            raise ScoreLookupError(f"no score for frame {frame_index}") from None
        return ScoreVector(scores=scores, class_labels=self._labels)

    def to_json(self) -> bytes:
        doc = {
            "clip_id": self.clip_id,
            "class_labels": list(self._labels),
            "frames": {str(i): list(self._frames[i]) for i in sorted(self._frames)},
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def load_score_table(data: bytes | str) -> ScoreTable:
    """Parse {"clip_id", "class_labels", "frames": {"<index>": [scores]}}."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SkatekitError(f"invalid score file: {e}") from None
    try:
        clip_id = str(doc["clip_id"])
        labels = tuple(str(x) for x in doc["class_labels"])
        frames = {
            int(idx): tuple(float(s) for s in scores)
            for idx, scores in doc["frames"].items()
        }
    except (KeyError, TypeError, ValueError) as e:
        raise SkatekitError(f"invalid score file: {e}") from None
    try:
        return ScoreTable(clip_id, labels, frames)
    except ValueError as e:
        raise SkatekitError(f"invalid score file: {e}") from None
