"""ISU-style scoring of annotated clips and scatter-driven jump-phase splits.

Single elements score as base value plus grade of execution, with a 10%
base-value bonus for elements performed in the second half of a program.
Program totals sum element scores in order, except that any repeat of an
already-performed action type scores zero (only occurrences after the first
are voided; the documented reading of the repetition rule).

Jump phases are recovered heuristically from the scatter curve: the take-off
straddles the curve peak, the air phase is the low-scatter run that follows,
and preparation/landing take the rest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ShortClipError
from .pose_io import ClipAnnotation
from .sampling import ExtremeFrame
from .scatter import ScatterCurve

SECOND_HALF_BONUS = 1.1
DEFAULT_THETA = 0.5


@dataclass(frozen=True)
class ActionScore:
    """One element's scores: effective base value plus execution grade."""

    bv_base: float
    second_half: bool
    bv_effective: float
    goe: float
    total: float


@dataclass(frozen=True)
class ProgramScore:
    """Ordered element scores with repeated-action voiding applied.

    zeroed_indices lists the positions that contribute nothing to the
    program total; their ActionScore entries still carry the value the
    element would have earned.
    """

    action_types: tuple[str, ...]
    action_scores: tuple[ActionScore, ...]
    zeroed_indices: frozenset[int]
    total: float


@dataclass(frozen=True)
class PhaseSegmentation:
    """Four contiguous half-open frame ranges partitioning [0, T)."""

    preparation: tuple[int, int]
    take_off: tuple[int, int]
    air: tuple[int, int]
    landing: tuple[int, int]


def score_action(annotation: ClipAnnotation) -> ActionScore:
    """BV (with second-half bonus) plus GOE for one annotated element."""
    bv_effective = (
        annotation.bv_base * SECOND_HALF_BONUS
        if annotation.second_half
        else annotation.bv_base
    )
    return ActionScore(
        bv_base=annotation.bv_base,
        second_half=annotation.second_half,
        bv_effective=bv_effective,
        goe=annotation.goe,
        total=bv_effective + annotation.goe,
    )


def score_program(annotations: list[ClipAnnotation]) -> ProgramScore:
    """Program total over in-order elements, voiding repeated action types."""
    seen: set[str] = set()
    zeroed: set[int] = set()
    scores: list[ActionScore] = []
    types: list[str] = []
    total = 0.0
    for i, ann in enumerate(annotations):
        action = score_action(ann)
        scores.append(action)
        types.append(ann.action_type)
        if ann.action_type in seen:
            zeroed.add(i)
        else:
            seen.add(ann.action_type)
            total += action.total
    return ProgramScore(
        action_types=tuple(types),
        action_scores=tuple(scores),
        zeroed_indices=frozenset(zeroed),
        total=total,
    )


def program_score_to_json(score: ProgramScore) -> bytes:
    doc = {
        "actions": [
            {
                "type": t,
                "bv_base": a.bv_base,
                "second_half": a.second_half,
                "bv_effective": a.bv_effective,
                "goe": a.goe,
                "total": a.total,
                "zeroed": i in score.zeroed_indices,
            }
            for i, (t, a) in enumerate(zip(score.action_types, score.action_scores))
        ],
        "total": score.total,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def segment_phases(
    curve: ScatterCurve,
    keyframe: ExtremeFrame,
    delta: int,
    theta: float = DEFAULT_THETA,
) -> PhaseSegmentation:
    """Split a jump clip into preparation / take-off / air / landing.

    The take-off covers the 2*delta+1 frames around the scatter peak. The
    air phase is the maximal following run where zeta stays below
    theta * zeta(peak), collapsed to a single frame when no such run starts,
    and capped one frame short of the clip so the landing is never empty.
    Raises ShortClipError when four non-empty phases cannot fit.
    """
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    T = len(curve)
    j = keyframe.index
    if not (delta <= j <= T - delta - 1):
        raise ShortClipError(
            f"key frame {j} violates radius {delta} for a clip of {T} frames"
        )
    take_off_start = j - delta
    air_start = j + delta + 1
    if take_off_start < 1 or air_start > T - 2:
        raise ShortClipError(
            f"clip of {T} frames cannot fit four non-empty phases around frame {j}"
        )
    zetas = curve.zetas
    threshold = theta * zetas[j]
    air_end = air_start
    while air_end < T - 1 and zetas[air_end] < threshold:
        air_end += 1
    if air_end == air_start:
        # Degenerate curve: no below-threshold run; keep a one-frame air phase.
        air_end = air_start + 1
    return PhaseSegmentation(
        preparation=(0, take_off_start),
        take_off=(take_off_start, air_start),
        air=(air_start, air_end),
        landing=(air_end, T),
    )


def phases_to_json(seg: PhaseSegmentation, clip_id: str = "") -> bytes:
    doc = {
        "clip_id": clip_id,
        "preparation": list(seg.preparation),
        "take_off": list(seg.take_off),
        "air": list(seg.air),
        "landing": list(seg.landing),
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
