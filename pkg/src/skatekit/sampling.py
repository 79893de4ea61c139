"""Segment-based and key-frame sampling over a scatter curve.

A clip of T frames is split into k equal-duration segments; one frame is
drawn uniformly from each. Independently, up to L "specific key frames" are
detected as peaks of the scatter curve inside the radius-restricted range
[delta, T - delta - 1], and one frame is drawn uniformly from each peak's
neighborhood (the peak plus its delta neighbors on either side).

All indices are 0-based. Randomness comes from a stdlib Mersenne-Twister
generator seeded with a caller-supplied 64-bit integer; the draw order is
frozen (segments ascending, then key-frame pools ascending by center), so a
plan is a pure function of (curve, k, L, delta, seed).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import EmptyCurveError, RangeEmptyError, SegmentationError, SkatekitError
from .scatter import INVALID, ScatterCurve

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ExtremeFrame:
    """A detected scatter peak: frame index and its zeta."""

    index: int
    zeta: float


@dataclass(frozen=True)
class KeyframeNeighborhood:
    """The 2*radius frames around a peak, excluding the peak itself."""

    center: ExtremeFrame
    radius: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class SamplePlan:
    """Seeded, reproducible pick of one frame per segment and per key-frame set.

    Field names mirror the plan JSON schema: {"clip_id", "seed", "k", "L",
    "delta", "segment_picks", "keyframe_picks"}.
    """

    clip_id: str
    seed: int
    k: int
    L: int
    delta: int
    segment_picks: tuple[int, ...]
    keyframe_picks: tuple[int, ...]


def find_specific_keyframes(
    curve: ScatterCurve, delta: int, L: int
) -> list[ExtremeFrame]:
    """Up to L scatter peaks inside [delta, T-delta-1], strongest first.

    Candidates are ranked by descending zeta (ties broken by smaller index)
    and accepted greedily under non-maximum suppression: any two accepted
    peaks are at least 2*delta+1 indices apart, so their neighborhoods never
    overlap. The restricted-range argmax is therefore always returned first.
    Frames with status "invalid" are not candidates.
    """
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if L < 1:
        raise ValueError(f"L must be positive, got {L}")
    T = len(curve)
    if T <= 2 * delta:
        raise RangeEmptyError(
            f"restricted range is empty: T={T} requires T > 2*delta={2 * delta}"
        )
    candidates = [
        (i, v.zeta)
        for i, v in enumerate(curve.values[delta:T - delta], start=delta)
        if v.status != INVALID
    ]
    if not candidates:
        raise EmptyCurveError("no usable scatter values in the restricted range")
    candidates.sort(key=lambda c: (-c[1], c[0]))
    separation = 2 * delta + 1
    accepted: list[ExtremeFrame] = []
    for idx, zeta in candidates:
        if all(abs(idx - a.index) >= separation for a in accepted):
            accepted.append(ExtremeFrame(index=idx, zeta=zeta))
            if len(accepted) == L:
                break
    return accepted


def neighborhood(extreme: ExtremeFrame, delta: int, T: int) -> KeyframeNeighborhood:
    """Frames within delta of a peak, excluding the peak itself."""
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if not (delta <= extreme.index <= T - delta - 1):
        raise SkatekitError(
            f"key frame {extreme.index} violates radius {delta} for T={T}"
        )
    members = tuple(
        j
        for j in range(extreme.index - delta, extreme.index + delta + 1)
        if j != extreme.index
    )
    return KeyframeNeighborhood(center=extreme, radius=delta, members=members)


def segment_bounds(T: int, k: int) -> list[tuple[int, int]]:
    """k half-open ranges [i*T//k, (i+1)*T//k) partitioning [0, T)."""
    if k < 1:
        raise SegmentationError(f"k must be positive, got {k}")
    if k > T:
        raise SegmentationError(f"cannot split {T} frames into {k} segments")
    return [(i * T // k, (i + 1) * T // k) for i in range(k)]


def make_sample_plan(
    curve: ScatterCurve,
    k: int,
    L: int,
    delta: int,
    seed: int,
    clip_id: str = "",
) -> SamplePlan:
    """Draw one frame per segment and one per key-frame pool, reproducibly.

    Key-frame pools are the detected peaks' neighborhoods including their
    centers; pools are visited in ascending center order. With L == 0 the
    key-frame branch is skipped entirely. Identical inputs and seed yield an
    identical plan; picks from the two branches may coincide.
    """
    if not (0 <= seed <= MAX_SEED):
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if L < 0:
        raise ValueError(f"L must be nonnegative, got {L}")
    T = len(curve)
    bounds = segment_bounds(T, k)
    pools: list[list[int]] = []
    if L > 0:
        extremes = find_specific_keyframes(curve, delta, L)
        for ext in sorted(extremes, key=lambda e: e.index):
            hood = neighborhood(ext, delta, T)
            pools.append(sorted((*hood.members, ext.index)))
    rng = random.Random(seed)
    segment_picks = tuple(rng.randrange(lo, hi) for lo, hi in bounds)
    keyframe_picks = tuple(pool[rng.randrange(len(pool))] for pool in pools)
    return SamplePlan(
        clip_id=clip_id,
        seed=seed,
        k=k,
        L=L,
        delta=delta,
        segment_picks=segment_picks,
        keyframe_picks=keyframe_picks,
    )


def plan_to_json(plan: SamplePlan) -> bytes:
    doc = {
        "clip_id": plan.clip_id,
        "seed": plan.seed,
        "k": plan.k,
        "L": plan.L,
        "delta": plan.delta,
        "segment_picks": list(plan.segment_picks),
        "keyframe_picks": list(plan.keyframe_picks),
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def plan_from_json(data: bytes | str) -> SamplePlan:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SkatekitError(f"invalid plan JSON: {e}") from None
    try:
        return SamplePlan(
            clip_id=str(doc["clip_id"]),
            seed=int(doc["seed"]),
            k=int(doc["k"]),
            L=int(doc["L"]),
            delta=int(doc["delta"]),
            segment_picks=tuple(int(i) for i in doc["segment_picks"]),
            keyframe_picks=tuple(int(i) for i in doc["keyframe_picks"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise SkatekitError(f"invalid plan JSON: {e}") from None
