"""Builders shared across test modules."""

from __future__ import annotations

import math

import numpy as np

from skatekit.pose_io import NUM_KEYPOINTS, Keypoint, PoseFrame, PoseSequence
from skatekit.scatter import ScatterCurve, ScatterValue

# Four points whose centered scatter matrix is diag(2, 8): zeta == 2.
FOUR_POINTS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 2.0), (0.0, -2.0))


def make_frame(points, frame_index=0, conf=1.0) -> PoseFrame:
    """Frame with the given valid points, zero-confidence padding to 18."""
    kps = [Keypoint(float(x), float(y), conf) for x, y in points]
    if len(kps) > NUM_KEYPOINTS:
        raise ValueError("too many points for one frame")
    kps += [Keypoint(0.0, 0.0, 0.0)] * (NUM_KEYPOINTS - len(kps))
    return PoseFrame(keypoints=tuple(kps), frame_index=frame_index)


def make_sequence(frames_points, fps=30.0, clip_id="clip") -> PoseSequence:
    frames = tuple(
        make_frame(points, frame_index=i) for i, points in enumerate(frames_points)
    )
    return PoseSequence(frames=frames, fps=fps, clip_id=clip_id)


def transform_points(points, scale=1.0, angle=0.0, offset=(0.0, 0.0)):
    c, s = math.cos(angle), math.sin(angle)
    return [
        (
            scale * (c * x - s * y) + offset[0],
            scale * (s * x + c * y) + offset[1],
        )
        for x, y in points
    ]


def zeta_frame(target_zeta, frame_index=0, offset=(0.0, 0.0)) -> PoseFrame:
    """Frame whose computed zeta equals target_zeta (scaled FOUR_POINTS)."""
    scale = math.sqrt(target_zeta / 2.0)
    return make_frame(
        transform_points(FOUR_POINTS, scale=scale, offset=offset),
        frame_index=frame_index,
    )


def zeta_sequence(zetas, clip_id="clip") -> PoseSequence:
    """Sequence whose per-frame scatter curve equals the given zeta values."""
    frames = tuple(
        zeta_frame(z, frame_index=i, offset=(500.0, 400.0)) for i, z in enumerate(zetas)
    )
    return PoseSequence(frames=frames, fps=30.0, clip_id=clip_id)


def curve_of(values, statuses=None, smoothing_window=1) -> ScatterCurve:
    if statuses is None:
        statuses = ["computed"] * len(values)
    return ScatterCurve(
        values=tuple(
            ScatterValue(zeta=float(z), status=s) for z, s in zip(values, statuses)
        ),
        smoothing_window=smoothing_window,
    )


def random_frame(rng: np.random.Generator, n_valid=None, frame_index=0) -> PoseFrame:
    """Random 18-point frame, coordinates in [0,1080]x[0,720], >=3 valid."""
    if n_valid is None:
        n_valid = int(rng.integers(3, NUM_KEYPOINTS + 1))
    coords = np.column_stack(
        (rng.uniform(0, 1080, NUM_KEYPOINTS), rng.uniform(0, 720, NUM_KEYPOINTS))
    )
    conf = np.zeros(NUM_KEYPOINTS)
    valid = rng.choice(NUM_KEYPOINTS, size=n_valid, replace=False)
    conf[valid] = rng.uniform(0.5, 1.0, n_valid)
    kps = tuple(
        Keypoint(float(x), float(y), float(c)) for (x, y), c in zip(coords, conf)
    )
    return PoseFrame(keypoints=kps, frame_index=frame_index)


def eig_residual_oracle(points: np.ndarray) -> float:
    """Direct residual sum off the principal axis, eigenvector via eigh."""
    mean = points.mean(axis=0)
    centered = points - mean
    scatter = centered.T @ centered
    w, v = np.linalg.eigh(scatter)
    u = v[:, int(np.argmax(w))]
    residual = centered - np.outer(centered @ u, u)
    return float(np.sum(residual**2))
