"""Per-frame pose scatter: residual variance of keypoints off their principal axis.

Stack a frame's valid keypoints as columns of a 2 x m matrix X with column
mean x_bar, and let S = X_hat X_hat^T be the 2x2 centered scatter matrix with
eigenvalues lambda_max >= lambda_min and principal eigenvector u. The scatter
value of the frame is

    zeta = sum_i ||(I - u u^T)(x_i - x_bar)||^2 = trace(S) - lambda_max = lambda_min

i.e. for 2-D keypoints projected onto a single principal direction, zeta is
exactly the smaller eigenvalue. High zeta means a stretched pose (arms/legs
spread off the body axis), low zeta a tucked one, which is what makes the
per-frame curve useful for locating take-off and air phases of a jump.

Keypoints with confidence below the threshold are excluded; confidence 0
always means "not detected" and is excluded regardless of the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyCurveError,
    InsufficientKeypointsError,
    UndefinedAxisError,
)
from .pose_io import PoseFrame, PoseSequence

DEFAULT_CONF_THRESHOLD = 0.05
MIN_VALID_KEYPOINTS = 3

COMPUTED = "computed"
INTERPOLATED = "interpolated"
INVALID = "invalid"
STATUSES = frozenset({COMPUTED, INTERPOLATED, INVALID})


@dataclass(frozen=True)
class ScatterSummary:
    """Centered 2x2 scatter matrix of one frame plus its eigenvalues.

    Units are squared pixels. lambda_max >= lambda_min >= 0 and
    lambda_max + lambda_min == trace up to rounding.
    """

    sxx: float
    sxy: float
    syy: float
    trace: float
    lambda_max: float
    lambda_min: float
    mean_x: float
    mean_y: float
    n_valid: int


@dataclass(frozen=True)
class ScatterValue:
    """One frame's zeta with how it was obtained."""

    zeta: float
    status: str


@dataclass(frozen=True)
class ScatterCurve:
    """Per-frame scatter values for a whole clip, same length as the clip."""

    values: tuple[ScatterValue, ...]
    smoothing_window: int = 1

    def __len__(self) -> int:
        return len(self.values)

    @property
    def zetas(self) -> list[float]:
        return [v.zeta for v in self.values]

    @property
    def statuses(self) -> list[str]:
        return [v.status for v in self.values]


def valid_points(frame: PoseFrame, conf_threshold: float) -> np.ndarray:
    """(m, 2) array of keypoints passing the confidence gate."""
    if not (0.0 <= conf_threshold <= 1.0):
        raise ValueError(f"conf_threshold must be in [0, 1], got {conf_threshold}")
    return np.array(
        [
            (kp.x, kp.y)
            for kp in frame.keypoints
            if kp.confidence > 0.0 and kp.confidence >= conf_threshold
        ],
        dtype=float,
    ).reshape(-1, 2)


def scatter_summary(
    frame: PoseFrame, conf_threshold: float = DEFAULT_CONF_THRESHOLD
) -> ScatterSummary:
    """Centered scatter matrix and closed-form eigenvalues over valid keypoints.

    Raises InsufficientKeypointsError when fewer than 3 keypoints pass the
    confidence gate.
    """
    pts = valid_points(frame, conf_threshold)
    m = len(pts)
    if m < MIN_VALID_KEYPOINTS:
        raise InsufficientKeypointsError(m)
    mean = pts.mean(axis=0)
    a = pts[:, 0] - mean[0]
    b = pts[:, 1] - mean[1]
    sxx = float(a @ a)
    syy = float(b @ b)
    sxy = float(a @ b)
    trace = sxx + syy
    lam_max = 0.5 * trace + math.hypot(0.5 * (sxx - syy), sxy)
    # det(S) accumulated via the Lagrange identity sum of pairwise cross
    # products; the trace-minus-lambda_max form loses ~7 digits to
    # cancellation on near-collinear frames.
    cross = np.outer(a, b)
    cross -= cross.T
    det = 0.5 * float(np.sum(cross * cross))
    if lam_max <= 0.0:
        lam_min = 0.0
    else:
        lam_min = min(max(det / lam_max, 0.0), lam_max)
    return ScatterSummary(
        sxx=sxx,
        sxy=sxy,
        syy=syy,
        trace=trace,
        lambda_max=lam_max,
        lambda_min=lam_min,
        mean_x=float(mean[0]),
        mean_y=float(mean[1]),
        n_valid=m,
    )


def frame_scatter(
    frame: PoseFrame, conf_threshold: float = DEFAULT_CONF_THRESHOLD
) -> ScatterValue:
    """zeta of one frame (the smaller scatter eigenvalue), status "computed"."""
    summary = scatter_summary(frame, conf_threshold)
    return ScatterValue(zeta=summary.lambda_min, status=COMPUTED)


def principal_axis(summary: ScatterSummary) -> np.ndarray:
    """Unit eigenvector of lambda_max, first nonzero component positive."""
    if summary.lambda_max <= 0.0:
        raise UndefinedAxisError("zero scatter: principal axis undefined")
    # Two candidate eigenvector constructions; pick the better-conditioned.
    v1 = np.array([summary.sxy, summary.lambda_max - summary.sxx])
    v2 = np.array([summary.lambda_max - summary.syy, summary.sxy])
    v = v1 if v1 @ v1 >= v2 @ v2 else v2
    norm = math.sqrt(float(v @ v))
    if norm == 0.0:
        # Isotropic scatter: every direction is principal; fix one.
        return np.array([1.0, 0.0])
    v = v / norm
    if v[0] < 0.0 or (v[0] == 0.0 and v[1] < 0.0):
        v = -v
    return v


def _interpolate_gaps(zetas: list[float | None]) -> tuple[list[float], list[str]]:
    computed = [i for i, z in enumerate(zetas) if z is not None]
    if not computed:
        raise EmptyCurveError("no frame has enough valid keypoints to compute a curve")
    out: list[float] = []
    statuses: list[str] = []
    for i, z in enumerate(zetas):
        if z is not None:
            out.append(z)
            statuses.append(COMPUTED)
            continue
        prev = max((c for c in computed if c < i), default=None)
        nxt = min((c for c in computed if c > i), default=None)
        if prev is None:
            value = zetas[nxt]
        elif nxt is None:
            value = zetas[prev]
        else:
            frac = (i - prev) / (nxt - prev)
            value = zetas[prev] + (zetas[nxt] - zetas[prev]) * frac
        out.append(value)
        statuses.append(INTERPOLATED)
    return out, statuses


def moving_average(values: list[float], window: int) -> list[float]:
    """Centered moving average with windows truncated at the boundaries."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"smoothing window must be an odd positive integer, got {window}")
    if window == 1:
        return list(values)
    half = window // 2
    n = len(values)
    return [
        sum(values[max(0, i - half):min(n, i + half + 1)])
        / (min(n, i + half + 1) - max(0, i - half))
        for i in range(n)
    ]


def scatter_curve(
    seq: PoseSequence,
    conf_threshold: float = DEFAULT_CONF_THRESHOLD,
    smoothing_window: int = 1,
) -> ScatterCurve:
    """Per-frame scatter curve for a clip.

    Frames with fewer than 3 valid keypoints get status "interpolated", with
    zeta linearly interpolated between the nearest computed neighbors
    (nearest-value extension at the ends). Raises EmptyCurveError when no
    frame is computable. The optional odd smoothing window applies a
    boundary-truncated centered moving average to the zeta values; statuses
    are preserved.
    """
    if smoothing_window < 1 or smoothing_window % 2 == 0:
        raise ValueError(
            f"smoothing window must be an odd positive integer, got {smoothing_window}"
        )
    raw: list[float | None] = []
    for frame in seq.frames:
        try:
            raw.append(scatter_summary(frame, conf_threshold).lambda_min)
        except InsufficientKeypointsError:
            raw.append(None)
    zetas, statuses = _interpolate_gaps(raw)
    if smoothing_window > 1:
        zetas = moving_average(zetas, smoothing_window)
    values = tuple(
        ScatterValue(zeta=z, status=s) for z, s in zip(zetas, statuses)
    )
    return ScatterCurve(values=values, smoothing_window=smoothing_window)
