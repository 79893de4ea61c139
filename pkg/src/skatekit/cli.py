"""Command-line front end: validate, hps, sample, classify, score-program, segment.

Every command is deterministic given its flags and seed, never mutates its
inputs, and writes to stdout unless --out is given (file writes are atomic).
Exit codes: 0 success, 1 validation/domain error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass

from .errors import SkatekitError
from .pipeline import PrototypeScorer, load_score_table, predict_clip
from .pose_io import (
    UnknownActionWarning,
    load_manifest,
    load_pose_sequence,
)
from .sampling import find_specific_keyframes, make_sample_plan, plan_from_json, plan_to_json
from .scatter import scatter_curve
from .scoring import phases_to_json, program_score_to_json, score_program, segment_phases


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared across commands, with their documented defaults."""

    conf_threshold: float = 0.05
    smoothing_window: int = 1
    k: int = 3
    L: int = 1
    delta: int = 2
    seed: int = 0
    fusion_weight: float = 0.5
    theta: float = 0.5

    def validate(self) -> None:
        if not (0.0 <= self.conf_threshold <= 1.0):
            raise SkatekitError(
                f"--conf-threshold must be in [0, 1], got {self.conf_threshold}"
            )
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise SkatekitError(
                f"--smooth must be an odd positive integer, got {self.smoothing_window}"
            )
        if self.k < 1:
            raise SkatekitError(f"--k must be positive, got {self.k}")
        if self.L < 0:
            raise SkatekitError(f"--L must be nonnegative, got {self.L}")
        if self.delta < 0:
            raise SkatekitError(f"--delta must be nonnegative, got {self.delta}")
        if not (0 <= self.seed < 2**64):
            raise SkatekitError(f"--seed must be an unsigned 64-bit integer, got {self.seed}")
        if not (0.0 <= self.fusion_weight <= 1.0):
            raise SkatekitError(
                f"--fusion-weight must be in [0, 1], got {self.fusion_weight}"
            )
        if self.theta <= 0:
            raise SkatekitError(f"--theta must be positive, got {self.theta}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {}
    for attr, flag in (
        ("conf_threshold", "conf_threshold"),
        ("smoothing_window", "smooth"),
        ("k", "k"),
        ("L", "L"),
        ("delta", "delta"),
        ("seed", "seed"),
        ("fusion_weight", "fusion_weight"),
        ("theta", "theta"),
    ):
        if hasattr(args, flag):
            fields[attr] = getattr(args, flag)
    config = RunConfig(**fields)
    config.validate()
    return config


def _emit(payload: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".skatekit-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_validate(args: argparse.Namespace) -> int:
    failures = 0
    for path in args.paths:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UnknownActionWarning)
            try:
                if path.endswith(".csv"):
                    load_manifest(path)
                elif path.endswith(".json"):
                    load_pose_sequence(path)
                else:
                    raise SkatekitError(
                        "cannot infer input kind; use .json for keypoints or .csv for manifests"
                    )
            except SkatekitError as e:
                failures += 1
                print(f"{path}: INVALID")
                for line in str(e).splitlines():
                    print(f"  {line}")
                continue
        print(f"{path}: OK")
        for w in caught:
            print(f"  warning: {w.message}")
    if failures:
        print(f"{failures} of {len(args.paths)} inputs invalid")
        return 1
    print("OK")
    return 0


def cmd_hps(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    seq = load_pose_sequence(args.keypoints)
    curve = scatter_curve(seq, config.conf_threshold, config.smoothing_window)
    lines = ["frame_index,zeta,status"]
    lines += [f"{i},{v.zeta!r},{v.status}" for i, v in enumerate(curve.values)]
    _emit(("\n".join(lines) + "\n").encode("utf-8"), args.out)
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    seq = load_pose_sequence(args.keypoints)
    curve = scatter_curve(seq, config.conf_threshold, config.smoothing_window)
    plan = make_sample_plan(
        curve, config.k, config.L, config.delta, config.seed, clip_id=seq.clip_id
    )
    _emit(plan_to_json(plan), args.out)
    return 0


def _build_scorer(spec: str, conf_threshold: float):
    kind, sep, path = spec.partition(":")
    if not sep or not path or kind not in ("toy", "file"):
        raise SkatekitError("--scorer must be 'toy:<protofile>' or 'file:<scorefile>'")
    with open(path, "rb") as fh:
        data = fh.read()
    if kind == "toy":
        return PrototypeScorer.from_json(data, conf_threshold)
    return load_score_table(data)


def cmd_classify(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    seq = load_pose_sequence(args.keypoints)
    scorer = _build_scorer(args.scorer, config.conf_threshold)
    if args.plan is not None:
        with open(args.plan, "rb") as fh:
            plan = plan_from_json(fh.read())
    else:
        curve = scatter_curve(seq, config.conf_threshold, config.smoothing_window)
        plan = make_sample_plan(
            curve, config.k, config.L, config.delta, config.seed, clip_id=seq.clip_id
        )
    probs = predict_clip(seq, plan, scorer, config.fusion_weight)
    doc = {
        "clip_id": seq.clip_id,
        "class_labels": list(probs.class_labels),
        "probs": list(probs.probs),
        "top_class": probs.top_class(),
    }
    _emit((json.dumps(doc, indent=2) + "\n").encode("utf-8"), args.out)
    return 0


def cmd_score_program(args: argparse.Namespace) -> int:
    annotations = load_manifest(args.manifest)
    _emit(program_score_to_json(score_program(annotations)), args.out)
    return 0


def cmd_segment(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    seq = load_pose_sequence(args.keypoints)
    curve = scatter_curve(seq, config.conf_threshold, config.smoothing_window)
    peak = find_specific_keyframes(curve, config.delta, L=1)[0]
    seg = segment_phases(curve, peak, config.delta, config.theta)
    _emit(phases_to_json(seg, clip_id=seq.clip_id), args.out)
    return 0


def _add_curve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--conf-threshold", dest="conf_threshold", type=float, default=0.05,
                   help="confidence gate for keypoints (default 0.05)")
    p.add_argument("--smooth", type=int, default=1,
                   help="odd moving-average window over the curve, 1 = none")


def _add_sampling_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=3, help="number of segments (default 3)")
    p.add_argument("--L", type=int, default=1, help="number of key frames (default 1)")
    p.add_argument("--delta", type=int, default=2, help="key-frame radius (default 2)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skatekit",
        description="Pose-sequence analysis for figure-skating clips",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate keypoint files and manifests")
    p.add_argument("paths", nargs="+", help=".json keypoint files or .csv manifests")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("hps", help="pose-scatter curve as CSV (frame_index,zeta,status)")
    p.add_argument("keypoints")
    _add_curve_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hps)

    p = sub.add_parser("sample", help="seeded segment + key-frame sample plan as JSON")
    p.add_argument("keypoints")
    _add_curve_flags(p)
    _add_sampling_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("classify", help="clip-level class distribution as JSON")
    p.add_argument("keypoints")
    p.add_argument("--scorer", required=True,
                   help="toy:<protofile> or file:<scorefile>")
    p.add_argument("--plan", help="reuse an existing sample-plan JSON")
    _add_curve_flags(p)
    _add_sampling_flags(p)
    p.add_argument("--fusion-weight", dest="fusion_weight", type=float, default=0.5,
                   help="weight of the segment branch (default 0.5)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("score-program", help="program score JSON from a manifest")
    p.add_argument("manifest")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score_program)

    p = sub.add_parser("segment", help="jump-phase ranges as JSON")
    p.add_argument("keypoints")
    _add_curve_flags(p)
    p.add_argument("--delta", type=int, default=2, help="take-off half-width (default 2)")
    p.add_argument("--theta", type=float, default=0.5,
                   help="air-phase threshold as a fraction of the peak (default 0.5)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_segment)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SkatekitError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
