import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skatekit.errors import ManifestError, PoseFormatError
from skatekit.pose_io import (
    NUM_KEYPOINTS,
    ClipAnnotation,
    Keypoint,
    PoseFrame,
    PoseSequence,
    UnknownActionWarning,
    parse_manifest,
    parse_pose_sequence,
    write_pose_sequence,
)

GOLDEN = Path(__file__).parent / "golden"


def doc_bytes(doc) -> bytes:
    return json.dumps(doc).encode("utf-8")


def frame_doc(frame_index, n=NUM_KEYPOINTS, conf=1.0):
    return {
        "frame_index": frame_index,
        "keypoints": [[float(j), float(j * 2), conf] for j in range(n)],
    }


def clip_doc(n_frames=1, clip_id="c1", fps=30.0):
    return {
        "clip_id": clip_id,
        "fps": fps,
        "frames": [frame_doc(i) for i in range(n_frames)],
    }


class TestParsePoseSequence:
    def test_minimal_one_frame(self):
        seq = parse_pose_sequence(doc_bytes(clip_doc()))
        assert len(seq) == 1
        assert seq.clip_id == "c1"
        assert seq.fps == 30.0
        assert len(seq.frames[0].keypoints) == NUM_KEYPOINTS
        assert seq.frames[0].keypoints[1] == Keypoint(1.0, 2.0, 1.0)

    def test_wrong_keypoint_count(self):
        doc = clip_doc(4)
        doc["frames"][3]["keypoints"] = doc["frames"][3]["keypoints"][:17]
        with pytest.raises(PoseFormatError, match=r"frame 3: expected 18 keypoints, got 17"):
            parse_pose_sequence(doc_bytes(doc))

    def test_non_contiguous_indices(self):
        doc = {"clip_id": "c", "fps": 30, "frames": [frame_doc(0), frame_doc(2)]}
        with pytest.raises(PoseFormatError, match=r"non-contiguous frame_index at position 1"):
            parse_pose_sequence(doc_bytes(doc))

    def test_duplicate_indices_rejected(self):
        doc = {"clip_id": "c", "fps": 30, "frames": [frame_doc(0), frame_doc(0)]}
        with pytest.raises(PoseFormatError, match="non-contiguous"):
            parse_pose_sequence(doc_bytes(doc))

    def test_frames_sorted_by_index(self):
        doc = {"clip_id": "c", "fps": 30, "frames": [frame_doc(1), frame_doc(0)]}
        seq = parse_pose_sequence(doc_bytes(doc))
        assert [f.frame_index for f in seq.frames] == [0, 1]

    def test_confidence_out_of_range(self):
        doc = clip_doc()
        doc["frames"][0]["keypoints"][5][2] = 1.5
        with pytest.raises(PoseFormatError, match=r"frame 0: keypoints\[5\]: confidence 1.5"):
            parse_pose_sequence(doc_bytes(doc))

    def test_non_finite_coordinate(self):
        raw = doc_bytes(clip_doc()).replace(b"[5.0, 10.0, 1.0]", b"[5.0, NaN, 1.0]")
        with pytest.raises(PoseFormatError, match=r"keypoints\[5\]: y must be a finite number"):
            parse_pose_sequence(raw)

    @pytest.mark.parametrize(
        "mutate, message",
        [
            (lambda d: d.pop("clip_id"), "clip_id"),
            (lambda d: d.update(fps=0), "fps"),
            (lambda d: d.update(fps="fast"), "fps"),
            (lambda d: d.update(frames=[]), "frames"),
            (lambda d: d["frames"][0].pop("frame_index"), "frame_index"),
            (lambda d: d["frames"][0].update(frame_index=-1), "frame_index"),
        ],
    )
    def test_structural_violations(self, mutate, message):
        doc = clip_doc()
        mutate(doc)
        with pytest.raises(PoseFormatError, match=message):
            parse_pose_sequence(doc_bytes(doc))

    def test_malformed_json(self):
        with pytest.raises(PoseFormatError, match="invalid JSON"):
            parse_pose_sequence(b"{not json")

    def test_unsupported_format(self):
        with pytest.raises(PoseFormatError, match="unsupported keypoint format"):
            parse_pose_sequence(b"{}", format="csv")


keypoints_strategy = st.lists(
    st.tuples(
        st.floats(-1e4, 1e4, allow_nan=False),
        st.floats(-1e4, 1e4, allow_nan=False),
        st.one_of(st.just(0.0), st.floats(0.0, 1.0, allow_nan=False)),
    ),
    min_size=NUM_KEYPOINTS,
    max_size=NUM_KEYPOINTS,
)


@st.composite
def sequences(draw):
    n_frames = draw(st.integers(1, 6))
    frames = []
    for i in range(n_frames):
        kps = tuple(Keypoint(*t) for t in draw(keypoints_strategy))
        frames.append(PoseFrame(keypoints=kps, frame_index=i))
    return PoseSequence(
        frames=tuple(frames),
        fps=draw(st.floats(1.0, 120.0, allow_nan=False)),
        clip_id=draw(st.text(min_size=0, max_size=12)),
    )


class TestWritePoseSequence:
    @given(sequences())
    @settings(max_examples=50)
    def test_round_trip_identity(self, seq):
        assert parse_pose_sequence(write_pose_sequence(seq)) == seq

    def test_zero_confidence_preserved(self):
        doc = clip_doc()
        doc["frames"][0]["keypoints"][7][2] = 0.0
        seq = parse_pose_sequence(doc_bytes(doc))
        back = parse_pose_sequence(write_pose_sequence(seq))
        assert back.frames[0].keypoints[7].confidence == 0.0
        assert back == seq

    def test_minimal_sequence_matches_golden(self):
        kps = tuple(Keypoint(float(i * 10), float(i * 5), 1.0) for i in range(NUM_KEYPOINTS))
        seq = PoseSequence(
            frames=(PoseFrame(keypoints=kps, frame_index=0),),
            fps=30.0,
            clip_id="minimal",
        )
        assert write_pose_sequence(seq) == (GOLDEN / "minimal_clip.json").read_bytes()


MANIFEST_HEADER = (
    "clip_id,action_type,bv_base,second_half,goe,"
    "skater_name,skater_gender,skater_age,coach,music"
)


def manifest_bytes(*rows: str) -> bytes:
    return ("\n".join([MANIFEST_HEADER, *rows]) + "\n").encode("utf-8")


TABLE_ROW = (
    'c001,2Axel,3.3,true,0.58,Starr ANDREWS,F,16,'
    '"Derrick Delmore, Peter Kongkasem",Fever performed by Beyonce'
)


class TestParseManifest:
    def test_full_record(self):
        (ann,) = parse_manifest(manifest_bytes(TABLE_ROW))
        assert ann == ClipAnnotation(
            clip_id="c001",
            action_type="2Axel",
            bv_base=3.3,
            second_half=True,
            goe=0.58,
            skater_name="Starr ANDREWS",
            skater_gender="F",
            skater_age=16,
            coach="Derrick Delmore, Peter Kongkasem",
            music="Fever performed by Beyonce",
        )

    def test_non_numeric_bv(self):
        row = "c002,3Lutz,abc,false,0.1,A,M,20,B,C"
        with pytest.raises(ManifestError, match=r"row 1 \(c002\): bv_base: could not parse 'abc'"):
            parse_manifest(manifest_bytes(row))

    def test_empty_manifest(self):
        assert parse_manifest(manifest_bytes()) == []

    def test_missing_required_fields(self):
        row = "c003,,,true,,A,F,,B,C"
        with pytest.raises(ManifestError) as exc:
            parse_manifest(manifest_bytes(row))
        msg = str(exc.value)
        assert "missing required field action_type" in msg
        assert "missing required field bv_base" in msg
        assert "missing required field goe" in msg

    def test_order_preserved(self):
        rows = [
            "a,3Lutz,4.0,false,0.0,,F,,,",
            "b,3Flip,4.2,false,0.0,,F,,,",
            "c,2Axel,3.3,false,0.0,,F,,,",
        ]
        anns = parse_manifest(manifest_bytes(*rows))
        assert [a.clip_id for a in anns] == ["a", "b", "c"]

    def test_unknown_action_flagged_not_rejected(self):
        row = "c004,4Axel,12.5,false,1.0,A,M,18,B,C"
        with pytest.warns(UnknownActionWarning, match="unknown action type '4Axel'"):
            (ann,) = parse_manifest(manifest_bytes(row))
        assert ann.action_type == "4Axel"

    def test_unknown_age_and_gender(self):
        row = "c005,3Loop,4.9,false,-0.5,A,,unknown,B,C"
        (ann,) = parse_manifest(manifest_bytes(row))
        assert ann.skater_gender == "unknown"
        assert ann.skater_age is None

    def test_negative_bv_rejected(self):
        row = "c006,3Flip,-1.0,false,0.0,A,F,20,B,C"
        with pytest.raises(ManifestError, match="bv_base: must be nonnegative"):
            parse_manifest(manifest_bytes(row))

    def test_bad_second_half(self):
        row = "c007,3Flip,5.3,maybe,0.0,A,F,20,B,C"
        with pytest.raises(ManifestError, match="second_half: expected true or false"):
            parse_manifest(manifest_bytes(row))

    def test_bad_header(self):
        with pytest.raises(ManifestError, match="bad header"):
            parse_manifest(b"clip,type\nxx,yy\n")

    def test_all_row_errors_reported(self):
        rows = [
            "a,3Lutz,oops,false,0.0,,F,,,",
            "b,3Flip,4.2,false,nope,,F,,,",
        ]
        with pytest.raises(ManifestError) as exc:
            parse_manifest(manifest_bytes(*rows))
        msg = str(exc.value)
        assert "row 1 (a)" in msg and "row 2 (b)" in msg
