import json

import numpy as np
import pytest

from edabench import errors
from edabench.ingest import (Condition, Experiment, RawRecording, WindowSpec,
                             builtin_windows, load_manifest, load_recording,
                             parse_e4_csv, parse_plain, slice_window,
                             write_plain)


class TestParseE4:
    def test_basic(self):
        epoch, rate, samples = parse_e4_csv("1593000000.0\n4.0\n0.1\n0.2\n")
        assert epoch == 1593000000.0
        assert rate == 4.0
        assert samples.tolist() == [0.1, 0.2]

    def test_headers_only_is_empty_body(self):
        with pytest.raises(errors.EmptyBody):
            parse_e4_csv("4.0\n")
        with pytest.raises(errors.EmptyBody):
            parse_e4_csv("1593000000.0\n4.0\n")

    def test_malformed_header(self):
        with pytest.raises(errors.MalformedHeader):
            parse_e4_csv("hello\n4.0\n0.1\n0.2\n")

    def test_nonfinite_sample_reports_line(self):
        with pytest.raises(errors.NonFiniteSample) as exc:
            parse_e4_csv("1593000000.0\n4.0\n0.1\nnan\n")
        assert exc.value.line_no == 4

    def test_duration(self):
        body = "\n".join(["0.5"] * 480)
        _, rate, samples = parse_e4_csv(f"1593000000.0\n4.0\n{body}\n")
        assert len(samples) / rate == 120.0


class TestPlainFormat:
    def test_roundtrip_bitwise(self, rng):
        samples = rng.standard_normal(100) * 3.3 + 2.0
        rec = RawRecording("S01", Condition.REST, 4.0, samples)
        import io, tempfile, pathlib
        with tempfile.TemporaryDirectory() as d:
            p = pathlib.Path(d) / "rec.txt"
            write_plain(rec, p)
            back = parse_plain(p.read_text())
        assert np.array_equal(back, samples)

    def test_empty(self):
        with pytest.raises(errors.EmptyBody):
            parse_plain("")


class TestManifest:
    def _write(self, tmp_path, entries):
        doc = {"version": 1, "entries": entries}
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps(doc))
        return p

    def test_exclusions(self, tmp_path):
        entries = []
        for i in range(1, 31):
            sid = f"S{i:02d}"
            entries.append({"subject_id": sid, "condition": "Aerobic",
                            "path": f"{sid}.txt",
                            "excluded": sid in ("S03", "S07", "S11"),
                            "reason": "dropped" if sid in ("S03", "S07", "S11")
                            else None})
        m = load_manifest(self._write(tmp_path, entries))
        assert len(m.entries) == 30
        assert len(m.usable()) == 27

    def test_empty(self, tmp_path):
        m = load_manifest(self._write(tmp_path, []))
        assert m.entries == []

    def test_duplicate(self, tmp_path):
        entries = [{"subject_id": "S01", "condition": "Rest", "path": "a.txt"},
                   {"subject_id": "S01", "condition": "Rest", "path": "b.txt"}]
        with pytest.raises(errors.DuplicateEntry):
            load_manifest(self._write(tmp_path, entries))

    def test_missing_file(self, tmp_path):
        with pytest.raises(errors.MissingFile):
            load_manifest(tmp_path / "nope.json")


class TestSliceWindow:
    def _rec(self, n, fs=4.0):
        return RawRecording("S01", Condition.AEROBIC, fs,
                            np.arange(n, dtype=float))

    def test_rest_window_sample_count(self):
        seg = slice_window(self._rec(8000),
                           WindowSpec(Condition.REST, 0.0, 120.0))
        assert len(seg.samples) == 480

    def test_aerobic_window_sample_count(self):
        seg = slice_window(self._rec(8000),
                           WindowSpec(Condition.AEROBIC, 1560.0, 1740.0))
        assert len(seg.samples) == 720
        assert seg.samples[0] == 1560 * 4

    def test_out_of_range(self):
        rec = self._rec(480)
        with pytest.raises(errors.WindowOutOfRange):
            slice_window(rec, WindowSpec(Condition.REST, 0.0, 121.0))

    def test_full_range_idempotent(self):
        rec = self._rec(480)
        seg = slice_window(rec, WindowSpec(Condition.REST, 0.0, 120.0))
        rec2 = RawRecording(seg.subject_id, seg.label, seg.sample_rate_hz,
                            seg.samples)
        seg2 = slice_window(rec2, WindowSpec(Condition.REST, 0.0, 120.0))
        assert np.array_equal(seg.samples, seg2.samples)


class TestBuiltinWindows:
    def test_rest_aerobic(self):
        w = builtin_windows(Experiment.REST_AEROBIC)
        assert [(x.label, x.start_s, x.end_s) for x in w] == [
            (Condition.REST, 0.0, 120.0),
            (Condition.AEROBIC, 1560.0, 1740.0)]

    def test_stress_rest(self):
        w = builtin_windows(Experiment.STRESS_REST)
        assert (w[1].label, w[1].start_s, w[1].end_s) == \
            (Condition.STRESS, 630.0, 750.0)

    def test_three_class_uses_full_recordings(self):
        assert builtin_windows(Experiment.THREE_CLASS) == []


class TestLoadRecording:
    def test_autodetect_e4(self, tmp_path):
        p = tmp_path / "eda.csv"
        p.write_text("1593000000.0\n4.0\n" + "\n".join(["1.0"] * 10) + "\n")
        rec = load_recording(p, "S01", Condition.REST)
        assert rec.sample_rate_hz == 4.0
        assert rec.start_epoch_s == 1593000000.0
        assert len(rec.samples) == 10

    def test_autodetect_plain(self, tmp_path):
        p = tmp_path / "eda.txt"
        p.write_text("\n".join(str(0.1 * i) for i in range(1, 11)) + "\n")
        rec = load_recording(p, "S01", Condition.REST, sample_rate_hz=4.0)
        assert rec.start_epoch_s is None
        assert len(rec.samples) == 10
