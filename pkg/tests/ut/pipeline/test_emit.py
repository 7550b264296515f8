import json
import tempfile
from pathlib import Path

import numpy as np

from coseq.config import PipelineConfig
from coseq.exceptions import TraceFormatError
from coseq.pipeline import (
    CandidateRecord,
    GenerationTrace,
    StepTrace,
    crossfade,
    emit_sequence,
    load_sequence,
    load_trace,
    save_trace,
    synthesize_task,
)
from coseq.synthio import load_ppm
from tests.base_test_case import BaseTestCase
from tests.ut.pipeline.helpers import tiny_bundle, tiny_corpus, truncated

QUANTUM = 0.5 / 255 + 1e-6


def _trace(n_steps: int = 2) -> GenerationTrace:
    steps = [StepTrace(1, "add a red circle", "add a red circle", [CandidateRecord(0, 10, 0.3, 1.0, [0, 0, 1, 0])], 0)]
    for n in range(2, n_steps + 1):
        candidates = [CandidateRecord(i, 10, 0.1 * i, 1.0 / (n - 1), [0, 0, n, i - 1]) for i in range(1, n)]
        steps.append(StepTrace(n, "recolor it blue", "recolor the red circle blue", candidates, n - 2))
    return GenerationTrace(task_id="task-0000", task_index=0, mode="cosed", w=0, B=1, T=10, seed=0, steps=steps)


class TestCrossfade(BaseTestCase):
    def test_midpoint_is_pixel_average(self):
        rng = np.random.default_rng(0)
        a, b = rng.random((4, 4, 3)), rng.random((4, 4, 3))
        (midpoint,) = crossfade(a, b, 1)
        self.assertArrayClose(midpoint, (a + b) / 2, atol=1e-6)

    def test_frames_move_linearly(self):
        a, b = np.zeros((2, 2, 3)), np.ones((2, 2, 3))
        frames = crossfade(a, b, 3)
        self.assertEqual([float(f[0, 0, 0]) for f in frames], [0.25, 0.5, 0.75])
        self.assertEqual(crossfade(a, b, 0), [])


class TestTraceIO(BaseTestCase):
    def test_round_trip(self):
        trace = _trace(3)
        with tempfile.TemporaryDirectory() as temp_dir:
            path = save_trace(trace, Path(temp_dir) / "trace.json")
            loaded = load_trace(path)
        self.assertEqual(loaded.to_dict(), trace.to_dict())
        self.assertEqual(loaded.steps[2].chosen.tag, (2, 10))

    def test_invalid_traces_are_rejected(self):
        cases = {
            "format": lambda d: d.update(format="coseq-trace-v0"),
            "chosen index": lambda d: d["steps"][1].update(chosen_index=5),
            "candidate count": lambda d: d["steps"][2]["candidates"].pop(),
            "missing field": lambda d: d.pop("task_id"),
        }
        for name, corrupt in cases.items():
            with self.subTest(case=name):
                data = _trace(3).to_dict()
                corrupt(data)
                with self.assertRaises(TraceFormatError):
                    GenerationTrace.from_dict(data)

    def test_missing_file(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            with self.assertRaises(TraceFormatError):
                load_trace(Path(temp_dir) / "absent.json")


class TestEmitSequence(BaseTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        task = truncated(max(tiny_corpus().tasks, key=len), 3)
        cls.result = synthesize_task(task, tiny_bundle(), PipelineConfig(w=1, B=2))

    def test_read_back_matches_in_memory_images(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            manifest_path = emit_sequence(self.result.images, self.result.trace, temp_dir, crossfade_frames=1)
            images, manifest = load_sequence(temp_dir)
            trace = load_trace(Path(temp_dir) / manifest["trace"])
            self.assertTrue(manifest_path.exists())
            self.assertEqual(len(manifest["steps"]), 3)
            self.assertEqual(len(manifest["frames"]), 2)
            for original, loaded in zip(self.result.images, images):
                self.assertArrayClose(loaded, original, atol=QUANTUM)
            self.assertEqual([entry.image for entry in trace.steps], [s["image"] for s in manifest["steps"]])
            frame = load_ppm(Path(temp_dir) / manifest["frames"][0])
            self.assertArrayClose(frame, (self.result.images[0] + self.result.images[1]) / 2, atol=QUANTUM + 1e-6)

    def test_output_is_byte_reproducible(self):
        contents = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as temp_dir:
                emit_sequence(self.result.images, self.result.trace, temp_dir, crossfade_frames=2)
                root = Path(temp_dir)
                contents.append({str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()})
        self.assertEqual(contents[0], contents[1])
        self.assertIn("sequence.json", contents[0])
        self.assertEqual(json.loads(contents[0]["sequence.json"])["format"], "coseq-sequence-v1")

    def test_image_count_must_match_trace(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            with self.assertRaises(TraceFormatError):
                emit_sequence(self.result.images[:1], self.result.trace, temp_dir)
