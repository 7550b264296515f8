import json
import tempfile
from pathlib import Path

import numpy as np
from scipy import stats

from coseq.config import CorpusConfig
from coseq.constants import CORPUS_MANIFEST_NAME, MAX_STEPS_PER_TASK, MIN_STEPS_PER_TASK
from coseq.exceptions import ConfigurationError, CorpusFormatError
from coseq.synthio import apply_action, generate_corpus, load_corpus, render_scene, save_corpus, split_corpus
from coseq.synthio.workspace import Workspace
from tests.base_test_case import BaseTestCase


class TestGenerateCorpus(BaseTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.corpus = generate_corpus(CorpusConfig(n_tasks=350, rng_seed=3))

    def test_same_seed_gives_identical_corpora(self):
        cfg = CorpusConfig(n_tasks=12, rng_seed=5)
        first, second = generate_corpus(cfg), generate_corpus(cfg)
        for task_a, task_b in zip(first, second):
            self.assertEqual(task_a.dependency_graph, task_b.dependency_graph)
            for step_a, step_b in zip(task_a.steps, task_b.steps):
                self.assertEqual(step_a.raw_text, step_b.raw_text)
                np.testing.assert_array_equal(step_a.gt_scene, step_b.gt_scene)

    def test_same_seed_gives_byte_identical_files(self):
        cfg = CorpusConfig(n_tasks=5, rng_seed=9)
        with tempfile.TemporaryDirectory() as first_dir, tempfile.TemporaryDirectory() as second_dir:
            save_corpus(generate_corpus(cfg), first_dir)
            save_corpus(generate_corpus(cfg), second_dir)
            first_files = sorted(p.relative_to(first_dir) for p in Path(first_dir).rglob("*") if p.is_file())
            second_files = sorted(p.relative_to(second_dir) for p in Path(second_dir).rglob("*") if p.is_file())
            self.assertEqual(first_files, second_files)
            for relative in first_files:
                self.assertEqual(
                    (Path(first_dir) / relative).read_bytes(), (Path(second_dir) / relative).read_bytes()
                )

    def test_linear_corpus_only_uses_previous_step(self):
        corpus = generate_corpus(CorpusConfig(n_tasks=60, nonlinear_fraction=0.0))
        for task in corpus:
            for step in task.steps:
                self.assertEqual(step.antecedent, step.index - 1)

    def test_nonlinear_count_within_binomial_interval(self):
        eligible = [step for _, step in self.corpus.steps() if step.index >= 3]
        nonlinear = sum(1 for step in eligible if step.antecedent < step.index - 1)
        low, high = stats.binom.interval(0.99, len(eligible), 0.5)
        self.assertGreaterEqual(len(eligible), 800)
        self.assertGreaterEqual(nonlinear, low)
        self.assertLessEqual(nonlinear, high)

    def test_step_counts_follow_defaults(self):
        lengths = [len(task) for task in self.corpus]
        self.assertGreaterEqual(min(lengths), MIN_STEPS_PER_TASK)
        self.assertLessEqual(max(lengths), MAX_STEPS_PER_TASK)
        self.assertAlmostEqual(float(np.mean(lengths)), 4.9, delta=0.3)

    def test_antecedents_precede_their_steps(self):
        for task in self.corpus:
            self.assertEqual(task.steps[0].antecedent, 0)
            for step in task.steps:
                self.assertLess(step.antecedent, step.index)

    def test_ground_truth_replays_along_antecedent_path(self):
        for task in list(self.corpus)[:40]:
            states = [Workspace()]
            for step in task.steps:
                workspace, _ = apply_action(states[step.antecedent], step.action)
                self.assertEqual(workspace, step.workspace)
                np.testing.assert_array_equal(render_scene(workspace, 16), step.gt_scene)
                states.append(workspace)

    def test_zero_tasks_is_a_config_error(self):
        with self.assertRaises(ConfigurationError):
            CorpusConfig(n_tasks=0)

    def test_parallel_generation_matches_serial(self):
        from coseq.config import PerformanceConfig

        cfg = CorpusConfig(n_tasks=8, rng_seed=1)
        serial = generate_corpus(cfg)
        parallel = generate_corpus(cfg, PerformanceConfig(parallel_tasks=True, max_workers=3, show_progress=False))
        self.assertEqual([t.id for t in serial], [t.id for t in parallel])
        self.assertEqual(
            [s.raw_text for _, s in serial.steps()], [s.raw_text for _, s in parallel.steps()]
        )


class TestSplitCorpus(BaseTestCase):
    def setUp(self):
        self.corpus = generate_corpus(CorpusConfig(n_tasks=10))

    def test_split_is_disjoint_and_deterministic(self):
        train, held_out = split_corpus(self.corpus, 0.8)
        self.assertEqual((len(train), len(held_out)), (8, 2))
        self.assertFalse({t.id for t in train} & {t.id for t in held_out})
        again, _ = split_corpus(self.corpus, 0.8)
        self.assertEqual([t.id for t in train], [t.id for t in again])

    def test_fraction_outside_open_interval_is_rejected(self):
        for frac in (0.0, 1.0, 1.5, -0.2):
            with self.subTest(frac=frac):
                with self.assertRaises(ConfigurationError):
                    split_corpus(self.corpus, frac)


class TestCorpusIO(BaseTestCase):
    def test_saved_corpus_loads_back(self):
        corpus = generate_corpus(CorpusConfig(n_tasks=4, rng_seed=2))
        with tempfile.TemporaryDirectory() as tmp:
            save_corpus(corpus, tmp)
            manifest = json.loads((Path(tmp) / CORPUS_MANIFEST_NAME).read_text(encoding="utf-8"))
            self.assertEqual(manifest["format"], "coseq-corpus-v1")
            loaded = load_corpus(tmp)
        self.assertEqual(len(loaded), 4)
        for task_a, task_b in zip(corpus, loaded):
            self.assertEqual(task_a.dependency_graph, task_b.dependency_graph)
            for step_a, step_b in zip(task_a.steps, task_b.steps):
                self.assertEqual(step_a.resolved_text, step_b.resolved_text)
                self.assertEqual(step_a.workspace, step_b.workspace)
                self.assertArrayClose(step_a.gt_scene, step_b.gt_scene, atol=0.5 / 255 + 1e-6)

    def test_wrong_format_is_rejected(self):
        with tempfile.TemporaryDirectory() as tmp:
            (Path(tmp) / CORPUS_MANIFEST_NAME).write_text(json.dumps({"format": "other", "tasks": []}))
            with self.assertRaises(CorpusFormatError):
                load_corpus(tmp)

    def test_missing_manifest_is_rejected(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CorpusFormatError):
                load_corpus(tmp)
