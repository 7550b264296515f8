import numpy as np

from coseq.config import CorpusConfig, EmbedderConfig, OptimConfig, SelectorConfig
from coseq.embedder import Embedder, train_embedder
from coseq.exceptions import ConfigurationError, DependencyError
from coseq.selector import VARIANTS, train_selector
from coseq.selector.training import apply_variant, build_instances, build_scene_table, sample_batch
from coseq.selector.head import SelectionHead
from coseq.synthio import generate_corpus, split_corpus
from tests.base_test_case import BaseTestCase


def _config(epochs: int, m: int = 4) -> SelectorConfig:
    return SelectorConfig(M=m, seed=3, optim=OptimConfig(learning_rate=0.01, batch_size=64, epochs=epochs))


class TestTrainSelector(BaseTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        corpus = generate_corpus(CorpusConfig(n_tasks=30, rng_seed=11))
        cls.train, cls.held_out = split_corpus(corpus, 0.8)
        embedder_cfg = EmbedderConfig(
            d=16, token_dim=8, hidden=32, seed=2, optim=OptimConfig(learning_rate=0.003, batch_size=16, epochs=3)
        )
        cls.embedder = train_embedder(cls.train, embedder_cfg).model

    def test_untrained_embedder_is_a_dependency_error(self):
        with self.assertRaises(DependencyError) as context:
            train_selector(self.train, Embedder(EmbedderConfig(d=16)), _config(1), held_out=self.held_out)
        self.assertEqual(context.exception.module_name, "embedder")

    def test_initial_loss_is_near_log_m(self):
        result = train_selector(self.train, self.embedder, _config(0), held_out=self.held_out)
        self.assertAlmostEqual(result.initial_loss, np.log(4), delta=0.1)
        self.assertFalse(result.head.trained)

    def test_fixed_seed_reproduces_losses(self):
        first = train_selector(self.train, self.embedder, _config(2), held_out=self.held_out)
        second = train_selector(self.train, self.embedder, _config(2), held_out=self.held_out)
        self.assertEqual(first.epoch_losses, second.epoch_losses)
        self.assertEqual(first.held_out_accuracy, second.held_out_accuracy)

    def test_training_lowers_the_loss(self):
        result = train_selector(self.train, self.embedder, _config(8), held_out=self.held_out)
        self.assertTrue(result.head.trained)
        self.assertLess(result.final_loss, result.initial_loss)
        for accuracy in (result.initial_accuracy, result.held_out_accuracy):
            self.assertGreaterEqual(accuracy, 0.0)
            self.assertLessEqual(accuracy, 1.0)

    def test_every_variant_trains(self):
        for variant in VARIANTS:
            with self.subTest(variant=variant):
                result = train_selector(self.train, self.embedder, _config(1), held_out=self.held_out, variant=variant)
                self.assertEqual(result.variant, variant)
                self.assertTrue(np.isfinite(result.final_loss))

    def test_unknown_variant_and_small_corpus_are_configuration_errors(self):
        with self.assertRaises(ConfigurationError):
            train_selector(self.train, self.embedder, _config(1), held_out=self.held_out, variant="image_only")
        with self.assertRaises(ConfigurationError):
            train_selector(self.train, self.embedder, _config(1, m=10), held_out=self.held_out)


class TestCandidateSampling(BaseTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.corpus = generate_corpus(CorpusConfig(n_tasks=12, rng_seed=12))
        embedder = Embedder(EmbedderConfig(d=16, token_dim=8, hidden=16))
        cls.head = SelectionHead(16)
        cls.table = build_scene_table(cls.corpus, embedder, cls.head)

    def test_instances_cover_every_step_after_the_first(self):
        instances = build_instances(self.table)
        self.assertEqual(len(instances), sum(len(task) - 1 for task in self.corpus))
        self.assertTrue(all(k >= 2 for _, k in instances))

    def test_batch_holds_the_true_scene_and_its_context_sums(self):
        instances = build_instances(self.table)
        batch = sample_batch(self.table, instances, 5, np.random.default_rng(0))
        for i, (task, k) in enumerate(instances):
            with self.subTest(instance=i):
                label = int(batch.labels[i])
                true_row = self.table.rows[task][k - 1]
                np.testing.assert_array_equal(batch.candidate_text[i, label], self.table.text[true_row])
                self.assertEqual(batch.counts[i], k - 1)
                self.assertArrayClose(
                    batch.text_sum[i], self.table.text[self.table.rows[task][: k - 1]].sum(axis=0), atol=1e-5
                )

    def test_shuffled_variants_permute_rows(self):
        rng = np.random.default_rng(1)
        text_only = apply_variant(self.table, "text_shuffled", rng)
        np.testing.assert_array_equal(text_only.image, self.table.image)
        self.assertArrayClose(np.sort(text_only.text, axis=0), np.sort(self.table.text, axis=0))
        static = apply_variant(self.table, "static_text", rng, static_text=self.table.text[0])
        self.assertTrue(np.all(static.text == self.table.text[0]))
        with self.assertRaises(ConfigurationError):
            apply_variant(self.table, "static_text", rng)

    def test_too_few_tasks_for_m_is_a_configuration_error(self):
        with self.assertRaises(ConfigurationError):
            sample_batch(self.table, build_instances(self.table), 13, np.random.default_rng(2))
