import numpy as np

from coseq.config import CorpusConfig, EmbedderConfig, OptimConfig
from coseq.embedder import retrieval_top1, train_embedder
from coseq.embedder.training import corpus_pairs
from coseq.exceptions import ConfigurationError
from coseq.synthio import generate_corpus, split_corpus
from tests.base_test_case import BaseTestCase


def _quick_config(epochs: int = 3) -> EmbedderConfig:
    return EmbedderConfig(
        d=16, token_dim=8, hidden=32, seed=2, optim=OptimConfig(learning_rate=0.003, batch_size=16, epochs=epochs)
    )


class TestTrainEmbedder(BaseTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        corpus = generate_corpus(CorpusConfig(n_tasks=30, rng_seed=6))
        cls.train, cls.held_out = split_corpus(corpus, 0.8)

    def test_fixed_seed_reproduces_losses(self):
        first = train_embedder(self.train, _quick_config(2))
        second = train_embedder(self.train, _quick_config(2))
        self.assertEqual(first.epoch_losses, second.epoch_losses)
        np.testing.assert_array_equal(
            first.model.encode_text("set the background to navy"),
            second.model.encode_text("set the background to navy"),
        )

    def test_training_lowers_the_loss_and_marks_model_trained(self):
        result = train_embedder(self.train, _quick_config(4), held_out=self.held_out)
        self.assertTrue(result.model.trained)
        self.assertLess(result.final_loss, result.initial_loss)
        self.assertAlmostEqual(result.initial_loss, np.log(16), delta=0.15)
        self.assertIsNotNone(result.retrieval_top1)
        self.assertGreaterEqual(self.unwrap_optional(result.retrieval_top1), 0.0)
        self.assertLessEqual(self.unwrap_optional(result.retrieval_top1), 1.0)

    def test_retrieval_needs_two_pairs(self):
        result = train_embedder(self.train, _quick_config(0))
        texts, images = corpus_pairs(self.held_out)
        with self.assertRaises(ConfigurationError):
            retrieval_top1(result.model, texts[:1], images[:1])
