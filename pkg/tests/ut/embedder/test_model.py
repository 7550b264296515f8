import math
import tempfile
from pathlib import Path
from unittest import mock

import numpy as np

from coseq.config import EmbedderConfig, OptimConfig
from coseq.embedder import Embedder, Vocabulary, load_embedder, save_embedder, similarity
from coseq.embedder.training import contrastive_loss
from coseq.exceptions import CheckpointFormatError, ConfigurationError, DimensionError, DomainError, VocabularyError
from coseq.nn import grad_check
from tests.base_test_case import BaseTestCase

SMALL = EmbedderConfig(d=8, token_dim=6, hidden=10, seed=3)


class TestVocabulary(BaseTestCase):
    def test_bag_is_mean_pooling_weights(self):
        vocabulary = Vocabulary()
        bag = vocabulary.bag("add a red circle")
        self.assertAlmostEqual(float(bag.sum()), 1.0, places=6)
        self.assertAlmostEqual(float(bag[vocabulary.ids(["red"])[0]]), 0.25, places=6)

    def test_empty_text_has_zero_bag(self):
        self.assertFalse(Vocabulary().bag("").any())

    def test_out_of_vocabulary_token_raises(self):
        with self.assertRaises(VocabularyError) as context:
            Vocabulary().bag("add a golden circle")
        self.assertEqual(context.exception.tokens, ["golden"])

    def test_too_long_text_raises(self):
        with self.assertRaises(DomainError):
            Vocabulary().bag(["the"] * 401)


class TestEncoders(BaseTestCase):
    def setUp(self):
        self.model = Embedder(EmbedderConfig(seed=1))

    def test_same_text_gives_identical_vectors(self):
        first = self.model.encode_text("recolor the red circle blue")
        second = self.model.encode_text("recolor the red circle blue")
        np.testing.assert_array_equal(first, second)
        self.assertEqual(first.shape, (64,))

    def test_empty_text_is_finite(self):
        self.assertTrue(np.all(np.isfinite(self.model.encode_text(""))))

    def test_token_order_does_not_matter(self):
        tokens = "combine the red circle with the blue square".split()
        shuffled = list(reversed(tokens))
        np.testing.assert_array_equal(self.model.encode_text(tokens), self.model.encode_text(shuffled))

    def test_image_encoder_shapes(self):
        image = np.random.default_rng(0).random((16, 16, 3))
        np.testing.assert_array_equal(self.model.encode_image(image), self.model.encode_image(image.copy()))
        self.assertEqual(self.model.encode_image(image).shape, (64,))
        self.assertTrue(np.all(np.isfinite(self.model.encode_image(np.zeros((16, 16, 3))))))

    def test_wrong_image_size_raises(self):
        with self.assertRaises(DimensionError):
            self.model.encode_image(np.zeros((12, 12, 3)))

    def test_encoders_do_not_mutate_weights(self):
        before = self.model.state_dict()
        self.model.encode_text("add a red circle at the center")
        self.model.encode_image(np.ones((16, 16, 3)))
        for name, value in self.model.state_dict().items():
            np.testing.assert_array_equal(value, before[name])


class TestSimilarity(BaseTestCase):
    def test_self_and_opposite(self):
        v = np.array([0.3, -1.2, 2.0])
        self.assertAlmostEqual(similarity(v, v), 1.0, places=6)
        self.assertAlmostEqual(similarity(v, -v), -1.0, places=6)

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(7)
        a, b = rng.normal(size=10), rng.normal(size=10)
        dot = sum(x * y for x, y in zip(a, b))
        norm_a = math.sqrt(sum(x * x for x in a))
        norm_b = math.sqrt(sum(y * y for y in b))
        self.assertAlmostEqual(similarity(a, b), dot / (norm_a * norm_b), delta=1e-6)

    def test_symmetric_and_scale_invariant(self):
        rng = np.random.default_rng(8)
        a, b = rng.normal(size=6), rng.normal(size=6)
        self.assertAlmostEqual(similarity(a, b), similarity(b, a), delta=1e-12)
        self.assertAlmostEqual(similarity(3.5 * a, b), similarity(a, b), delta=1e-6)

    def test_zero_vector_gives_zero_with_warning(self):
        with mock.patch("coseq.embedder.model.logger") as mock_logger:
            self.assertEqual(similarity(np.zeros(4), np.ones(4)), 0.0)
        mock_logger.warning.assert_called_once()

    def test_dimension_mismatch_raises(self):
        with self.assertRaises(DimensionError):
            similarity(np.ones(3), np.ones(4))


class TestContrastiveLoss(BaseTestCase):
    def test_loss_at_init_is_near_ln_batch(self):
        model = Embedder(EmbedderConfig(seed=0))
        rng = np.random.default_rng(0)
        texts = ["add a red circle at the center", "set the background to navy", "recolor the blue bar green",
                 "turn the green square into a triangle"] * 4
        bags = model.vocabulary.bags(texts)
        images = rng.random((16, 16, 16, 3)).astype(np.float32)
        loss = contrastive_loss(model, bags, images, 0.07).item()
        self.assertAlmostEqual(loss, math.log(16), delta=0.1)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        for trial in range(20):
            with self.subTest(trial=trial):
                model = Embedder(EmbedderConfig(d=8, token_dim=6, hidden=10, seed=trial), image_size=8)
                texts = ["add a red circle at the center", "recolor it blue", "set the background to gray"]
                bags = model.vocabulary.bags(texts)
                images = rng.random((3, 8, 8, 3)).astype(np.float32)
                for param in (model.text_mlp.layers[-1].weight, model.image_mlp.layers[0].bias):
                    error = grad_check(lambda _: contrastive_loss(model, bags, images, 0.5), param)
                    self.assertLess(error, 1e-3)
                    model.zero_grad()

    def test_batch_of_one_is_rejected(self):
        with self.assertRaises(ConfigurationError):
            EmbedderConfig(optim=OptimConfig(batch_size=1))


class TestEmbedderCheckpoint(BaseTestCase):
    def test_save_and_load_restores_encoders(self):
        model = Embedder(SMALL)
        model.trained = True
        with tempfile.TemporaryDirectory() as tmp:
            path = save_embedder(model, Path(tmp) / "embedder.ckpt")
            loaded = load_embedder(path)
        self.assertTrue(loaded.trained)
        self.assertEqual(loaded.cfg.d, 8)
        text = "add a blue bar at the bottom left"
        np.testing.assert_array_equal(loaded.encode_text(text), model.encode_text(text))

    def test_other_checkpoint_kind_is_rejected(self):
        from coseq.nn import save_checkpoint

        with tempfile.TemporaryDirectory() as tmp:
            path = save_checkpoint(Path(tmp) / "x.ckpt", {}, {"kind": "selector"})
            with self.assertRaises(CheckpointFormatError):
                load_embedder(path)
