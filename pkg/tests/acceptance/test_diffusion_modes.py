import unittest
from dataclasses import replace

import numpy as np

from coseq.config import CorpusConfig, DiffuserConfig, OptimConfig
from coseq.diffuser import generate, train_diffuser
from coseq.synthio import Corpus, generate_corpus
from tests.acceptance.helpers import acceptance
from tests.base_test_case import BaseTestCase

N_SAMPLES = 100
RMS_RADIUS = 0.15
MODE_COLORS = ((0.9, 0.9, 0.9), (0.1, 0.1, 0.3), (0.85, 0.15, 0.1))


def three_mode_corpus(copies: int = 100) -> Corpus:
    """Every step scene replaced by one of three flat-colored scenes."""
    source = generate_corpus(CorpusConfig(n_tasks=40, rng_seed=9))
    modes = [np.full((16, 16, 3), rgb, dtype=np.float32) for rgb in MODE_COLORS]
    tasks = []
    for i, task in enumerate(source.tasks):
        steps = tuple(
            replace(step, gt_scene=modes[(i + k) % 3]) for k, step in enumerate(task.steps)
        )
        tasks.append(replace(task, steps=steps))
    corpus = Corpus(tasks, source.config)
    while sum(len(t) for t in corpus.tasks) < copies * 3:
        corpus = Corpus(corpus.tasks + tasks, source.config)
    return corpus


@acceptance
class TestUnconditionalModes(BaseTestCase):
    def test_samples_land_on_training_modes(self):
        corpus = three_mode_corpus()
        modes = np.stack([np.full((16, 16, 3), rgb, dtype=np.float32) for rgb in MODE_COLORS])
        cfg = DiffuserConfig(optim=OptimConfig(learning_rate=0.001, batch_size=128, epochs=150))
        model = train_diffuser(corpus, None, cfg, conditional=False).model

        hits = 0
        for i in range(N_SAMPLES):
            image, _ = generate(model, None, rng_seed=(i,))
            rms = np.sqrt(np.mean((modes - image[None]) ** 2, axis=(1, 2, 3)))
            hits += int(rms.min() <= RMS_RADIUS)
        self.assertGreaterEqual(hits, 0.9 * N_SAMPLES)


if __name__ == "__main__":
    unittest.main()
