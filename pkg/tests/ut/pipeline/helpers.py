from dataclasses import replace

import numpy as np

from coseq.config import CorpusConfig, DiffuserConfig, EmbedderConfig
from coseq.diffuser import DiffuserModel
from coseq.embedder import Embedder
from coseq.pipeline import ModelBundle
from coseq.selector import SelectionHead
from coseq.synthio import Corpus, Task, generate_corpus


def tiny_bundle(trained: bool = True) -> ModelBundle:
    embedder = Embedder(EmbedderConfig(d=8, token_dim=8, hidden=16, seed=1), image_size=16)
    diffuser = DiffuserModel(DiffuserConfig(T=10, hidden=16, time_dim=4, seed=2), image_size=16, cond_dim=8)
    head = SelectionHead(8, rng=np.random.default_rng(3))
    for model in (embedder, diffuser, head):
        model.trained = trained
    return ModelBundle(embedder=embedder, diffuser=diffuser, head=head)


def tiny_corpus(n_tasks: int = 6, seed: int = 21) -> Corpus:
    return generate_corpus(CorpusConfig(n_tasks=n_tasks, rng_seed=seed))


def longest_task(corpus: Corpus) -> Task:
    return max(corpus.tasks, key=len)


def truncated(task: Task, n_steps: int) -> Task:
    return replace(task, steps=task.steps[:n_steps])
