import os
import unittest
from dataclasses import dataclass
from functools import lru_cache

from coseq.config import CorpusConfig, DiffuserConfig, EmbedderConfig, SelectorConfig
from coseq.diffuser import train_diffuser
from coseq.embedder import train_embedder
from coseq.pipeline import ModelBundle
from coseq.selector import SelectorTrainingResult, train_selector
from coseq.synthio import Corpus, generate_corpus, split_corpus

RUN_ACCEPTANCE = os.environ.get("COSEQ_RUN_ACCEPTANCE") == "1"

acceptance = unittest.skipUnless(RUN_ACCEPTANCE, "set COSEQ_RUN_ACCEPTANCE=1 to run the long training checks")


@dataclass
class TrainedSetup:
    corpus: Corpus
    train: Corpus
    held_out: Corpus
    models: ModelBundle
    selector: SelectorTrainingResult


@lru_cache(maxsize=1)
def trained_setup() -> TrainedSetup:
    """Default corpus, 80/20 split, every model trained with its default config."""
    corpus = generate_corpus(CorpusConfig())
    selector_cfg = SelectorConfig()
    train, held_out = split_corpus(corpus, selector_cfg.train_frac, selector_cfg.seed)
    embedder = train_embedder(train, EmbedderConfig(), held_out).model
    diffuser = train_diffuser(train, embedder, DiffuserConfig()).model
    selector = train_selector(train, embedder, selector_cfg, held_out=held_out)
    return TrainedSetup(corpus, train, held_out, ModelBundle(embedder, diffuser, selector.head), selector)
