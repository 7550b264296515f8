from .tokenizer import Vocabulary, tokenize
from .model import SceneEmbedding, Embedder, similarity, save_embedder, load_embedder
from .training import EmbedderTrainingResult, contrastive_loss, retrieval_top1, train_embedder

__all__ = [
    "Vocabulary",
    "tokenize",
    "SceneEmbedding",
    "Embedder",
    "similarity",
    "save_embedder",
    "load_embedder",
    "EmbedderTrainingResult",
    "contrastive_loss",
    "retrieval_top1",
    "train_embedder",
]
