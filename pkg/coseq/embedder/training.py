from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .model import Embedder
from ..config.config_schema import EmbedderConfig
from ..exceptions import ConfigurationError
from ..logger import get_logger
from ..nn import Tensor, adam_step, l2_normalize, normalize, softmax_cross_entropy
from ..synthio.corpus import Corpus

logger = get_logger()


@dataclass
class EmbedderTrainingResult:
    model: Embedder
    initial_loss: float
    epoch_losses: List[float] = field(default_factory=list)
    retrieval_top1: Optional[float] = None

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else self.initial_loss


def corpus_pairs(corpus: Corpus) -> Tuple[List[str], np.ndarray]:
    """(resolved_text, gt_scene) for every step of the corpus."""
    texts = [step.resolved_text for _, step in corpus.steps()]
    images = np.stack([step.gt_scene for _, step in corpus.steps()]) if texts else np.zeros((0, 1, 1, 3))
    return texts, images.astype(np.float32)


def contrastive_loss(model: Embedder, bags: np.ndarray, images: np.ndarray, temperature: float) -> Tensor:
    """Symmetric InfoNCE over a batch: matching (text, image) rows are the positives."""
    text = normalize(model.text_forward(bags))
    image = normalize(model.image_forward(images))
    logits = (text @ image.T) * (1.0 / temperature)
    targets = np.eye(bags.shape[0], dtype=np.float32)
    return (softmax_cross_entropy(logits, targets) + softmax_cross_entropy(logits.T, targets)) * 0.5


def retrieval_top1(model: Embedder, texts: Sequence[str], images: np.ndarray, batch: int = 32) -> float:
    """Text-to-image top-1 accuracy within consecutive chunks of ``batch`` pairs."""
    if len(texts) < 2:
        raise ConfigurationError("retrieval needs at least 2 pairs")
    text_vecs = l2_normalize(model.encode_texts(texts))
    image_vecs = l2_normalize(model.encode_images(images))
    hits = 0
    counted = 0
    for start in range(0, len(texts), batch):
        stop = min(start + batch, len(texts))
        if stop - start < 2:
            continue
        scores = text_vecs[start:stop] @ image_vecs[start:stop].T
        hits += int(np.sum(np.argmax(scores, axis=1) == np.arange(stop - start)))
        counted += stop - start
    accuracy = hits / counted
    logger.debug("Text-to-image top-1 over %d pairs in chunks of %d: %.3f", counted, batch, accuracy)
    return accuracy


def train_embedder(
    corpus: Corpus,
    cfg: Optional[EmbedderConfig] = None,
    held_out: Optional[Corpus] = None,
    show_progress: bool = False,
) -> EmbedderTrainingResult:
    cfg = cfg or EmbedderConfig()
    texts, images = corpus_pairs(corpus)
    batch_size = min(cfg.optim.batch_size, len(texts))
    if batch_size < 2:
        raise ConfigurationError(f"contrastive training needs batches of at least 2 pairs, got {batch_size}")

    model = Embedder(cfg, image_size=images.shape[1])
    bags = model.vocabulary.bags(texts)
    params = model.parameters()
    rng = np.random.default_rng(cfg.seed)
    logger.debug(
        "Training embedder on %d pairs (d=%d, batch=%d, epochs=%d)", len(texts), cfg.d, batch_size, cfg.optim.epochs
    )

    first = np.arange(batch_size)
    initial_loss = contrastive_loss(model, bags[first], images[first], cfg.temperature).item()
    model.zero_grad()
    logger.debug("Initial contrastive loss %.4f (ln batch = %.4f)", initial_loss, np.log(batch_size))

    result = EmbedderTrainingResult(model=model, initial_loss=initial_loss)
    for epoch in tqdm(range(cfg.optim.epochs), desc="Embedder", unit="epoch", disable=not show_progress):
        order = rng.permutation(len(texts))
        losses = []
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            if len(batch) < 2:
                continue
            loss = contrastive_loss(model, bags[batch], images[batch], cfg.temperature)
            loss.backward()
            adam_step(params, cfg.optim)
            losses.append(loss.item())
        result.epoch_losses.append(float(np.mean(losses)))
        logger.trace("Embedder epoch %d loss %.4f", epoch + 1, result.epoch_losses[-1])

    model.trained = True
    if held_out is not None and len(held_out):
        held_texts, held_images = corpus_pairs(held_out)
        if len(held_texts) >= 2:
            result.retrieval_top1 = retrieval_top1(model, held_texts, held_images, cfg.retrieval_batch)
    logger.success(
        "Embedder trained: final loss %.4f, held-out top-1 %s",
        result.final_loss,
        "n/a" if result.retrieval_top1 is None else f"{result.retrieval_top1:.3f}",
    )
    return result


__all__ = ["EmbedderTrainingResult", "corpus_pairs", "contrastive_loss", "retrieval_top1", "train_embedder"]
