from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np

from ..embedder.model import Embedder, similarity
from ..exceptions import DimensionError, DomainError
from ..logger import get_logger

logger = get_logger()

SCORE_SCALE = 100.0


def _stack(images: Sequence[np.ndarray]) -> np.ndarray:
    return np.stack([np.asarray(image, dtype=np.float32) for image in images])


def eval_tv(images: Sequence[np.ndarray], captions: Sequence[str], embedder: Embedder) -> float:
    """Mean caption-to-image cosine similarity, scaled to [-100, 100]."""
    if len(images) != len(captions):
        raise DimensionError("eval_tv", f"{len(captions)} images", len(images))
    if not images:
        raise DomainError("eval_tv", "empty sequence")
    text_vecs = embedder.encode_texts(list(captions))
    image_vecs = embedder.encode_images(_stack(images))
    scores = [similarity(t, v) for t, v in zip(text_vecs, image_vecs)]
    return SCORE_SCALE * float(np.mean(scores))


def pair_indices(n: int, all_pairs: bool = False) -> List[Tuple[int, int]]:
    if all_pairs:
        return list(combinations(range(n), 2))
    return [(i, i + 1) for i in range(n - 1)]


def eval_vv(images: Sequence[np.ndarray], embedder: Embedder, all_pairs: bool = False) -> float:
    """Mean image-to-image cosine similarity over consecutive pairs (or all
    pairs), scaled to [-100, 100]."""
    if len(images) < 2:
        raise DomainError("eval_vv", f"needs at least 2 images, got {len(images)}")
    image_vecs = embedder.encode_images(_stack(images))
    scores = [similarity(image_vecs[i], image_vecs[j]) for i, j in pair_indices(len(images), all_pairs)]
    return SCORE_SCALE * float(np.mean(scores))


__all__ = ["SCORE_SCALE", "eval_tv", "eval_vv", "pair_indices"]
