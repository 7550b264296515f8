from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .head import ProjectedScene, SelectionHead
from ..embedder.model import SceneEmbedding
from ..exceptions import DimensionError, DomainError
from ..logger import get_logger
from ..nn import Tensor, no_grad, softmax

logger = get_logger()


@dataclass(frozen=True, eq=False)
class CandidateScene:
    caption: str
    image: np.ndarray
    source_step: int
    source_latent_iter: int
    embedding: SceneEmbedding


def score(candidate: ProjectedScene, past: Sequence[ProjectedScene]) -> float:
    """Sum of raw dot products between the candidate and every past scene."""
    if not past:
        raise DomainError("score", "no past scenes to score against")
    vec = np.asarray(candidate.vec, dtype=np.float64)
    total = 0.0
    for scene in past:
        other = np.asarray(scene.vec, dtype=np.float64)
        if other.shape != vec.shape:
            raise DimensionError("score", vec.shape, other.shape)
        total += float(vec @ other)
    return total


def candidate_scores(
    head: SelectionHead,
    candidates: Sequence[SceneEmbedding],
    past_scenes: Sequence[SceneEmbedding],
) -> np.ndarray:
    if not candidates:
        raise DomainError("select", "no candidates")
    with no_grad():
        projected_past = [head.project(scene, "past") for scene in past_scenes]
        projected = [head.project(embedding, "current") for embedding in candidates]
    return np.array([score(scene, projected_past) for scene in projected], dtype=np.float64)


def rank(
    candidates: Sequence[CandidateScene],
    past_scenes: Sequence[SceneEmbedding],
    head: SelectionHead,
    temperature: Optional[float] = None,
) -> Tuple[int, np.ndarray, np.ndarray]:
    """Chosen index, softmax probabilities and raw scores of every candidate.

    Ties go to the lowest index.
    """
    scores = candidate_scores(head, [candidate.embedding for candidate in candidates], past_scenes)
    temperature = head.cfg.temperature if temperature is None else temperature
    probs = softmax(Tensor(scores / temperature, dtype=np.float64)).numpy()
    probs = probs / probs.sum()
    index = int(np.argmax(scores))
    logger.trace("Selected candidate %d of %d (p=%.3f)", index, len(candidates), probs[index])
    return index, probs, scores


def select(
    candidates: Sequence[CandidateScene],
    past_scenes: Sequence[SceneEmbedding],
    head: SelectionHead,
    temperature: Optional[float] = None,
) -> Tuple[int, np.ndarray]:
    index, probs, _ = rank(candidates, past_scenes, head, temperature)
    return index, probs


def probabilities(scores: Sequence[float], temperature: float = 1.0) -> List[float]:
    return [float(p) for p in softmax(Tensor(np.asarray(scores, dtype=np.float64) / temperature, dtype=np.float64)).numpy()]


__all__ = ["CandidateScene", "score", "candidate_scores", "rank", "select", "probabilities"]
