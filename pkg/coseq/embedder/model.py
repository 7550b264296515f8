from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .tokenizer import Vocabulary
from ..config.config_loader import config_from_dict
from ..config.config_schema import EmbedderConfig, to_dict
from ..exceptions import CheckpointFormatError, DimensionError
from ..logger import get_logger
from ..nn import MLP, Module, Param, Tensor, as_tensor, l2_normalize, load_checkpoint, no_grad, save_checkpoint

logger = get_logger()

PathLike = Union[str, Path]
TextInput = Union[str, Sequence[str]]

# initial embeddings all sit near one shared unit direction
FINAL_INIT_SCALE = 0.01
CHECKPOINT_KIND = "embedder"


@dataclass(frozen=True)
class SceneEmbedding:
    text_vec: np.ndarray
    image_vec: np.ndarray

    def normalized(self) -> "SceneEmbedding":
        return SceneEmbedding(l2_normalize(self.text_vec), l2_normalize(self.image_vec))


def patchify(images: np.ndarray, patch_size: int) -> np.ndarray:
    """(n, S, S, 3) -> (n, S/p * S/p * p * p * 3), patches in row-major order."""
    n, height, width, channels = images.shape
    rows, cols = height // patch_size, width // patch_size
    patches = images.reshape(n, rows, patch_size, cols, patch_size, channels)
    return patches.transpose(0, 1, 3, 2, 4, 5).reshape(n, -1)


class Embedder(Module):
    """Dual encoder: bag-of-tokens text branch and flattened-patch image branch,
    both ending in a d-dimensional vector."""

    def __init__(
        self,
        cfg: Optional[EmbedderConfig] = None,
        image_size: int = 16,
        vocabulary: Optional[Vocabulary] = None,
    ) -> None:
        self.cfg = cfg or EmbedderConfig()
        if image_size % self.cfg.patch_size != 0:
            raise DimensionError(
                "Embedder", f"image size divisible by patch size {self.cfg.patch_size}", image_size
            )
        self.image_size = image_size
        self.vocabulary = vocabulary or Vocabulary()
        rng = np.random.default_rng(self.cfg.seed)
        cfg = self.cfg

        self.token_embedding = Param(
            rng.normal(0.0, 1.0, size=(len(self.vocabulary), cfg.token_dim)), name="token_embedding"
        )
        self.text_mlp = MLP(
            [cfg.token_dim, cfg.hidden, cfg.d], rng, final_init_scale=FINAL_INIT_SCALE, name="text_mlp"
        )
        self.image_mlp = MLP(
            [image_size * image_size * 3, cfg.hidden, cfg.d],
            rng,
            final_init_scale=FINAL_INIT_SCALE,
            name="image_mlp",
        )
        shared = rng.normal(size=cfg.d)
        shared = (shared / np.linalg.norm(shared)).astype(np.float32)
        for mlp in (self.text_mlp, self.image_mlp):
            bias = mlp.layers[-1].bias
            assert bias is not None
            bias.data = shared.copy()
        self.trained = False

    @property
    def d(self) -> int:
        return self.cfg.d

    def text_forward(self, bags: np.ndarray) -> Tensor:
        pooled = as_tensor(bags) @ self.token_embedding
        return self.text_mlp(pooled)

    def image_forward(self, images: np.ndarray) -> Tensor:
        images = np.asarray(images, dtype=np.float32)
        expected = (self.image_size, self.image_size, 3)
        if images.ndim != 4 or images.shape[1:] != expected:
            raise DimensionError("encode_image", f"(n, {', '.join(map(str, expected))})", images.shape)
        flat = patchify(images * 2.0 - 1.0, self.cfg.patch_size)
        return self.image_mlp(flat)

    def encode_texts(self, texts: Sequence[TextInput]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.d), dtype=np.float32)
        with no_grad():
            return self.text_forward(self.vocabulary.bags(texts)).numpy().copy()

    def encode_images(self, images: np.ndarray) -> np.ndarray:
        images = np.asarray(images)
        if images.ndim == 4 and images.shape[0] == 0:
            return np.zeros((0, self.d), dtype=np.float32)
        with no_grad():
            return self.image_forward(images).numpy().copy()

    def encode_text(self, tokens: TextInput) -> np.ndarray:
        return self.encode_texts([tokens])[0]

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        image = np.asarray(image)
        expected = (self.image_size, self.image_size, 3)
        if image.shape != expected:
            raise DimensionError("encode_image", expected, image.shape)
        return self.encode_images(image[None])[0]

    def embed(self, text: TextInput, image: np.ndarray) -> SceneEmbedding:
        return SceneEmbedding(self.encode_text(text), self.encode_image(image))

    def embed_many(self, texts: Sequence[TextInput], images: np.ndarray) -> List[SceneEmbedding]:
        text_vecs = self.encode_texts(texts)
        image_vecs = self.encode_images(images)
        return [SceneEmbedding(t, v) for t, v in zip(text_vecs, image_vecs)]


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0.0 (with a warning) when either vector is zero."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError("similarity", a.shape, b.shape)
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        logger.warning("Cosine similarity with a zero vector is undefined; using 0.0")
        return 0.0
    return float(np.clip(a @ b / (norm_a * norm_b), -1.0, 1.0))


def save_embedder(model: Embedder, path: PathLike) -> Path:
    meta: Dict[str, Any] = {
        "kind": CHECKPOINT_KIND,
        "config": to_dict(model.cfg),
        "image_size": model.image_size,
        "vocabulary": model.vocabulary.tokens,
        "trained": model.trained,
    }
    return save_checkpoint(path, model.state_dict(), meta)


def load_embedder(path: PathLike) -> Embedder:
    state, meta = load_checkpoint(path)
    if meta.get("kind") != CHECKPOINT_KIND:
        raise CheckpointFormatError(path, f"expected an {CHECKPOINT_KIND} checkpoint, got '{meta.get('kind')}'")
    cfg = config_from_dict(EmbedderConfig, meta.get("config", {}), "embedder")
    model = Embedder(cfg, int(meta.get("image_size", 16)), Vocabulary(meta.get("vocabulary")))
    model.load_state_dict(state)
    model.trained = bool(meta.get("trained", False))
    logger.debug("Loaded embedder (trained=%s) from %s", model.trained, path)
    return model


__all__ = [
    "SceneEmbedding",
    "Embedder",
    "patchify",
    "similarity",
    "save_embedder",
    "load_embedder",
]
