from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..config.config_loader import config_from_dict
from ..config.config_schema import SelectorConfig, to_dict
from ..embedder.model import SceneEmbedding
from ..exceptions import CheckpointFormatError, DimensionError, DomainError
from ..logger import get_logger
from ..nn import Linear, Module, Tensor, as_tensor, concat, l2_normalize, load_checkpoint, save_checkpoint

logger = get_logger()

PathLike = Union[str, Path]

ROLES = ("past", "current")
# scores start near zero, so the first softmax over candidates is close to uniform
PROJECTION_INIT_SCALE = 0.1
CHECKPOINT_KIND = "selector"


@dataclass(frozen=True, eq=False)
class ProjectedScene:
    vec: np.ndarray
    role: str


class SelectionHead(Module):
    """Four projections halving the embedding size.

    W_IT / W_IV project the text / image embeddings of past scenes and
    W_OT / W_OV those of the current (candidate) scene.
    """

    def __init__(self, d: int, cfg: Optional[SelectorConfig] = None, rng: Optional[np.random.Generator] = None) -> None:
        if d < 2 or d % 2 != 0:
            raise DimensionError("SelectionHead", "an even embedding size", d)
        self.cfg = cfg or SelectorConfig()
        self.d = d
        rng = rng if rng is not None else np.random.default_rng(self.cfg.seed)
        half = d // 2
        bias = self.cfg.use_bias
        self.W_IT = Linear(d, half, rng, bias=bias, init_scale=PROJECTION_INIT_SCALE, name="W_IT")  # pylint: disable=invalid-name
        self.W_IV = Linear(d, half, rng, bias=bias, init_scale=PROJECTION_INIT_SCALE, name="W_IV")  # pylint: disable=invalid-name
        self.W_OT = Linear(d, half, rng, bias=bias, init_scale=PROJECTION_INIT_SCALE, name="W_OT")  # pylint: disable=invalid-name
        self.W_OV = Linear(d, half, rng, bias=bias, init_scale=PROJECTION_INIT_SCALE, name="W_OV")  # pylint: disable=invalid-name
        self.trained = False

    def _pair(self, role: str) -> tuple:
        if role == "past":
            return self.W_IT, self.W_IV
        if role == "current":
            return self.W_OT, self.W_OV
        raise DomainError("project", f"role must be one of {', '.join(ROLES)}, got '{role}'")

    def prepare(self, vectors: np.ndarray) -> np.ndarray:
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.shape[-1] != self.d:
            raise DimensionError("project", f"(..., {self.d})", vectors.shape)
        if self.cfg.normalize_before_projection:
            return l2_normalize(vectors).astype(np.float32)
        return vectors

    def project_batch(self, text: Any, image: Any, role: str) -> Tensor:
        """Projected scene vectors for rows of (already prepared) embeddings."""
        text_proj, image_proj = self._pair(role)
        return concat([text_proj(as_tensor(text)), image_proj(as_tensor(image))], axis=-1)

    def project_past_sum(self, text_sum: np.ndarray, image_sum: np.ndarray, counts: np.ndarray) -> Tensor:
        """Sum of the projected past scenes, from summed prepared embeddings.

        Projection is affine, so summing before projecting only needs the
        bias counted once per past scene.
        """
        parts = []
        counts = as_tensor(np.asarray(counts, dtype=np.float32).reshape(-1, 1))
        for layer, summed in ((self.W_IT, text_sum), (self.W_IV, image_sum)):
            out = as_tensor(summed) @ layer.weight
            if layer.bias is not None:
                out = out + counts * layer.bias
            parts.append(out)
        return concat(parts, axis=-1)

    def project(self, emb: SceneEmbedding, role: str) -> ProjectedScene:
        text = self.prepare(np.asarray(emb.text_vec)[None])
        image = self.prepare(np.asarray(emb.image_vec)[None])
        vec = self.project_batch(text, image, role).numpy()[0].copy()
        return ProjectedScene(vec=vec, role=role)


def save_head(head: SelectionHead, path: PathLike) -> Path:
    meta: Dict[str, Any] = {
        "kind": CHECKPOINT_KIND,
        "config": to_dict(head.cfg),
        "d": head.d,
        "trained": head.trained,
        "parameter_count": head.parameter_count(),
    }
    return save_checkpoint(path, head.state_dict(), meta)


def load_head(path: PathLike) -> SelectionHead:
    state, meta = load_checkpoint(path)
    if meta.get("kind") != CHECKPOINT_KIND:
        raise CheckpointFormatError(path, f"expected a {CHECKPOINT_KIND} checkpoint, got '{meta.get('kind')}'")
    cfg = config_from_dict(SelectorConfig, meta.get("config", {}), "selector")
    head = SelectionHead(int(meta["d"]), cfg)
    head.load_state_dict(state)
    head.trained = bool(meta.get("trained", False))
    logger.debug("Loaded selection head (d=%d, trained=%s) from %s", head.d, head.trained, path)
    return head


__all__ = ["ROLES", "ProjectedScene", "SelectionHead", "save_head", "load_head"]
