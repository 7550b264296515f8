from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .schedule import NoiseSchedule
from ..config.config_loader import config_from_dict
from ..config.config_schema import DiffuserConfig, to_dict
from ..exceptions import CheckpointFormatError, DimensionError
from ..logger import get_logger
from ..nn import Linear, Module, Tensor, as_tensor, concat, load_checkpoint, save_checkpoint

logger = get_logger()

PathLike = Union[str, Path]

OUTPUT_INIT_SCALE = 0.01
CHECKPOINT_KIND = "diffuser"


def timestep_embedding(t: np.ndarray, dim: int) -> np.ndarray:
    """Sinusoidal embedding of integer iterations, shape (n, dim)."""
    t = np.asarray(t, dtype=np.float64).reshape(-1, 1)
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half, 1))
    angles = t * freqs[None, :]
    return np.concatenate([np.sin(angles), np.cos(angles)], axis=1).astype(np.float32)


def to_model_space(images: np.ndarray) -> np.ndarray:
    return np.asarray(images, dtype=np.float32) * 2.0 - 1.0


def to_image_space(latents: np.ndarray) -> np.ndarray:
    return np.clip((np.asarray(latents, dtype=np.float32) + 1.0) * 0.5, 0.0, 1.0)


class Denoiser(Module):
    """Noise predictor: the flattened latent, time embedding and condition are
    concatenated at the input, and (time, condition) also scale and shift the
    hidden layer."""

    def __init__(self, latent_dim: int, cond_dim: int, cfg: DiffuserConfig, rng: np.random.Generator) -> None:
        self.latent_dim = latent_dim
        self.cond_dim = cond_dim
        self.time_dim = cfg.time_dim
        context = cfg.time_dim + cond_dim
        self.input = Linear(latent_dim + context, cfg.hidden, rng, name="input")
        self.film = Linear(context, 2 * cfg.hidden, rng, init_scale=0.1, name="film")
        self.hidden = Linear(cfg.hidden, cfg.hidden, rng, name="hidden")
        self.output = Linear(cfg.hidden, latent_dim, rng, init_scale=OUTPUT_INIT_SCALE, name="output")

    def __call__(self, z: np.ndarray, t: np.ndarray, cond: np.ndarray) -> Tensor:
        z = as_tensor(z)
        if z.ndim != 2 or z.shape[1] != self.latent_dim:
            raise DimensionError("denoiser", f"(n, {self.latent_dim})", z.shape)
        cond = np.asarray(cond, dtype=np.float32)
        if cond.shape != (z.shape[0], self.cond_dim):
            raise DimensionError("denoiser", (z.shape[0], self.cond_dim), cond.shape)
        context = Tensor(np.concatenate([timestep_embedding(t, self.time_dim), cond], axis=1))
        hidden_size = self.hidden.out_features

        h = self.input(concat([z, context], axis=1)).silu()
        modulation = self.film(context)
        scale = modulation[:, :hidden_size]
        shift = modulation[:, hidden_size:]
        h = (self.hidden(h) * (scale + 1.0) + shift).silu()
        return self.output(h)


class DiffuserModel:
    """Denoiser plus its schedule and image geometry."""

    def __init__(self, cfg: Optional[DiffuserConfig] = None, image_size: int = 16, cond_dim: int = 64) -> None:
        self.cfg = cfg or DiffuserConfig()
        self.image_size = image_size
        self.cond_dim = cond_dim
        self.schedule = NoiseSchedule.from_config(self.cfg)
        self.denoiser = Denoiser(self.latent_dim, cond_dim, self.cfg, np.random.default_rng(self.cfg.seed))
        self.trained = False

    @property
    def latent_shape(self) -> tuple:
        return (self.image_size, self.image_size, 3)

    @property
    def latent_dim(self) -> int:
        return self.image_size * self.image_size * 3

    @property
    def T(self) -> int:  # pylint: disable=invalid-name
        return self.schedule.T

    def parameters(self) -> list:
        return self.denoiser.parameters()

    def unconditional(self, n: int = 1) -> np.ndarray:
        return np.zeros((n, self.cond_dim), dtype=np.float32)

    def predict_noise(self, z: np.ndarray, t: np.ndarray, cond: np.ndarray) -> Tensor:
        z = np.asarray(z, dtype=np.float32)
        return self.denoiser(z.reshape(z.shape[0], -1), t, cond)


def save_diffuser(model: DiffuserModel, path: PathLike) -> Path:
    meta: Dict[str, Any] = {
        "kind": CHECKPOINT_KIND,
        "config": to_dict(model.cfg),
        "image_size": model.image_size,
        "cond_dim": model.cond_dim,
        "trained": model.trained,
    }
    return save_checkpoint(path, model.denoiser.state_dict(), meta)


def load_diffuser(path: PathLike) -> DiffuserModel:
    state, meta = load_checkpoint(path)
    if meta.get("kind") != CHECKPOINT_KIND:
        raise CheckpointFormatError(path, f"expected a {CHECKPOINT_KIND} checkpoint, got '{meta.get('kind')}'")
    cfg = config_from_dict(DiffuserConfig, meta.get("config", {}), "diffuser")
    model = DiffuserModel(cfg, int(meta.get("image_size", 16)), int(meta.get("cond_dim", 64)))
    model.denoiser.load_state_dict(state)
    model.trained = bool(meta.get("trained", False))
    logger.debug("Loaded diffuser (T=%d, trained=%s) from %s", model.T, model.trained, path)
    return model


__all__ = [
    "Denoiser",
    "DiffuserModel",
    "timestep_embedding",
    "to_model_space",
    "to_image_space",
    "save_diffuser",
    "load_diffuser",
]
