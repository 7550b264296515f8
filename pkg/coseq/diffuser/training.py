from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from .model import DiffuserModel, to_model_space
from .schedule import forward_noise_batch
from ..captioner import contextualize
from ..config.config_schema import DiffuserConfig
from ..embedder import Embedder
from ..exceptions import ConfigurationError, DependencyError
from ..logger import get_logger
from ..nn import Tensor, adam_step, l2_normalize, mse
from ..synthio.corpus import Corpus, Step

logger = get_logger()

Captioner = Callable[[str, Sequence[Step]], str]


@dataclass
class DiffuserTrainingResult:
    model: DiffuserModel
    initial_loss: float
    epoch_losses: List[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else self.initial_loss


def caption_conditions(corpus: Corpus, embedder: Embedder, captioner: Captioner = contextualize) -> np.ndarray:
    """Unit-norm text embedding of the contextualized caption of every step."""
    captions = [captioner(step.raw_text, task.steps[: step.index - 1]) for task, step in corpus.steps()]
    return l2_normalize(embedder.encode_texts(captions)).astype(np.float32)


def diffusion_loss(
    model: DiffuserModel,
    x0: np.ndarray,
    conditions: np.ndarray,
    rng: np.random.Generator,
) -> Tensor:
    """Noise-prediction MSE at uniformly drawn iterations, with condition dropout."""
    n = x0.shape[0]
    t = rng.integers(1, model.T + 1, size=n)
    eps = rng.standard_normal(x0.shape).astype(np.float32)
    keep = rng.random(n) >= model.cfg.cond_dropout
    conds = np.where(keep[:, None], conditions, 0.0).astype(np.float32)
    z = forward_noise_batch(model.schedule, x0, t, eps)
    prediction = model.predict_noise(z, t, conds)
    return mse(prediction, eps.reshape(n, -1))


def train_diffuser(
    corpus: Corpus,
    embedder: Optional[Embedder],
    cfg: Optional[DiffuserConfig] = None,
    captioner: Captioner = contextualize,
    conditional: bool = True,
    show_progress: bool = False,
) -> DiffuserTrainingResult:
    """Train the denoiser on the corpus ground-truth scenes.

    With ``conditional=False`` every condition is the null vector, which trains
    a plain unconditional model and needs no embedder.
    """
    cfg = cfg or DiffuserConfig()
    if conditional and (embedder is None or not embedder.trained):
        raise DependencyError("embedder", "train the embedder before the diffuser")
    scenes = [step.gt_scene for _, step in corpus.steps()]
    if not scenes:
        raise ConfigurationError("cannot train the diffuser on an empty corpus")
    x0 = to_model_space(np.stack(scenes))
    cond_dim = embedder.d if embedder is not None else 64
    if conditional:
        assert embedder is not None
        conditions = caption_conditions(corpus, embedder, captioner)
    else:
        conditions = np.zeros((len(scenes), cond_dim), dtype=np.float32)

    model = DiffuserModel(cfg, image_size=x0.shape[1], cond_dim=cond_dim)
    params = model.parameters()
    rng = np.random.default_rng(cfg.seed)
    batch_size = min(cfg.optim.batch_size, len(scenes))
    logger.debug(
        "Training diffuser on %d scenes (T=%d, %d parameters, batch=%d)",
        len(scenes), cfg.T, model.denoiser.parameter_count(), batch_size,
    )

    first = np.arange(batch_size)
    initial_loss = diffusion_loss(model, x0[first], conditions[first], np.random.default_rng(cfg.seed + 1)).item()
    model.denoiser.zero_grad()
    result = DiffuserTrainingResult(model=model, initial_loss=initial_loss)
    logger.debug("Initial noise-prediction loss %.4f", initial_loss)

    for epoch in tqdm(range(cfg.optim.epochs), desc="Diffuser", unit="epoch", disable=not show_progress):
        order = rng.permutation(len(scenes))
        losses = []
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            loss = diffusion_loss(model, x0[batch], conditions[batch], rng)
            loss.backward()
            adam_step(params, cfg.optim)
            losses.append(loss.item())
        result.epoch_losses.append(float(np.mean(losses)))
        logger.trace("Diffuser epoch %d loss %.4f", epoch + 1, result.epoch_losses[-1])

    model.trained = True
    logger.success("Diffuser trained: final loss %.4f", result.final_loss)
    return result


__all__ = ["DiffuserTrainingResult", "caption_conditions", "diffusion_loss", "train_diffuser"]
