from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .model import DiffuserModel, to_image_space
from ..exceptions import DimensionError, DomainError, StateError
from ..logger import get_logger
from ..nn import no_grad

logger = get_logger()


@dataclass(frozen=True, eq=False)
class Latent:
    """Partially denoised tensor z_t recorded while generating step ``source_step``."""

    source_step: int
    iteration: int
    tensor: np.ndarray

    @property
    def tag(self) -> Tuple[int, int]:
        return self.source_step, self.iteration


InitLike = Union[Latent, np.ndarray, None]


@dataclass(frozen=True)
class GenerationRequest:
    condition: Optional[np.ndarray]
    init: InitLike = None
    rng_seed: Tuple[int, ...] = (0,)


def _check_record_window(model: DiffuserModel, record_w: int) -> None:
    if not 0 <= record_w < model.T:
        raise DomainError("generate", f"record_w must lie in 0..{model.T - 1}, got {record_w}")


def _initial_state(
    model: DiffuserModel, init: InitLike, rng: np.random.Generator
) -> Tuple[np.ndarray, int]:
    """z at the first visited iteration and that iteration."""
    start = model.T
    if init is None:
        return rng.standard_normal(model.latent_shape).astype(np.float32), start

    seed = init.tensor if isinstance(init, Latent) else np.asarray(init)
    if seed.shape != model.latent_shape:
        raise DimensionError("generate", model.latent_shape, seed.shape)
    if isinstance(init, Latent) and model.cfg.resume_at_source_iter:
        start = init.iteration
    z = seed.astype(np.float32, copy=True)
    mix = model.cfg.seed_noise_mix
    if mix > 0.0:
        fresh = rng.standard_normal(model.latent_shape)
        z = (np.sqrt(1.0 - mix) * z + np.sqrt(mix) * fresh).astype(np.float32)
    return z, start


def _guided_noise(model: DiffuserModel, z: np.ndarray, t: int, conditions: np.ndarray, guided: np.ndarray) -> np.ndarray:
    n = z.shape[0]
    steps = np.full(2 * n, t)
    both = np.concatenate([z, z], axis=0)
    conds = np.concatenate([conditions, model.unconditional(n)], axis=0)
    eps = model.predict_noise(both, steps, conds).numpy().reshape(both.shape)
    conditional, unconditional = eps[:n], eps[n:]
    scale = np.where(guided, model.cfg.guidance_scale, 0.0).reshape((-1,) + (1,) * (z.ndim - 1))
    return unconditional + scale * (conditional - unconditional)


def _denoise(
    model: DiffuserModel, request: GenerationRequest, record_w: int, source_step: int
) -> Tuple[np.ndarray, List[Latent]]:
    schedule = model.schedule
    rng = np.random.default_rng(list(request.rng_seed))
    z, start = _initial_state(model, request.init, rng)
    guided = request.condition is not None
    if guided:
        condition = np.asarray(request.condition, dtype=np.float32).reshape(-1)
        if condition.shape != (model.cond_dim,):
            raise DimensionError("generate", f"condition of size {model.cond_dim}", condition.shape)
    else:
        condition = model.unconditional(1)[0]

    recorded: List[Latent] = []
    z = z[None]
    for t in range(start, 0, -1):
        if start - t <= record_w:
            recorded.append(Latent(source_step, t, z[0].copy()))
        eps = _guided_noise(model, z, t, condition[None], np.array([guided]))
        alpha = 1.0 - schedule.beta(t)
        coef = schedule.beta(t) / np.sqrt(1.0 - schedule.alpha_bar(t))
        mean = (z - coef * eps) / np.sqrt(alpha)
        if t > 1:
            sigma = np.sqrt(schedule.posterior_variance(t))
            mean = mean + sigma * rng.standard_normal(model.latent_shape)[None]
        z = mean.astype(np.float32)
    return to_image_space(z[0]), recorded


def generate_many(
    model: DiffuserModel,
    requests: Sequence[GenerationRequest],
    record_w: int,
    source_step: int = 0,
) -> List[Tuple[np.ndarray, List[Latent]]]:
    """Run the ancestral reverse process for every request.

    Each request draws its noise from its own stream ``default_rng(rng_seed)``
    and gets its own forward passes, so its result is bit-identical whether it
    runs alone, in a list or on a worker thread. The first ``record_w + 1``
    visited latents of every request are returned tagged with ``source_step``.
    """
    _check_record_window(model, record_w)
    with no_grad():
        results = [_denoise(model, request, record_w, source_step) for request in requests]
    logger.trace("Generated %d samples for step %d", len(requests), source_step)
    return results


def generate(
    model: DiffuserModel,
    condition: Optional[np.ndarray],
    init: InitLike = None,
    record_w: int = 0,
    rng_seed: Tuple[int, ...] = (0,),
    source_step: int = 0,
) -> Tuple[np.ndarray, List[Latent]]:
    """Generate one image, starting from ``init`` as z_T (Gaussian noise when None)."""
    request = GenerationRequest(condition=condition, init=init, rng_seed=tuple(rng_seed))
    return generate_many(model, [request], record_w, source_step)[0]


def candidate_latents(
    records: Union[Mapping[int, Sequence[Latent]], Sequence[Sequence[Latent]]],
    n: int,
    w: int,
) -> List[Latent]:
    """The first w+1 recorded latents of every step 1..n-1, ordered by
    (source step, iteration descending)."""
    if n < 2:
        return []
    by_step = records if isinstance(records, Mapping) else {i + 1: latents for i, latents in enumerate(records)}
    candidates: List[Latent] = []
    for step in range(1, n):
        latents = by_step.get(step)
        if latents is None:
            raise StateError(f"no latents recorded for step {step}")
        if len(latents) < w + 1:
            raise StateError(f"step {step} recorded {len(latents)} latents, window needs {w + 1}")
        window = sorted(latents[: w + 1], key=lambda latent: -latent.iteration)
        candidates.extend(window)
    return candidates


__all__ = ["Latent", "GenerationRequest", "generate", "generate_many", "candidate_latents"]
