from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .models import ModelBundle
from .trace import CandidateRecord, GenerationTrace, StepTrace
from ..captioner import contextualize
from ..config.config_loader import config_from_dict
from ..config.config_schema import PerformanceConfig, PipelineConfig, to_dict
from ..diffuser.sampling import GenerationRequest, Latent, candidate_latents, generate_many
from ..embedder.model import SceneEmbedding, similarity
from ..exceptions import DomainError, TraceFormatError
from ..execution import run_ordered
from ..logger import get_logger
from ..nn import Tensor, l2_normalize, softmax
from ..selector.selection import CandidateScene, rank
from ..synthio.corpus import Corpus, Task

logger = get_logger()

SELECTING_MODES = ("cosed", "previous")


@dataclass
class StepOutcome:
    image: np.ndarray
    entry: StepTrace
    latents: List[Latent]
    embedding: SceneEmbedding


@dataclass
class SynthesisResult:
    task_id: str
    images: List[np.ndarray]
    trace: GenerationTrace

    @property
    def captions(self) -> List[str]:
        return [entry.caption for entry in self.trace.steps]


@dataclass
class ReplayReport:
    trace: GenerationTrace
    mismatched_steps: List[int] = field(default_factory=list)

    @property
    def matches(self) -> bool:
        return not self.mismatched_steps


def candidate_seed(seed: int, task_index: int, step: int, candidate: int) -> Tuple[int, ...]:
    return (seed, task_index, step, candidate)


def caption_condition(models: ModelBundle, caption: str) -> np.ndarray:
    return l2_normalize(models.embedder.encode_text(caption)[None])[0].astype(np.float32)


def _generate(
    models: ModelBundle,
    requests: Sequence[GenerationRequest],
    record_w: int,
    step: int,
    performance: Optional[PerformanceConfig],
) -> List[Tuple[np.ndarray, List[Latent]]]:
    if performance is not None and performance.parallel_candidates and len(requests) > 1:
        jobs = {
            f"step{step}-candidate{j}": partial(generate_many, models.diffuser, [request], record_w, step)
            for j, request in enumerate(requests)
        }
        return [out[0] for out in run_ordered(jobs, True, performance.max_workers)]
    return generate_many(models.diffuser, requests, record_w, step)


def _record_window(cfg: PipelineConfig, T: int) -> int:  # pylint: disable=invalid-name
    if cfg.mode == "fixed":
        if cfg.fixed_position >= T:
            raise DomainError("synthesize", f"fixed latent position {cfg.fixed_position} must be below T={T}")
        return max(cfg.w, cfg.fixed_position)
    return cfg.w


def synthesize_first(
    task: Task,
    B: int,  # pylint: disable=invalid-name
    models: ModelBundle,
    cfg: Optional[PipelineConfig] = None,
    record_w: Optional[int] = None,
    performance: Optional[PerformanceConfig] = None,
) -> StepOutcome:
    """Generate B candidates for the first caption from Gaussian noise and keep
    the one the first-image strategy picks (text-image similarity by default)."""
    cfg = cfg or PipelineConfig()
    if B < 1:
        raise DomainError("synthesize_first", f"B must be at least 1, got {B}")
    if cfg.first_image_strategy == "single":
        B = 1
    record_w = cfg.w if record_w is None else record_w
    step = task.steps[0]
    caption = contextualize(step.raw_text, [])
    condition = caption_condition(models, caption)
    seeds = [candidate_seed(cfg.seed, task.index, 1, j) for j in range(B)]
    outputs = _generate(
        models, [GenerationRequest(condition, None, seed) for seed in seeds], record_w, 1, performance
    )

    images = np.stack([image for image, _ in outputs])
    text_vec = models.embedder.encode_text(caption)
    image_vecs = models.embedder.encode_images(images)
    scores = np.array([similarity(text_vec, vec) for vec in image_vecs])
    if cfg.first_image_strategy == "random":
        index = int(np.random.default_rng([cfg.seed, task.index, 1]).integers(B))
        probs = np.full(B, 1.0 / B)
    else:
        index = int(np.argmax(scores))
        probs = softmax(Tensor(scores, dtype=np.float64)).numpy()

    T = models.diffuser.T  # pylint: disable=invalid-name
    entry = StepTrace(
        step=1,
        raw_text=step.raw_text,
        caption=caption,
        candidates=[
            CandidateRecord(0, T, float(s), float(p), list(seed)) for s, p, seed in zip(scores, probs, seeds)
        ],
        chosen_index=index,
    )
    logger.trace("First image of %s: candidate %d of %d (similarity %.3f)", task.id, index, B, scores[index])
    return StepOutcome(
        image=outputs[index][0],
        entry=entry,
        latents=outputs[index][1],
        embedding=SceneEmbedding(text_vec, image_vecs[index]),
    )


def _step_latents(cfg: PipelineConfig, records: Dict[int, List[Latent]], n: int) -> List[Optional[Latent]]:
    if cfg.mode == "cosed":
        return list(candidate_latents(records, n, cfg.w))
    if cfg.mode == "previous":
        return list(candidate_latents({1: records[n - 1]}, 2, cfg.w))
    if cfg.mode == "fixed":
        recorded = records[n - 1]
        return [recorded[min(cfg.fixed_position, len(recorded) - 1)]]
    return [None]


def synthesize_task(
    task: Task,
    models: ModelBundle,
    cfg: Optional[PipelineConfig] = None,
    performance: Optional[PerformanceConfig] = None,
) -> SynthesisResult:
    """Generate one image per step of ``task``.

    From step 2 on, every candidate is generated from a recorded latent of a
    previously chosen scene and scored against all chosen scenes so far.
    """
    cfg = cfg or PipelineConfig()
    selecting = cfg.mode in SELECTING_MODES
    models.check_ready(need_head=selecting)
    T = models.diffuser.T  # pylint: disable=invalid-name
    record_w = _record_window(cfg, T)

    first = synthesize_first(task, cfg.B, models, cfg, record_w, performance)
    images = [first.image]
    history = [first.embedding]
    records: Dict[int, List[Latent]] = {1: first.latents}
    raw_history = [task.steps[0].raw_text]
    trace = GenerationTrace(
        task_id=task.id,
        task_index=task.index,
        mode=cfg.mode,
        w=cfg.w,
        B=1 if cfg.first_image_strategy == "single" else cfg.B,
        T=T,
        seed=cfg.seed,
        config={
            "pipeline": to_dict(cfg),
            "diffuser": to_dict(models.diffuser.cfg),
            "selector": to_dict(models.head.cfg) if models.head is not None else None,
        },
        steps=[first.entry],
    )

    for step in task.steps[1:]:
        n = step.index
        caption = contextualize(step.raw_text, raw_history)
        condition = caption_condition(models, caption)
        latents = _step_latents(cfg, records, n)
        seeds = [candidate_seed(cfg.seed, task.index, n, j) for j in range(len(latents))]
        requests = [GenerationRequest(condition, latent, seed) for latent, seed in zip(latents, seeds)]
        outputs = _generate(models, requests, record_w, n, performance)
        embeddings = models.embedder.embed_many([caption] * len(outputs), np.stack([image for image, _ in outputs]))
        sources = [(0, T) if latent is None else latent.tag for latent in latents]

        if selecting:
            candidates = [
                CandidateScene(caption, image, source[0], source[1], embedding)
                for (image, _), source, embedding in zip(outputs, sources, embeddings)
            ]
            index, probs, scores = rank(candidates, history, models.head)  # type: ignore[arg-type]
        else:
            index, probs, scores = 0, np.ones(1), np.zeros(1)

        trace.steps.append(
            StepTrace(
                step=n,
                raw_text=step.raw_text,
                caption=caption,
                candidates=[
                    CandidateRecord(source[0], source[1], float(s), float(p), list(seed))
                    for source, s, p, seed in zip(sources, scores, probs, seeds)
                ],
                chosen_index=index,
            )
        )
        images.append(outputs[index][0])
        history.append(embeddings[index])
        records[n] = outputs[index][1]
        raw_history.append(step.raw_text)
        logger.trace("Step %d of %s: chose %s among %d candidates", n, task.id, sources[index], len(latents))

    trace.validate()
    logger.debug("Synthesized %s (%d steps, mode %s)", task.id, len(images), cfg.mode)
    return SynthesisResult(task_id=task.id, images=images, trace=trace)


def synthesize_corpus(
    corpus: Corpus,
    models: ModelBundle,
    cfg: Optional[PipelineConfig] = None,
    performance: Optional[PerformanceConfig] = None,
) -> List[SynthesisResult]:
    performance = performance or PerformanceConfig()
    jobs = {task.id: partial(synthesize_task, task, models, cfg, performance) for task in corpus}
    return run_ordered(
        jobs,
        performance.parallel_tasks,
        performance.max_workers,
        performance.show_progress,
        "Synthesizing",
    )


def replay_trace(
    trace: GenerationTrace,
    task: Task,
    models: ModelBundle,
    performance: Optional[PerformanceConfig] = None,
) -> ReplayReport:
    """Re-run synthesis with the trace's configuration and seeds and compare the
    chosen candidates step by step."""
    if trace.task_id != task.id:
        raise TraceFormatError(f"trace belongs to {trace.task_id}, not {task.id}")
    if trace.T != models.diffuser.T:
        raise TraceFormatError(f"trace was recorded with T={trace.T}, the diffuser has T={models.diffuser.T}")
    cfg = config_from_dict(PipelineConfig, trace.config.get("pipeline") or {}, "pipeline")
    seeding = trace.config.get("diffuser") or {}
    models = models.with_seeding(seeding.get("resume_at_source_iter"), seeding.get("seed_noise_mix"))
    replayed = synthesize_task(task, models, cfg, performance).trace
    mismatched = [
        entry.step
        for entry, again in zip(trace.steps, replayed.steps)
        if entry.chosen_index != again.chosen_index or entry.chosen.tag != again.chosen.tag
    ]
    if len(trace.steps) != len(replayed.steps):
        mismatched.append(min(len(trace.steps), len(replayed.steps)) + 1)
    if mismatched:
        logger.warning("Replay of %s diverged at steps %s", task.id, mismatched)
    return ReplayReport(trace=replayed, mismatched_steps=mismatched)


__all__ = [
    "StepOutcome",
    "SynthesisResult",
    "ReplayReport",
    "candidate_seed",
    "caption_condition",
    "synthesize_first",
    "synthesize_task",
    "synthesize_corpus",
    "replay_trace",
]
