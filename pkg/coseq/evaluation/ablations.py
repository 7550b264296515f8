from dataclasses import replace
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .metrics import eval_tv, eval_vv
from ..config.config_schema import EvaluationConfig, PerformanceConfig, PipelineConfig, SelectorConfig
from ..embedder.model import Embedder
from ..exceptions import DomainError
from ..execution import run_ordered
from ..logger import get_logger
from ..pipeline.models import ModelBundle
from ..pipeline.synthesis import SynthesisResult, synthesize_corpus
from ..selector.training import train_selector
from ..synthio.corpus import Corpus

logger = get_logger()

MODE_ORDER: Tuple[str, ...] = ("cosed", "previous", "independent")


def evaluation_subset(corpus: Corpus, size: int) -> Corpus:
    """The first ``size`` tasks, so every sweep row sees the same tasks."""
    return Corpus(list(corpus.tasks[:size]), corpus.config)


def score_result(result: SynthesisResult, embedder: Embedder, all_pairs: bool = False) -> Tuple[float, float]:
    return eval_tv(result.images, result.captions, embedder), eval_vv(result.images, embedder, all_pairs)


def score_results(
    results: Sequence[SynthesisResult],
    embedder: Embedder,
    all_pairs: bool = False,
    performance: Optional[PerformanceConfig] = None,
) -> Tuple[float, float]:
    """Mean (T->V, V->V) over tasks."""
    performance = performance or PerformanceConfig()
    jobs = {result.task_id: partial(score_result, result, embedder, all_pairs) for result in results}
    scores = run_ordered(jobs, performance.parallel_tasks, performance.max_workers)
    if not scores:
        raise DomainError("evaluate", "no synthesized tasks to score")
    tv = sum(s[0] for s in scores) / len(scores)
    vv = sum(s[1] for s in scores) / len(scores)
    return tv, vv


def evaluate_modes(
    corpus: Corpus,
    models: ModelBundle,
    modes: Sequence[str] = MODE_ORDER,
    pipeline_cfg: Optional[PipelineConfig] = None,
    eval_cfg: Optional[EvaluationConfig] = None,
    performance: Optional[PerformanceConfig] = None,
) -> Tuple[pd.DataFrame, Dict[str, List[SynthesisResult]]]:
    """T->V and V->V of every synthesis mode side by side on the same subset."""
    pipeline_cfg = pipeline_cfg or PipelineConfig()
    eval_cfg = eval_cfg or EvaluationConfig()
    subset = evaluation_subset(corpus, eval_cfg.subset_size)
    rows = []
    results: Dict[str, List[SynthesisResult]] = {}
    for mode in modes:
        results[mode] = synthesize_corpus(subset, models, replace(pipeline_cfg, mode=mode), performance)
        tv, vv = score_results(results[mode], models.embedder, eval_cfg.all_pairs_vv, performance)
        rows.append({"mode": mode, "eval_tv": tv, "eval_vv": vv, "n_tasks": len(subset)})
        logger.debug("Mode %s: T->V %.2f, V->V %.2f", mode, tv, vv)
    return pd.DataFrame(rows, columns=["mode", "eval_tv", "eval_vv", "n_tasks"]), results


def ablate_latents(
    corpus: Corpus,
    positions: Sequence[int],
    models: ModelBundle,
    pipeline_cfg: Optional[PipelineConfig] = None,
    eval_cfg: Optional[EvaluationConfig] = None,
    performance: Optional[PerformanceConfig] = None,
    include_cosed: bool = True,
) -> pd.DataFrame:
    """One row per fixed seeding position (step n always seeded from the latent
    ``position`` iterations into step n-1's denoising, no selection), plus a
    row for full selection unless ``include_cosed`` is off."""
    pipeline_cfg = pipeline_cfg or PipelineConfig()
    eval_cfg = eval_cfg or EvaluationConfig()
    T = models.diffuser.T  # pylint: disable=invalid-name
    bad = [p for p in positions if not 0 <= p < T]
    if bad:
        raise DomainError("ablate_latents", f"positions {bad} are outside 0..{T - 1}")
    subset = evaluation_subset(corpus, eval_cfg.subset_size)

    settings = [(f"fixed@{p}", replace(pipeline_cfg, mode="fixed", fixed_position=int(p)), p) for p in positions]
    if include_cosed:
        settings.append(("cosed", replace(pipeline_cfg, mode="cosed"), None))
    rows = []
    for name, cfg, position in settings:
        results = synthesize_corpus(subset, models, cfg, performance)
        tv, vv = score_results(results, models.embedder, eval_cfg.all_pairs_vv, performance)
        rows.append(
            {
                "setting": name,
                "position": position,
                "iteration": None if position is None else T - position,
                "eval_tv": tv,
                "eval_vv": vv,
            }
        )
        logger.debug("Latent sweep %s: T->V %.2f, V->V %.2f", name, tv, vv)
    return pd.DataFrame(rows, columns=["setting", "position", "iteration", "eval_tv", "eval_vv"])


def modality_ablation(
    corpus: Corpus,
    embedder: Embedder,
    cfg: Optional[SelectorConfig] = None,
    held_out: Optional[Corpus] = None,
    include_static_text: bool = False,
    show_progress: bool = False,
) -> pd.DataFrame:
    """Held-out selection accuracy of selectors trained with the text signal,
    or both signals, destroyed."""
    cfg = cfg or SelectorConfig()
    variants = ["standard", "text_shuffled", "both_shuffled"]
    if include_static_text:
        variants.append("static_text")
    rows = []
    for variant in variants:
        result = train_selector(corpus, embedder, cfg, held_out=held_out, variant=variant, show_progress=show_progress)
        rows.append(
            {
                "variant": variant,
                "held_out_accuracy": result.held_out_accuracy,
                "untrained_accuracy": result.initial_accuracy,
                "chance": 1.0 / cfg.M,
                "final_loss": result.final_loss,
            }
        )
    return pd.DataFrame(rows, columns=["variant", "held_out_accuracy", "untrained_accuracy", "chance", "final_loss"])


__all__ = [
    "MODE_ORDER",
    "evaluation_subset",
    "score_result",
    "score_results",
    "evaluate_modes",
    "ablate_latents",
    "modality_ablation",
]
