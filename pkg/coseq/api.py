import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from . import __version__
from .captioner import contextualize_task
from .config import CoseqConfig, get_config, to_dict
from .constants import RUN_SNAPSHOT_NAME, TRACE_FILE_NAME
from .diffuser import DiffuserTrainingResult, load_diffuser, save_diffuser, train_diffuser
from .embedder import EmbedderTrainingResult, load_embedder, save_embedder, train_embedder
from .evaluation import (
    ChartSpec,
    NonlinearityReport,
    UsageHistograms,
    ablate_latents,
    evaluate_modes,
    modality_ablation,
    nonlinearity_score,
    report,
    usage_histograms,
    usage_rows,
)
from .evaluation.ablations import MODE_ORDER
from .exceptions import StateError
from .logger import get_logger
from .pipeline import (
    GenerationTrace,
    ModelBundle,
    SynthesisResult,
    emit_sequence,
    load_trace,
    save_trace,
    synthesize_task,
)
from .selector import SelectorTrainingResult, load_head, save_head, train_selector
from .synthio import Corpus, generate_corpus, load_corpus, save_corpus, split_corpus

logger = get_logger()

PathLike = Union[str, Path]

TRACES_DIR = "traces"


@dataclass
class EvaluationOutputs:
    run_dir: Path
    modes: pd.DataFrame
    usage: UsageHistograms
    nonlinearity: NonlinearityReport
    files: List[Path]


class API:
    """Corpus, training, synthesis and evaluation workflows over files on disk."""

    def __init__(self, config: Optional[CoseqConfig] = None) -> None:
        logger.trace("Initializing API")
        self.config = config or get_config()
        logger.trace("API initialized with config: %s", self.config)

    def start_run(self, name: str, command: str, arguments: Optional[Mapping[str, Any]] = None) -> Path:
        """Create ``<run_dir>/<name>`` and snapshot the command, its arguments and the config."""
        run_dir = Path(self.config.run_dir) / name
        run_dir.mkdir(parents=True, exist_ok=True)
        snapshot = {
            "command": command,
            "arguments": {key: _jsonable(value) for key, value in (arguments or {}).items()},
            "config": to_dict(self.config),
            "version": __version__,
        }
        (run_dir / RUN_SNAPSHOT_NAME).write_text(json.dumps(snapshot, indent=2, sort_keys=True), encoding="utf-8")
        logger.debug("Started run '%s' in %s", command, run_dir)
        return run_dir

    def generate_corpus(self, out_dir: PathLike, n_tasks: Optional[int] = None, seed: Optional[int] = None) -> Corpus:
        cfg = self.config.corpus
        if n_tasks is not None:
            cfg = replace(cfg, n_tasks=int(n_tasks))
        if seed is not None:
            cfg = replace(cfg, rng_seed=int(seed))
        corpus = generate_corpus(cfg, self.config.performance)
        save_corpus(corpus, out_dir)
        return corpus

    def load_corpus(self, corpus_dir: PathLike) -> Corpus:
        corpus = load_corpus(corpus_dir)
        logger.debug("Loaded corpus of %d tasks from %s", len(corpus), corpus_dir)
        return corpus

    def split(self, corpus: Corpus) -> Tuple[Corpus, Corpus]:
        """The train / held-out split every workflow shares."""
        return split_corpus(corpus, self.config.selector.train_frac, self.config.selector.seed)

    def train_embedder(self, corpus_dir: PathLike, out: PathLike) -> EmbedderTrainingResult:
        train, held_out = self.split(self.load_corpus(corpus_dir))
        result = train_embedder(train, self.config.embedder, held_out, self.config.performance.show_progress)
        save_embedder(result.model, out)
        return result

    def train_diffuser(
        self, corpus_dir: PathLike, embedder_path: Optional[PathLike], out: PathLike, unconditional: bool = False
    ) -> DiffuserTrainingResult:
        train, _ = self.split(self.load_corpus(corpus_dir))
        embedder = load_embedder(embedder_path) if embedder_path else None
        result = train_diffuser(
            train,
            embedder,
            self.config.diffuser,
            conditional=not unconditional,
            show_progress=self.config.performance.show_progress,
        )
        save_diffuser(result.model, out)
        return result

    def train_selector(
        self,
        corpus_dir: PathLike,
        embedder_path: PathLike,
        out: PathLike,
        M: Optional[int] = None,  # pylint: disable=invalid-name
        variant: str = "standard",
    ) -> SelectorTrainingResult:
        train, held_out = self.split(self.load_corpus(corpus_dir))
        cfg = self.config.selector if M is None else replace(self.config.selector, M=int(M))
        result = train_selector(
            train,
            load_embedder(embedder_path),
            cfg,
            held_out=held_out,
            variant=variant,
            show_progress=self.config.performance.show_progress,
        )
        save_head(result.head, out)
        return result

    def load_models(
        self, embedder_path: PathLike, diffuser_path: PathLike, selector_path: Optional[PathLike] = None
    ) -> ModelBundle:
        head = load_head(selector_path) if selector_path else None
        return ModelBundle(load_embedder(embedder_path), load_diffuser(diffuser_path), head)

    def caption(self, corpus_dir: PathLike, task_id: str) -> List[Tuple[str, str]]:
        return contextualize_task(self.load_corpus(corpus_dir).task(str(task_id)).steps)

    def synthesize(
        self,
        corpus_dir: PathLike,
        task_id: str,
        models: ModelBundle,
        out_dir: PathLike,
        resume_at_source_iter: Optional[bool] = None,
        **overrides: Any,
    ) -> SynthesisResult:
        """Synthesize one task and emit its images, trace and sequence manifest.

        ``overrides`` replace fields of the pipeline config (w, B, mode, ...);
        ``resume_at_source_iter`` overrides the loaded diffuser's seeding.
        """
        cfg = replace(self.config.pipeline, **{k: v for k, v in overrides.items() if v is not None})
        task = self.load_corpus(corpus_dir).task(str(task_id))
        models = models.with_seeding(resume_at_source_iter)
        result = synthesize_task(task, models, cfg, self.config.performance)
        emit_sequence(result.images, result.trace, out_dir, cfg.crossfade_frames)
        return result

    def evaluate(
        self,
        corpus_dir: PathLike,
        models: ModelBundle,
        name: str = "evaluate",
        modes: Optional[Sequence[str]] = None,
    ) -> EvaluationOutputs:
        """Score every synthesis mode on the held-out split and write the
        tables, charts and the cosed generation traces under a run directory."""
        corpus = self.load_corpus(corpus_dir)
        _, held_out = self.split(corpus)
        run_dir = self.start_run(name, "evaluate", {"corpus": corpus_dir, "modes": modes})
        table, results = evaluate_modes(
            held_out,
            models,
            tuple(modes) if modes else MODE_ORDER,
            self.config.pipeline,
            self.config.evaluation,
            self.config.performance,
        )

        traces = [result.trace for result in results.get("cosed", [])]
        if not traces:
            raise StateError("evaluation needs the cosed mode for usage histograms")
        for trace in traces:
            save_trace(trace, run_dir / TRACES_DIR / f"{trace.task_id}.json")
        usage = usage_histograms(traces)
        nonlinearity = nonlinearity_score(traces, corpus, min_step=3)
        tables = {
            "modes": table,
            "usage": pd.DataFrame(usage_rows(usage), columns=["offset", "count", "mean", "share"]),
            "nonlinearity": _nonlinearity_table(nonlinearity),
        }
        charts = {
            "modes_chart": ChartSpec("modes", "scatter", "eval_tv", "eval_vv", label="mode", title="T->V vs V->V"),
            "usage_chart": ChartSpec("usage", "bar", "offset", "mean", title="Selected source offset"),
        }
        files = report(tables, run_dir, charts)
        return EvaluationOutputs(run_dir, table, usage, nonlinearity, files)

    def ablate_latents(
        self,
        corpus_dir: PathLike,
        models: ModelBundle,
        positions: Optional[Sequence[int]] = None,
        name: str = "ablate_latents",
        resume_at_source_iter: Optional[bool] = None,
    ) -> Tuple[pd.DataFrame, List[Path]]:
        positions = tuple(int(p) for p in (positions or self.config.evaluation.latent_positions))
        _, held_out = self.split(self.load_corpus(corpus_dir))
        models = models.with_seeding(resume_at_source_iter)
        arguments = {
            "corpus": corpus_dir,
            "positions": positions,
            "resume_at_source_iter": models.diffuser.cfg.resume_at_source_iter,
        }
        run_dir = self.start_run(name, "ablate-latents", arguments)
        table = ablate_latents(
            held_out, positions, models, self.config.pipeline, self.config.evaluation, self.config.performance
        )
        chart = ChartSpec("latents", "scatter", "eval_tv", "eval_vv", label="setting", title="Seeding position trade-off")
        return table, report({"latents": table}, run_dir, {"latents_chart": chart})

    def ablate_modality(
        self, corpus_dir: PathLike, embedder_path: PathLike, name: str = "ablate_modality"
    ) -> Tuple[pd.DataFrame, List[Path]]:
        train, held_out = self.split(self.load_corpus(corpus_dir))
        run_dir = self.start_run(name, "ablate-modality", {"corpus": corpus_dir, "embedder": embedder_path})
        table = modality_ablation(
            train,
            load_embedder(embedder_path),
            self.config.selector,
            held_out=held_out,
            include_static_text=self.config.evaluation.include_static_text,
            show_progress=self.config.performance.show_progress,
        )
        chart = ChartSpec("modality", "bar", "variant", "held_out_accuracy", title="Selector modality ablation")
        return table, report({"modality": table}, run_dir, {"modality_chart": chart})

    def load_traces(self, traces_dir: PathLike) -> List[GenerationTrace]:
        """Every generation trace under ``traces_dir``, in path order."""
        root = Path(traces_dir)
        paths = sorted(p for p in root.rglob("*.json") if p.parent.name == TRACES_DIR or p.name == TRACE_FILE_NAME)
        if not paths:
            raise StateError(f"no generation traces under {root}")
        return [load_trace(path) for path in paths]

    def histograms(
        self, traces_dir: PathLike, out_dir: Optional[PathLike] = None
    ) -> Tuple[UsageHistograms, List[Path]]:
        traces = self.load_traces(traces_dir)
        usage = usage_histograms(traces)
        latent = pd.DataFrame(
            [{"iteration": t, "count": usage.latent_counts[t], "mean": mean} for t, mean in usage.latent_usage.items()],
            columns=["iteration", "count", "mean"],
        )
        tables: Dict[str, pd.DataFrame] = {
            "usage": pd.DataFrame(usage_rows(usage), columns=["offset", "count", "mean", "share"]),
            "latent_usage": latent,
        }
        charts = {
            "usage_chart": ChartSpec("usage", "bar", "offset", "mean", title="Selected source offset"),
            "latent_usage_chart": ChartSpec("latent_usage", "bar", "iteration", "mean", title="Selected seed iteration"),
        }
        files = report(tables, out_dir, charts) if out_dir is not None else []
        return usage, files


def _nonlinearity_table(result: NonlinearityReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "decisions": result.decisions,
                "hit_rate": result.hit_rate,
                "baseline_hit_rate": result.baseline_hit_rate,
                "p_value": result.p_value,
            }
        ]
    )


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


__all__ = ["API", "EvaluationOutputs"]
