from functools import wraps
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

from .api import API
from .config import ConfigLoader
from .constants import EXIT_FAILURE, EXIT_SUCCESS
from .logger import get_logger
from .ui import get_console
from .ui_messages import (
    UI_MESSAGE_CAPTIONS_HEADER,
    UI_MESSAGE_CONFIG_CREATED,
    UI_MESSAGE_CONFIG_EXISTS,
    UI_MESSAGE_CONFIG_FAILED,
    UI_MESSAGE_CORPUS_WRITTEN,
    UI_MESSAGE_DIFFUSER_RESULT,
    UI_MESSAGE_EMBEDDER_RESULT,
    UI_MESSAGE_ERROR_PREFIX,
    UI_MESSAGE_INVALID_CONFIG_FORMAT,
    UI_MESSAGE_MODEL_SAVED,
    UI_MESSAGE_NONLINEARITY_RESULT,
    UI_MESSAGE_REPORT_WRITTEN,
    UI_MESSAGE_SELECTOR_RESULT,
    UI_MESSAGE_SEQUENCE_WRITTEN,
)

logger = get_logger()
console = get_console()


def print_error(message: str) -> None:
    console.print_error(f"{UI_MESSAGE_ERROR_PREFIX}{message}")


def handle_errors(func: Callable[..., int]) -> Callable[..., int]:
    """Turn any exception raised by a command into an error line and EXIT_FAILURE."""

    @wraps(func)
    def wrapper(self: "CLI", *args: Any, **kwargs: Any) -> int:
        logger.debug("Executing %s command", func.__name__)
        try:
            return func(self, *args, **kwargs)
        except Exception as e:  # pylint: disable=broad-except
            logger.error("Error in %s: %s", func.__name__, e)
            logger.trace("Exception details: %s", e, exc_info=True)
            print_error(str(e))
            return EXIT_FAILURE

    return wrapper


def _positions(value: Union[None, int, str, Sequence[int]]) -> Optional[Sequence[int]]:
    if value is None:
        return None
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        return [int(part) for part in value.split(",") if part.strip()]
    return [int(p) for p in value]


class CLI:
    """Command-line interface for coseq.

    Generates the synthetic task corpus, trains the embedder, diffuser and
    selection head, synthesizes image sequences and runs the evaluations.
    Settings come from the nearest .coseq.yaml / .coseq.toml; run `coseq init`
    to write one.

    You may add a --debug (or --trace) flag to see additional logging information.
    """

    def __init__(self) -> None:
        logger.trace("Initializing CLI")
        self._api = API()

    def init(self, config_format: str = "yaml") -> int:
        """Write a default configuration file into the current directory.

        Args:
            config_format: 'yaml' or 'toml'.
        """
        if config_format not in ("yaml", "toml"):
            console.print_error(f"{UI_MESSAGE_INVALID_CONFIG_FORMAT}{config_format}")
            logger.error("Invalid config format: %s", config_format)
            return EXIT_FAILURE

        config_file = Path.cwd() / f".coseq.{config_format}"
        if config_file.exists():
            console.print_warning(f"{UI_MESSAGE_CONFIG_EXISTS}{config_file}")
            logger.warning("Config file already exists: %s", config_file)
            return EXIT_FAILURE

        if ConfigLoader.create_default_config_file(config_file):
            console.print_success(f"{UI_MESSAGE_CONFIG_CREATED}{config_file}")
            return EXIT_SUCCESS
        console.print_error(f"{UI_MESSAGE_CONFIG_FAILED}{config_file}")
        return EXIT_FAILURE

    @handle_errors
    def generate_corpus(self, out: str, n_tasks: Optional[int] = None, seed: Optional[int] = None) -> int:
        """Generate the synthetic corpus of tasks (texts, dependency graphs, scenes) into OUT."""
        corpus = self._api.generate_corpus(out, n_tasks, seed)
        n_steps = sum(len(task) for task in corpus)
        n_nonlinear = sum(1 for _, step in corpus.steps() if step.is_nonlinear)
        console.print_table(
            ["Tasks", "Steps", "Non-linear steps"], [[len(corpus), n_steps, n_nonlinear]], title="Corpus"
        )
        console.print_success(f"{UI_MESSAGE_CORPUS_WRITTEN}{out}")
        return EXIT_SUCCESS

    @handle_errors
    def train_embedder(self, corpus: str, out: str) -> int:
        """Train the contrastive text/image embedder on the training split of CORPUS."""
        result = self._api.train_embedder(corpus, out)
        retrieval = result.retrieval_top1 if result.retrieval_top1 is not None else float("nan")
        console.print_info(
            UI_MESSAGE_EMBEDDER_RESULT.format(initial=result.initial_loss, final=result.final_loss, retrieval=retrieval)
        )
        console.print_success(f"{UI_MESSAGE_MODEL_SAVED}{out}")
        return EXIT_SUCCESS

    @handle_errors
    def train_diffuser(self, corpus: str, out: str, embedder: Optional[str] = None, unconditional: bool = False) -> int:
        """Train the caption-conditioned denoiser (needs --embedder unless --unconditional)."""
        result = self._api.train_diffuser(corpus, embedder, out, unconditional)
        console.print_info(UI_MESSAGE_DIFFUSER_RESULT.format(initial=result.initial_loss, final=result.final_loss))
        console.print_success(f"{UI_MESSAGE_MODEL_SAVED}{out}")
        return EXIT_SUCCESS

    @handle_errors
    def train_selector(
        self,
        corpus: str,
        embedder: str,
        out: str,
        M: Optional[int] = None,  # pylint: disable=invalid-name
        variant: str = "standard",
    ) -> int:
        """Train the selection head over M candidates with a frozen embedder."""
        result = self._api.train_selector(corpus, embedder, out, M, variant)
        console.print_info(
            UI_MESSAGE_SELECTOR_RESULT.format(
                variant=result.variant,
                accuracy=result.held_out_accuracy,
                untrained=result.initial_accuracy,
                chance=1.0 / result.head.cfg.M,
            )
        )
        console.print_success(f"{UI_MESSAGE_MODEL_SAVED}{out}")
        return EXIT_SUCCESS

    @handle_errors
    def caption(self, corpus: str, task: str) -> int:
        """Print the raw and the contextualized caption of every step of TASK."""
        pairs = self._api.caption(corpus, task)
        rows = [[n, raw, resolved] for n, (raw, resolved) in enumerate(pairs, start=1)]
        console.print_table(["Step", "Raw", "Caption"], rows, title=f"{UI_MESSAGE_CAPTIONS_HEADER}{task}")
        return EXIT_SUCCESS

    @handle_errors
    def synthesize(
        self,
        corpus: str,
        task: str,
        embedder: str,
        diffuser: str,
        out: str,
        selector: Optional[str] = None,
        w: Optional[int] = None,
        B: Optional[int] = None,  # pylint: disable=invalid-name
        mode: Optional[str] = None,
        first_image_strategy: Optional[str] = None,
        crossfade_frames: Optional[int] = None,
        resume_at_source_iter: Optional[bool] = None,
    ) -> int:
        """Synthesize the image sequence of TASK and write images, trace and manifest to OUT.

        --resume-at-source-iter continues a seeded generation from the iteration its
        latent was recorded at instead of restarting at T.
        """
        models = self._api.load_models(embedder, diffuser, selector)
        result = self._api.synthesize(
            corpus,
            task,
            models,
            out,
            resume_at_source_iter=resume_at_source_iter,
            w=w,
            B=B,
            mode=mode,
            first_image_strategy=first_image_strategy,
            crossfade_frames=crossfade_frames,
        )
        rows = [
            [entry.step, entry.caption, len(entry.candidates), f"{entry.chosen.source_step}@{entry.chosen.source_iter}"]
            for entry in result.trace.steps
        ]
        console.print_table(["Step", "Caption", "Candidates", "Chosen source"], rows, title=result.task_id)
        console.print_success(f"{UI_MESSAGE_SEQUENCE_WRITTEN}{out}")
        return EXIT_SUCCESS

    @handle_errors
    def evaluate(
        self,
        corpus: str,
        embedder: str,
        diffuser: str,
        selector: str,
        name: str = "evaluate",
    ) -> int:
        """Compare cosed, previous-step and independent synthesis on the held-out split."""
        models = self._api.load_models(embedder, diffuser, selector)
        outputs = self._api.evaluate(corpus, models, name)
        console.print_frame(outputs.modes, title="Automatic metrics")
        result = outputs.nonlinearity
        console.print_info(
            UI_MESSAGE_NONLINEARITY_RESULT.format(
                hit=result.hit_rate, baseline=result.baseline_hit_rate, n=result.decisions, p=result.p_value
            )
        )
        console.print_success(f"{UI_MESSAGE_REPORT_WRITTEN}{outputs.run_dir}")
        return EXIT_SUCCESS

    @handle_errors
    def ablate_latents(
        self,
        corpus: str,
        embedder: str,
        diffuser: str,
        selector: str,
        positions: Union[None, int, str, Sequence[int]] = None,
        name: str = "ablate_latents",
        resume_at_source_iter: Optional[bool] = None,
    ) -> int:
        """Sweep fixed seeding positions against full cosed selection."""
        models = self._api.load_models(embedder, diffuser, selector)
        table, files = self._api.ablate_latents(
            corpus, models, _positions(positions), name, resume_at_source_iter=resume_at_source_iter
        )
        console.print_frame(table, title="Latent seeding sweep")
        console.print_success(f"{UI_MESSAGE_REPORT_WRITTEN}{files[0].parent}")
        return EXIT_SUCCESS

    @handle_errors
    def ablate_modality(self, corpus: str, embedder: str, name: str = "ablate_modality") -> int:
        """Retrain the selector with the text signal, then both signals, shuffled away."""
        table, files = self._api.ablate_modality(corpus, embedder, name)
        console.print_frame(table, title="Modality ablation")
        console.print_success(f"{UI_MESSAGE_REPORT_WRITTEN}{files[0].parent}")
        return EXIT_SUCCESS

    @handle_errors
    def histograms(self, traces: str, out: Optional[str] = None) -> int:
        """Tabulate which step and iteration the selected candidates were seeded from."""
        usage, files = self._api.histograms(traces, out)
        rows = [
            [offset, usage.step_counts[offset], mean, usage.step_shares[offset]]
            for offset, mean in usage.step_usage.items()
        ]
        console.print_table(["Steps back", "Count", "Per sequence", "Share"], rows, title="Source step usage")
        if files:
            console.print_success(f"{UI_MESSAGE_REPORT_WRITTEN}{out}")
        return EXIT_SUCCESS


__all__ = ["CLI", "handle_errors", "print_error"]
