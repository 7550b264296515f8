from dataclasses import dataclass, field, asdict
from typing import Any, Dict, Tuple
import logging

from ..exceptions import ConfigurationError

DEFAULT_PALETTE: Tuple[str, ...] = (
    "red",
    "green",
    "blue",
    "yellow",
    "magenta",
    "cyan",
    "orange",
    "purple",
)

SYNTHESIS_MODES: Tuple[str, ...] = ("cosed", "previous", "independent", "fixed")
FIRST_IMAGE_STRATEGIES: Tuple[str, ...] = ("clip", "random", "single")


@dataclass
class OptimConfig:
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 500
    epochs: int = 10

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigurationError(f"learning_rate must be > 0, got {self.learning_rate}")
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigurationError(f"{name} must be in (0, 1), got {value}")
        if self.eps <= 0:
            raise ConfigurationError(f"eps must be > 0, got {self.eps}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigurationError(f"epochs must be >= 0, got {self.epochs}")


@dataclass
class CorpusConfig:
    n_tasks: int = 1400
    mean_steps: float = 4.9
    nonlinear_fraction: float = 0.5
    image_size: int = 16
    palette: Tuple[str, ...] = DEFAULT_PALETTE
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_tasks < 1:
            raise ConfigurationError(f"n_tasks must be at least 1, got {self.n_tasks}")
        if not 2.0 <= self.mean_steps <= 10.0:
            raise ConfigurationError(f"mean_steps must be in [2, 10], got {self.mean_steps}")
        if not 0.0 <= self.nonlinear_fraction <= 1.0:
            raise ConfigurationError(
                f"nonlinear_fraction must be in [0, 1], got {self.nonlinear_fraction}"
            )
        if self.image_size < 9:
            raise ConfigurationError(f"image_size must be at least 9, got {self.image_size}")
        self.palette = tuple(self.palette)
        if len(self.palette) < 2 or len(set(self.palette)) != len(self.palette):
            raise ConfigurationError("palette needs at least 2 distinct colors")


@dataclass
class EmbedderConfig:
    d: int = 64
    token_dim: int = 32
    hidden: int = 128
    patch_size: int = 4
    temperature: float = 0.07
    retrieval_batch: int = 32
    seed: int = 0
    optim: OptimConfig = field(
        default_factory=lambda: OptimConfig(learning_rate=0.003, batch_size=128, epochs=15)
    )

    def __post_init__(self) -> None:
        if self.d < 2 or self.d % 2 != 0:
            raise ConfigurationError(f"d must be a positive even number, got {self.d}")
        if self.temperature <= 0:
            raise ConfigurationError(f"temperature must be > 0, got {self.temperature}")
        if self.optim.batch_size < 2:
            raise ConfigurationError("contrastive training needs batch_size >= 2")
        if self.retrieval_batch < 2:
            raise ConfigurationError("retrieval_batch must be at least 2")


@dataclass
class DiffuserConfig:
    T: int = 50
    beta_start: float = 1e-4
    beta_end: float = 0.02
    hidden: int = 384
    time_dim: int = 32
    cond_dropout: float = 0.1
    guidance_scale: float = 1.5
    resume_at_source_iter: bool = False
    seed_noise_mix: float = 0.0
    seed: int = 0
    optim: OptimConfig = field(
        default_factory=lambda: OptimConfig(learning_rate=0.001, batch_size=128, epochs=30)
    )

    def __post_init__(self) -> None:
        if self.T < 2:
            raise ConfigurationError(f"T must be at least 2, got {self.T}")
        if not 0.0 < self.beta_start < self.beta_end < 1.0:
            raise ConfigurationError("betas must satisfy 0 < beta_start < beta_end < 1")
        if not 0.0 <= self.cond_dropout < 1.0:
            raise ConfigurationError(f"cond_dropout must be in [0, 1), got {self.cond_dropout}")
        if not 0.0 <= self.seed_noise_mix <= 1.0:
            raise ConfigurationError(f"seed_noise_mix must be in [0, 1], got {self.seed_noise_mix}")
        if self.time_dim % 2 != 0:
            raise ConfigurationError(f"time_dim must be even, got {self.time_dim}")


@dataclass
class SelectorConfig:
    M: int = 10
    temperature: float = 1.0
    use_bias: bool = False
    normalize_before_projection: bool = True
    train_frac: float = 0.8
    seed: int = 0
    optim: OptimConfig = field(default_factory=OptimConfig)

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ConfigurationError(f"M must be at least 2, got {self.M}")
        if self.temperature <= 0:
            raise ConfigurationError(f"temperature must be > 0, got {self.temperature}")
        if not 0.0 < self.train_frac < 1.0:
            raise ConfigurationError(f"train_frac must be in (0, 1), got {self.train_frac}")


@dataclass
class PipelineConfig:
    w: int = 3
    B: int = 4
    mode: str = "cosed"
    fixed_position: int = 0
    first_image_strategy: str = "clip"
    crossfade_frames: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.w < 0:
            raise ConfigurationError(f"w must be >= 0, got {self.w}")
        if self.B < 1:
            raise ConfigurationError(f"B must be at least 1, got {self.B}")
        if self.mode not in SYNTHESIS_MODES:
            raise ConfigurationError(
                f"mode must be one of {', '.join(SYNTHESIS_MODES)}, got '{self.mode}'"
            )
        if self.fixed_position < 0:
            raise ConfigurationError(f"fixed_position must be >= 0, got {self.fixed_position}")
        if self.first_image_strategy not in FIRST_IMAGE_STRATEGIES:
            raise ConfigurationError(
                f"first_image_strategy must be one of {', '.join(FIRST_IMAGE_STRATEGIES)}"
            )
        if self.crossfade_frames < 0:
            raise ConfigurationError("crossfade_frames must be >= 0")


@dataclass
class EvaluationConfig:
    latent_positions: Tuple[int, ...] = (2, 5, 10, 20)
    subset_size: int = 20
    all_pairs_vv: bool = False
    include_static_text: bool = False

    def __post_init__(self) -> None:
        self.latent_positions = tuple(int(p) for p in self.latent_positions)
        if not self.latent_positions:
            raise ConfigurationError("latent_positions cannot be empty")
        if any(p < 0 for p in self.latent_positions):
            raise ConfigurationError("latent_positions must be >= 0")
        if self.subset_size < 1:
            raise ConfigurationError(f"subset_size must be at least 1, got {self.subset_size}")


@dataclass
class PerformanceConfig:
    max_workers: int = 4
    parallel_tasks: bool = False
    parallel_candidates: bool = False
    show_progress: bool = True

    def __post_init__(self) -> None:
        if self.max_workers < 1:
            raise ConfigurationError(f"max_workers must be at least 1, got {self.max_workers}")
        if self.max_workers > 100:
            raise ConfigurationError(f"max_workers should not exceed 100 (got {self.max_workers})")


@dataclass
class CoseqConfig:
    log_level: str = "INFO"
    run_dir: str = "runs"
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    diffuser: DiffuserConfig = field(default_factory=DiffuserConfig)
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    performance: PerformanceConfig = field(default_factory=PerformanceConfig)

    def __post_init__(self) -> None:
        valid_log_levels = {"TRACE", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if self.log_level.upper() not in valid_log_levels:
            raise ConfigurationError(
                f"Invalid log_level: '{self.log_level}'. "
                f"Must be one of: {', '.join(sorted(valid_log_levels))}"
            )
        if not self.run_dir:
            raise ConfigurationError("run_dir cannot be empty")

    def get_log_level(self) -> int:
        level_map = {
            "TRACE": 5,
            "DEBUG": logging.DEBUG,
            "INFO": logging.INFO,
            "WARNING": logging.WARNING,
            "ERROR": logging.ERROR,
            "CRITICAL": logging.CRITICAL,
        }
        return level_map.get(self.log_level.upper(), logging.INFO)

    def to_dict(self) -> Dict[str, Any]:
        return to_dict(self)


def to_dict(config: Any) -> Dict[str, Any]:
    data = asdict(config)
    return _jsonable(data)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


__all__ = [
    "OptimConfig",
    "CorpusConfig",
    "EmbedderConfig",
    "DiffuserConfig",
    "SelectorConfig",
    "PipelineConfig",
    "EvaluationConfig",
    "PerformanceConfig",
    "CoseqConfig",
    "DEFAULT_PALETTE",
    "SYNTHESIS_MODES",
    "FIRST_IMAGE_STRATEGIES",
    "to_dict",
]
