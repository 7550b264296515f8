from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Optional, Any, Dict, Type, TypeVar

from .config_schema import (
    CoseqConfig,
    CorpusConfig,
    DiffuserConfig,
    EmbedderConfig,
    EvaluationConfig,
    OptimConfig,
    PerformanceConfig,
    PipelineConfig,
    SelectorConfig,
)
from ..constants import CONFIG_FILE_NAMES
from ..logger import get_logger

logger = get_logger()

_global_config: Optional[CoseqConfig] = None

DEFAULT_YAML_TEMPLATE = """\
# coseq configuration

# Logging level: TRACE, DEBUG, INFO, WARNING, ERROR, CRITICAL
log_level: INFO
run_dir: runs

corpus:
  n_tasks: 1400
  mean_steps: 4.9
  nonlinear_fraction: 0.5
  image_size: 16
  rng_seed: 0

embedder:
  d: 64
  temperature: 0.07
  optim:
    learning_rate: 0.003
    batch_size: 128
    epochs: 15

diffuser:
  T: 50
  guidance_scale: 1.5
  # restart (false) or resume (true) the reverse process when seeding from z_{T-k}
  resume_at_source_iter: false

selector:
  M: 10
  normalize_before_projection: true
  optim:
    learning_rate: 0.01
    batch_size: 500
    epochs: 10

pipeline:
  w: 3
  B: 4
  mode: cosed
  first_image_strategy: clip

evaluation:
  latent_positions: [2, 5, 10, 20]
  subset_size: 20

performance:
  max_workers: 4
  parallel_tasks: false
  parallel_candidates: false
"""

T = TypeVar("T")


def _load_yaml(config_path: Path) -> Dict[str, Any]:
    try:
        import yaml

        with open(config_path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except ImportError:
        logger.warning("PyYAML not installed. Cannot load YAML config files.")
        logger.debug("Install with: pip install pyyaml")
        return {}
    except Exception as e:
        logger.error("Failed to load YAML config from %s: %s", config_path, e)
        logger.trace("Exception details: %s", e, exc_info=True)
        return {}


def _load_toml(config_path: Path) -> Dict[str, Any]:
    try:
        import tomllib

        with open(config_path, "rb") as f:
            return tomllib.load(f)
    except ImportError:
        try:
            import toml

            with open(config_path, "r", encoding="utf-8") as f:
                return toml.load(f)
        except ImportError:
            logger.warning("No TOML library installed. Cannot load TOML config files.")
            logger.debug("Install with: pip install toml")
            return {}
    except Exception as e:
        logger.error("Failed to load TOML config from %s: %s", config_path, e)
        logger.trace("Exception details: %s", e, exc_info=True)
        return {}


def _parse_flat(cls: Type[T], data: Dict[str, Any], section: str) -> T:
    known = {f.name for f in fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(data) - known)
    if unknown:
        logger.warning("Ignoring unknown keys in [%s]: %s", section, ", ".join(unknown))
    kwargs = {key: value for key, value in data.items() if key in known}
    if "optim" in kwargs:
        kwargs["optim"] = _parse_optim(kwargs["optim"] or {}, f"{section}.optim", cls)
    return cls(**kwargs)


def _parse_optim(data: Dict[str, Any], section: str, owner: Type[Any]) -> OptimConfig:
    # unspecified optimizer keys inherit the owner's defaults, not OptimConfig's
    defaults = owner().optim if is_dataclass(owner) else OptimConfig()
    merged = {f.name: getattr(defaults, f.name) for f in fields(OptimConfig)}
    unknown = sorted(set(data) - set(merged))
    if unknown:
        logger.warning("Ignoring unknown keys in [%s]: %s", section, ", ".join(unknown))
    merged.update({key: value for key, value in data.items() if key in merged})
    return OptimConfig(**merged)


def _parse_config_data(data: Dict[str, Any]) -> CoseqConfig:
    return CoseqConfig(
        log_level=data.get("log_level", "INFO"),
        run_dir=data.get("run_dir", "runs"),
        corpus=_parse_flat(CorpusConfig, data.get("corpus", {}) or {}, "corpus"),
        embedder=_parse_flat(EmbedderConfig, data.get("embedder", {}) or {}, "embedder"),
        diffuser=_parse_flat(DiffuserConfig, data.get("diffuser", {}) or {}, "diffuser"),
        selector=_parse_flat(SelectorConfig, data.get("selector", {}) or {}, "selector"),
        pipeline=_parse_flat(PipelineConfig, data.get("pipeline", {}) or {}, "pipeline"),
        evaluation=_parse_flat(
            EvaluationConfig, data.get("evaluation", {}) or {}, "evaluation"
        ),
        performance=_parse_flat(
            PerformanceConfig, data.get("performance", {}) or {}, "performance"
        ),
    )


class ConfigLoader:
    @staticmethod
    def find_config_file(start_path: Optional[Path] = None) -> Optional[Path]:
        if start_path is None:
            start_path = Path.cwd()

        logger.trace("Searching for config file starting from: %s", start_path)

        search_paths = [start_path] + list(start_path.parents)

        for search_path in search_paths:
            for config_name in CONFIG_FILE_NAMES:
                config_path = search_path / config_name
                logger.trace("Checking for config at: %s", config_path)
                if config_path.exists():
                    logger.debug("Found config file: %s", config_path)
                    return config_path

        logger.debug("No config file found")
        return None

    @staticmethod
    def load_config(config_path: Optional[Path] = None) -> CoseqConfig:
        if config_path is None:
            config_path = ConfigLoader.find_config_file()

        if config_path is None or not config_path.exists():
            logger.debug("Using default configuration")
            return CoseqConfig()

        logger.info("Loading config from: %s", config_path)

        if config_path.suffix in [".yaml", ".yml"]:
            data = _load_yaml(config_path)
        elif config_path.suffix == ".toml":
            data = _load_toml(config_path)
        else:
            logger.warning("Unknown config file format: %s", config_path.suffix)
            return CoseqConfig()

        try:
            config = _parse_config_data(data)
            logger.debug("Config loaded successfully")
            return config
        except Exception as e:
            logger.error("Failed to parse config: %s", e)
            logger.trace("Exception details: %s", e, exc_info=True)
            return CoseqConfig()

    @staticmethod
    def create_default_config_file(target_path: Path) -> bool:
        logger.debug("Creating default config file at: %s", target_path)

        if target_path.suffix == ".toml":
            import toml

            default_config = "# coseq configuration\n\n" + toml.dumps(CoseqConfig().to_dict())
        else:
            default_config = DEFAULT_YAML_TEMPLATE

        try:
            target_path.write_text(default_config, encoding="utf-8")
            logger.success("Created default config file: %s", target_path)
            return True
        except Exception as e:
            logger.error("Failed to create config file: %s", e)
            logger.trace("Exception details: %s", e, exc_info=True)
            return False


def config_from_dict(cls: Type[T], data: Dict[str, Any], section: str = "config") -> T:
    """Rebuild a config section from its ``to_dict`` form, e.g. from checkpoint metadata."""
    return _parse_flat(cls, dict(data or {}), section)


def get_config(reload: bool = False) -> CoseqConfig:
    global _global_config

    if _global_config is None or reload:
        logger.trace("Loading global config")
        _global_config = ConfigLoader.load_config()

    return _global_config


__all__ = ["ConfigLoader", "get_config", "config_from_dict"]
