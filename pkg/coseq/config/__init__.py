from .config_loader import ConfigLoader, config_from_dict, get_config
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
    to_dict,
)

__all__ = [
    "ConfigLoader",
    "get_config",
    "config_from_dict",
    "CoseqConfig",
    "CorpusConfig",
    "DiffuserConfig",
    "EmbedderConfig",
    "EvaluationConfig",
    "OptimConfig",
    "PerformanceConfig",
    "PipelineConfig",
    "SelectorConfig",
    "to_dict",
]
