from typing import Tuple

EXIT_SUCCESS: int = 0
EXIT_FAILURE: int = 1

CHECKPOINT_MAGIC: bytes = b"COSEQ1"
LATENT_DUMP_MAGIC: bytes = b"COSEQL"
CORPUS_FORMAT: str = "coseq-corpus-v1"
TRACE_FORMAT: str = "coseq-trace-v1"
SEQUENCE_FORMAT: str = "coseq-sequence-v1"

CORPUS_MANIFEST_NAME: str = "manifest.json"
CORPUS_SCENES_DIR: str = "scenes"
RUN_SNAPSHOT_NAME: str = "run.json"
TRACE_FILE_NAME: str = "trace.json"

CONFIG_FILE_NAMES: Tuple[str, ...] = (".coseq.yaml", ".coseq.yml", ".coseq.toml")

MAX_STEPS_PER_TASK: int = 10
MIN_STEPS_PER_TASK: int = 2
MAX_ENTITIES: int = 6
MAX_TEXT_TOKENS: int = 400
GRID_SIZE: int = 3

PROB_FLOOR: float = 1e-12
NORM_EPS: float = 1e-12

__all__ = [
    "EXIT_SUCCESS",
    "EXIT_FAILURE",
    "CHECKPOINT_MAGIC",
    "LATENT_DUMP_MAGIC",
    "CORPUS_FORMAT",
    "TRACE_FORMAT",
    "SEQUENCE_FORMAT",
    "CORPUS_MANIFEST_NAME",
    "CORPUS_SCENES_DIR",
    "RUN_SNAPSHOT_NAME",
    "TRACE_FILE_NAME",
    "CONFIG_FILE_NAMES",
    "MAX_STEPS_PER_TASK",
    "MIN_STEPS_PER_TASK",
    "MAX_ENTITIES",
    "MAX_TEXT_TOKENS",
    "GRID_SIZE",
    "PROB_FLOOR",
    "NORM_EPS",
]
