from .workspace import (
    SHAPES,
    COLOR_RGB,
    BACKGROUNDS,
    CELL_NAMES,
    Entity,
    Workspace,
    Action,
    apply_action,
    cell_name,
)
from .render import render_scene, cell_box, cell_center
from .grammar import describe_step, describe_entity, parse_sentence, vocabulary_tokens
from .corpus import Step, Task, Corpus, generate_corpus, generate_task, split_corpus
from .corpus_io import save_corpus, load_corpus, save_ppm, load_ppm

__all__ = [
    "SHAPES",
    "COLOR_RGB",
    "BACKGROUNDS",
    "CELL_NAMES",
    "Entity",
    "Workspace",
    "Action",
    "apply_action",
    "cell_name",
    "render_scene",
    "cell_box",
    "cell_center",
    "describe_step",
    "describe_entity",
    "parse_sentence",
    "vocabulary_tokens",
    "Step",
    "Task",
    "Corpus",
    "generate_corpus",
    "generate_task",
    "split_corpus",
    "save_corpus",
    "load_corpus",
    "save_ppm",
    "load_ppm",
]
