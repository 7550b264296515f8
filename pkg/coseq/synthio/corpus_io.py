import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from PIL import Image

from .corpus import Corpus, Step, Task
from .render import from_pil, to_pil
from .workspace import Action, Workspace
from ..config.config_loader import config_from_dict
from ..config.config_schema import CorpusConfig, to_dict
from ..constants import CORPUS_FORMAT, CORPUS_MANIFEST_NAME, CORPUS_SCENES_DIR
from ..exceptions import CorpusFormatError
from ..logger import get_logger

logger = get_logger()

PathLike = Union[str, Path]


def save_ppm(path: PathLike, scene: np.ndarray) -> None:
    to_pil(scene).save(Path(path), format="PPM")


def load_ppm(path: PathLike) -> np.ndarray:
    with Image.open(Path(path)) as image:
        return from_pil(image)


def _step_record(task: Task, step: Step) -> Dict[str, Any]:
    return {
        "index": step.index,
        "antecedent": step.antecedent,
        "action": step.action.to_dict(),
        "raw_text": step.raw_text,
        "resolved_text": step.resolved_text,
        "focus_cell": step.focus_cell,
        "workspace": step.workspace.to_dict(),
        "image": f"{CORPUS_SCENES_DIR}/{task.id}_s{step.index:02d}.ppm",
    }


def save_corpus(corpus: Corpus, out_dir: PathLike) -> Path:
    """Write ``manifest.json`` plus one binary PPM per step scene."""
    out_dir = Path(out_dir)
    (out_dir / CORPUS_SCENES_DIR).mkdir(parents=True, exist_ok=True)
    tasks: List[Dict[str, Any]] = []
    for task in corpus.tasks:
        steps = []
        for step in task.steps:
            record = _step_record(task, step)
            save_ppm(out_dir / record["image"], step.gt_scene)
            steps.append(record)
        tasks.append(
            {
                "id": task.id,
                "index": task.index,
                "title": task.title,
                "dependency_graph": task.dependency_graph,
                "steps": steps,
            }
        )
    manifest = {"format": CORPUS_FORMAT, "config": to_dict(corpus.config), "tasks": tasks}
    manifest_path = out_dir / CORPUS_MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    logger.success("Wrote corpus of %d tasks to %s", len(corpus), out_dir)
    return manifest_path


def load_corpus(corpus_dir: PathLike) -> Corpus:
    corpus_dir = Path(corpus_dir)
    manifest_path = corpus_dir / CORPUS_MANIFEST_NAME
    if not manifest_path.exists():
        raise CorpusFormatError(corpus_dir, f"missing {CORPUS_MANIFEST_NAME}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise CorpusFormatError(manifest_path, f"invalid JSON: {e}") from e
    if manifest.get("format") != CORPUS_FORMAT:
        raise CorpusFormatError(manifest_path, f"expected format '{CORPUS_FORMAT}', got '{manifest.get('format')}'")

    tasks: List[Task] = []
    try:
        for task_data in manifest["tasks"]:
            steps = []
            for step_data in task_data["steps"]:
                image_path = corpus_dir / step_data["image"]
                if not image_path.exists():
                    raise CorpusFormatError(image_path, "scene image is missing")
                steps.append(
                    Step(
                        index=int(step_data["index"]),
                        action=Action.from_dict(step_data["action"]),
                        antecedent=int(step_data["antecedent"]),
                        raw_text=step_data["raw_text"],
                        resolved_text=step_data["resolved_text"],
                        workspace=Workspace.from_dict(step_data["workspace"]),
                        focus_cell=step_data.get("focus_cell"),
                        gt_scene=load_ppm(image_path),
                    )
                )
            task = Task(
                id=task_data["id"],
                index=int(task_data["index"]),
                title=task_data["title"],
                steps=tuple(steps),
            )
            if task.dependency_graph != list(task_data.get("dependency_graph", task.dependency_graph)):
                raise CorpusFormatError(manifest_path, f"dependency graph of {task.id} disagrees with its steps")
            tasks.append(task)
        config = config_from_dict(CorpusConfig, manifest.get("config", {}), "corpus")
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusFormatError(manifest_path, f"malformed manifest: {e}") from e

    logger.debug("Loaded corpus of %d tasks from %s", len(tasks), corpus_dir)
    return Corpus(tasks=tasks, config=config)


__all__ = ["save_corpus", "load_corpus", "save_ppm", "load_ppm"]
