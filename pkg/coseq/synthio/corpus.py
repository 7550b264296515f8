from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .grammar import describe_step
from .render import render_scene
from .workspace import (
    ACTION_KINDS,
    BACKGROUNDS,
    COLOR_RGB,
    SHAPES,
    Action,
    Workspace,
    apply_action,
)
from ..config.config_schema import CorpusConfig, PerformanceConfig
from ..constants import MAX_ENTITIES, MAX_STEPS_PER_TASK, MIN_STEPS_PER_TASK
from ..exceptions import ConfigurationError
from ..execution import run_ordered
from ..logger import get_logger

logger = get_logger()

ACTION_WEIGHTS: Dict[str, float] = {
    "add": 0.35,
    "recolor": 0.2,
    "transform": 0.15,
    "combine": 0.15,
    "set_background": 0.15,
}
FOCUS_TARGET_PROBABILITY = 0.6


@dataclass(frozen=True, eq=False)
class Step:
    index: int
    action: Action
    antecedent: int
    raw_text: str
    resolved_text: str
    workspace: Workspace
    focus_cell: Optional[int]
    gt_scene: np.ndarray

    @property
    def is_nonlinear(self) -> bool:
        return self.index >= 3 and self.antecedent < self.index - 1


@dataclass(frozen=True, eq=False)
class Task:
    id: str
    index: int
    title: str
    steps: Tuple[Step, ...]

    @property
    def dependency_graph(self) -> List[int]:
        return [step.antecedent for step in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def step(self, index: int) -> Step:
        return self.steps[index - 1]


@dataclass(eq=False)
class Corpus:
    tasks: List[Task]
    config: CorpusConfig = field(default_factory=CorpusConfig)

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self) -> Iterator[Task]:
        return iter(self.tasks)

    def task(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.id == task_id or str(task.index) == str(task_id):
                return task
        raise KeyError(f"no task '{task_id}' in corpus")

    def steps(self) -> Iterator[Tuple[Task, Step]]:
        for task in self.tasks:
            for step in task.steps:
                yield task, step

    def subset(self, task_ids: Sequence[str]) -> "Corpus":
        wanted = set(task_ids)
        return Corpus([task for task in self.tasks if task.id in wanted], self.config)


def task_id_for(index: int) -> str:
    return f"task-{index:04d}"


def _pick_target(rng: np.random.Generator, workspace: Workspace, focus: Optional[int]) -> int:
    if focus is not None and workspace.entity_at(focus) is not None and rng.random() < FOCUS_TARGET_PROBABILITY:
        return focus
    cells = [entity.cell for entity in workspace.entities]
    return cells[int(rng.integers(len(cells)))]


def _pick_other(rng: np.random.Generator, options: Sequence[str], current: Optional[str] = None) -> str:
    pool = [option for option in options if option != current]
    return pool[int(rng.integers(len(pool)))]


def sample_action(
    rng: np.random.Generator,
    workspace: Workspace,
    focus: Optional[int],
    palette: Sequence[str],
    fresh: bool = False,
) -> Action:
    can_add = bool(workspace.free_cells()) and len(workspace.entities) < MAX_ENTITIES
    if fresh:
        valid = ["add"]
    else:
        valid = [
            kind
            for kind in ACTION_KINDS
            if (kind == "add" and can_add)
            or (kind in ("recolor", "transform") and workspace.entities)
            or (kind == "combine" and len(workspace.entities) >= 2)
            or kind == "set_background"
        ]
    weights = np.array([ACTION_WEIGHTS[kind] for kind in valid])
    kind = valid[int(rng.choice(len(valid), p=weights / weights.sum()))]

    if kind == "add":
        free = workspace.free_cells()
        return Action(
            kind="add",
            target=free[int(rng.integers(len(free)))],
            shape=_pick_other(rng, SHAPES),
            color=_pick_other(rng, palette),
        )
    if kind == "set_background":
        current = BACKGROUNDS[workspace.background_id]
        return Action(kind="set_background", background_id=BACKGROUNDS.index(_pick_other(rng, BACKGROUNDS, current)))

    target = _pick_target(rng, workspace, focus)
    entity = workspace.entity_at(target)
    assert entity is not None
    if kind == "recolor":
        return Action(kind="recolor", target=target, color=_pick_other(rng, palette, entity.color))
    if kind == "transform":
        return Action(kind="transform", target=target, shape=_pick_other(rng, SHAPES, entity.shape))
    others = [e.cell for e in workspace.entities if e.cell != target]
    return Action(kind="combine", target=target, other=others[int(rng.integers(len(others)))])


def _step_count(rng: np.random.Generator, mean_steps: float) -> int:
    extra = rng.poisson(max(mean_steps - MIN_STEPS_PER_TASK, 0.0))
    return int(np.clip(MIN_STEPS_PER_TASK + extra, MIN_STEPS_PER_TASK, MAX_STEPS_PER_TASK))


def generate_task(cfg: CorpusConfig, task_index: int) -> Task:
    """Generate one task from its own random stream ``[rng_seed, task_index]``."""
    rng = np.random.default_rng([cfg.rng_seed, task_index])
    n_steps = _step_count(rng, cfg.mean_steps)

    states: List[Tuple[Workspace, Optional[int]]] = [(Workspace(), None)]
    steps: List[Step] = []
    for n in range(1, n_steps + 1):
        if n == 1:
            antecedent = 0
        elif n >= 3 and rng.random() < cfg.nonlinear_fraction:
            antecedent = int(rng.integers(1, n - 1))
        else:
            antecedent = n - 1

        base, base_focus = states[antecedent]
        action = sample_action(rng, base, base_focus, cfg.palette, fresh=n == 1)
        workspace, focus = apply_action(base, action)
        raw_text, resolved_text = describe_step(action, base, n, antecedent, base_focus)
        steps.append(
            Step(
                index=n,
                action=action,
                antecedent=antecedent,
                raw_text=raw_text,
                resolved_text=resolved_text,
                workspace=workspace,
                focus_cell=focus,
                gt_scene=render_scene(workspace, cfg.image_size),
            )
        )
        states.append((workspace, focus))
        logger.trace("Task %d step %d: %s", task_index, n, raw_text)

    title = f"desk task {task_index + 1}: {steps[0].resolved_text}"
    return Task(id=task_id_for(task_index), index=task_index, title=title, steps=tuple(steps))


def _validate_palette(cfg: CorpusConfig) -> None:
    unknown = [color for color in cfg.palette if color not in COLOR_RGB]
    if unknown:
        raise ConfigurationError(
            f"palette colors {unknown} are not renderable; choose from {', '.join(COLOR_RGB)}"
        )


def generate_corpus(cfg: CorpusConfig, performance: Optional[PerformanceConfig] = None) -> Corpus:
    if cfg.n_tasks < 1:
        raise ConfigurationError(f"n_tasks must be at least 1, got {cfg.n_tasks}")
    _validate_palette(cfg)
    performance = performance or PerformanceConfig(parallel_tasks=False, show_progress=False)
    logger.debug("Generating %d tasks (p=%.2f, seed=%d)", cfg.n_tasks, cfg.nonlinear_fraction, cfg.rng_seed)

    tasks = run_ordered(
        {task_id_for(i): (lambda i=i: generate_task(cfg, i)) for i in range(cfg.n_tasks)},
        parallel=performance.parallel_tasks,
        max_workers=performance.max_workers,
        show_progress=performance.show_progress,
        description="Generating tasks",
    )

    corpus = Corpus(tasks=tasks, config=cfg)
    n_steps = sum(len(task) for task in tasks)
    n_nonlinear = sum(1 for _, step in corpus.steps() if step.is_nonlinear)
    logger.debug("Generated %d tasks, %d steps, %d non-linear", len(tasks), n_steps, n_nonlinear)
    return corpus


def split_corpus(corpus: Corpus, train_frac: float, seed: int = 0) -> Tuple[Corpus, Corpus]:
    """Disjoint train / held-out split by task, deterministic in ``seed``."""
    if not 0.0 < train_frac < 1.0:
        raise ConfigurationError(f"train_frac must be in (0, 1), got {train_frac}")
    n_train = int(round(train_frac * len(corpus)))
    if n_train == 0 or n_train == len(corpus):
        raise ConfigurationError(
            f"train_frac {train_frac} leaves an empty side for {len(corpus)} tasks"
        )
    order = np.random.default_rng(seed).permutation(len(corpus))
    train_positions = set(int(i) for i in order[:n_train])
    train = [task for i, task in enumerate(corpus.tasks) if i in train_positions]
    held_out = [task for i, task in enumerate(corpus.tasks) if i not in train_positions]
    logger.debug("Split corpus into %d train and %d held-out tasks", len(train), len(held_out))
    return Corpus(train, corpus.config), Corpus(held_out, corpus.config)


__all__ = [
    "Step",
    "Task",
    "Corpus",
    "task_id_for",
    "sample_action",
    "generate_task",
    "generate_corpus",
    "split_corpus",
]
