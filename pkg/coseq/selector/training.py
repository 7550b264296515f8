from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from .head import SelectionHead
from ..config.config_schema import SelectorConfig
from ..embedder import Embedder
from ..exceptions import ConfigurationError, DependencyError
from ..logger import get_logger
from ..nn import Tensor, adam_step, no_grad, softmax_cross_entropy
from ..synthio.corpus import Corpus, split_corpus

logger = get_logger()

VARIANTS: Tuple[str, ...] = ("standard", "text_shuffled", "both_shuffled", "static_text")

Instance = Tuple[int, int]


@dataclass
class SceneTable:
    """Prepared ground-truth scene embeddings of a corpus, one row per step."""

    text: np.ndarray
    image: np.ndarray
    rows: List[List[int]]

    @property
    def n_tasks(self) -> int:
        return len(self.rows)


@dataclass
class SelectionBatch:
    text_sum: np.ndarray
    image_sum: np.ndarray
    counts: np.ndarray
    candidate_text: np.ndarray
    candidate_image: np.ndarray
    onehot: np.ndarray

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.onehot, axis=1)


@dataclass
class SelectorTrainingResult:
    head: SelectionHead
    variant: str
    initial_loss: float
    initial_accuracy: float
    epoch_losses: List[float] = field(default_factory=list)
    held_out_accuracy: float = 0.0

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else self.initial_loss


def build_scene_table(corpus: Corpus, embedder: Embedder, head: SelectionHead) -> SceneTable:
    texts, images, rows = [], [], []
    for task in corpus:
        task_rows = []
        for step in task.steps:
            task_rows.append(len(texts))
            texts.append(step.resolved_text)
            images.append(step.gt_scene)
        rows.append(task_rows)
    text = head.prepare(embedder.encode_texts(texts))
    image = head.prepare(embedder.encode_images(np.stack(images)))
    return SceneTable(text=text, image=image, rows=rows)


def apply_variant(table: SceneTable, variant: str, rng: np.random.Generator, static_text: Optional[np.ndarray] = None) -> SceneTable:
    """Destroy the text and/or image signal of a table for the modality ablation."""
    if variant not in VARIANTS:
        raise ConfigurationError(f"variant must be one of {', '.join(VARIANTS)}, got '{variant}'")
    if variant == "standard":
        return table
    if variant == "static_text":
        if static_text is None:
            raise ConfigurationError("the static_text variant needs a constant text embedding")
        constant = np.broadcast_to(static_text, table.text.shape).copy()
        return replace(table, text=constant)
    text = table.text[rng.permutation(len(table.text))]
    image = table.image[rng.permutation(len(table.image))] if variant == "both_shuffled" else table.image
    return replace(table, text=text, image=image)


def build_instances(table: SceneTable) -> List[Instance]:
    """(task, k) for every step k >= 2: steps 1..k-1 are the context, step k the answer."""
    return [(task, k) for task, rows in enumerate(table.rows) for k in range(2, len(rows) + 1)]


def sample_batch(
    table: SceneTable, instances: List[Instance], M: int, rng: np.random.Generator  # pylint: disable=invalid-name
) -> SelectionBatch:
    """Candidates: the true next scene plus the scene of a random step of each of
    M-1 other tasks, in random order."""
    if table.n_tasks < M:
        raise ConfigurationError(f"need at least M={M} tasks to draw candidates, got {table.n_tasks}")
    d = table.text.shape[1]
    n = len(instances)
    text_sum = np.zeros((n, d), dtype=np.float32)
    image_sum = np.zeros((n, d), dtype=np.float32)
    counts = np.zeros(n, dtype=np.float32)
    candidate_rows = np.zeros((n, M), dtype=np.int64)
    onehot = np.zeros((n, M), dtype=np.float32)
    for i, (task, k) in enumerate(instances):
        rows = table.rows[task]
        context = rows[: k - 1]
        text_sum[i] = table.text[context].sum(axis=0)
        image_sum[i] = table.image[context].sum(axis=0)
        counts[i] = len(context)

        others = rng.choice(table.n_tasks - 1, size=M - 1, replace=False)
        others = others + (others >= task)
        negatives = [table.rows[other][int(rng.integers(len(table.rows[other])))] for other in others]
        position = int(rng.integers(M))
        chosen = negatives[:position] + [rows[k - 1]] + negatives[position:]
        candidate_rows[i] = chosen
        onehot[i, position] = 1.0
    return SelectionBatch(
        text_sum=text_sum,
        image_sum=image_sum,
        counts=counts,
        candidate_text=table.text[candidate_rows],
        candidate_image=table.image[candidate_rows],
        onehot=onehot,
    )


def batch_scores(head: SelectionHead, batch: SelectionBatch) -> Tensor:
    n, m, d = batch.candidate_text.shape
    past = head.project_past_sum(batch.text_sum, batch.image_sum, batch.counts)
    current = head.project_batch(
        batch.candidate_text.reshape(n * m, d), batch.candidate_image.reshape(n * m, d), "current"
    ).reshape(n, m, d)
    scores = (current * past.reshape(n, 1, d)).sum(axis=2)
    return scores * (1.0 / head.cfg.temperature)


def selection_loss(head: SelectionHead, batch: SelectionBatch) -> Tensor:
    return softmax_cross_entropy(batch_scores(head, batch), batch.onehot)


def selection_accuracy(head: SelectionHead, table: SceneTable, M: int, seed: int) -> float:  # pylint: disable=invalid-name
    instances = build_instances(table)
    if not instances:
        return 0.0
    batch = sample_batch(table, instances, M, np.random.default_rng(seed))
    with no_grad():
        scores = batch_scores(head, batch).numpy()
    return float(np.mean(np.argmax(scores, axis=1) == batch.labels))


def train_selector(
    corpus: Corpus,
    embedder: Embedder,
    cfg: Optional[SelectorConfig] = None,
    held_out: Optional[Corpus] = None,
    variant: str = "standard",
    show_progress: bool = False,
) -> SelectorTrainingResult:
    """Train the head on ground-truth scenes with cross-entropy over M candidates.

    Without ``held_out`` the corpus is split by ``cfg.train_frac``.
    """
    cfg = cfg or SelectorConfig()
    if embedder is None or not embedder.trained:
        raise DependencyError("embedder", "train the embedder before the selector")
    if held_out is None:
        corpus, held_out = split_corpus(corpus, cfg.train_frac, cfg.seed)

    head = SelectionHead(embedder.d, cfg)
    rng = np.random.default_rng(cfg.seed)
    static_text = head.prepare(embedder.encode_text("")) if variant == "static_text" else None
    train_table = apply_variant(build_scene_table(corpus, embedder, head), variant, rng, static_text)
    held_table = apply_variant(build_scene_table(held_out, embedder, head), variant, rng, static_text)
    instances = build_instances(train_table)
    if not instances:
        raise ConfigurationError("the training corpus has no step with a context")
    for name, table in (("training", train_table), ("held-out", held_table)):
        if table.n_tasks < cfg.M:
            raise ConfigurationError(f"the {name} corpus has {table.n_tasks} tasks, fewer than M={cfg.M}")
    eval_seed = cfg.seed + 1

    params = head.parameters()
    first = sample_batch(train_table, instances[: cfg.optim.batch_size], cfg.M, np.random.default_rng(cfg.seed))
    initial_loss = selection_loss(head, first).item()
    head.zero_grad()
    result = SelectorTrainingResult(
        head=head,
        variant=variant,
        initial_loss=initial_loss,
        initial_accuracy=selection_accuracy(head, held_table, cfg.M, eval_seed),
    )
    logger.debug(
        "Training %s selector on %d instances (M=%d, %d parameters), initial loss %.4f",
        variant, len(instances), cfg.M, head.parameter_count(), initial_loss,
    )

    for epoch in tqdm(range(cfg.optim.epochs), desc=f"Selector ({variant})", unit="epoch", disable=not show_progress):
        order = rng.permutation(len(instances))
        losses = []
        for start in range(0, len(order), cfg.optim.batch_size):
            chosen = [instances[i] for i in order[start:start + cfg.optim.batch_size]]
            loss = selection_loss(head, sample_batch(train_table, chosen, cfg.M, rng))
            loss.backward()
            adam_step(params, cfg.optim)
            losses.append(loss.item())
        result.epoch_losses.append(float(np.mean(losses)))
        logger.trace("Selector epoch %d loss %.4f", epoch + 1, result.epoch_losses[-1])

    head.trained = True
    result.held_out_accuracy = selection_accuracy(head, held_table, cfg.M, eval_seed)
    logger.success(
        "Selector (%s) trained: held-out accuracy %.3f (untrained %.3f, chance %.3f)",
        variant, result.held_out_accuracy, result.initial_accuracy, 1.0 / cfg.M,
    )
    return result


__all__ = [
    "VARIANTS",
    "SceneTable",
    "SelectionBatch",
    "SelectorTrainingResult",
    "build_scene_table",
    "apply_variant",
    "build_instances",
    "sample_batch",
    "batch_scores",
    "selection_loss",
    "selection_accuracy",
    "train_selector",
]
