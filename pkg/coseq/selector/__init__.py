from .head import ProjectedScene, SelectionHead, save_head, load_head
from .selection import CandidateScene, score, candidate_scores, rank, select, probabilities
from .training import VARIANTS, SelectorTrainingResult, selection_accuracy, train_selector

__all__ = [
    "ProjectedScene",
    "SelectionHead",
    "save_head",
    "load_head",
    "CandidateScene",
    "score",
    "candidate_scores",
    "rank",
    "select",
    "probabilities",
    "VARIANTS",
    "SelectorTrainingResult",
    "selection_accuracy",
    "train_selector",
]
