from .metrics import eval_tv, eval_vv
from .usage import UsageHistograms, NonlinearityReport, usage_histograms, nonlinearity_score, usage_rows
from .ablations import evaluation_subset, evaluate_modes, ablate_latents, modality_ablation, score_results
from .report import ChartSpec, report, read_table, write_table

__all__ = [
    "eval_tv",
    "eval_vv",
    "UsageHistograms",
    "NonlinearityReport",
    "usage_histograms",
    "nonlinearity_score",
    "usage_rows",
    "evaluation_subset",
    "evaluate_modes",
    "ablate_latents",
    "modality_ablation",
    "score_results",
    "ChartSpec",
    "report",
    "read_table",
    "write_table",
]
