from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

from scipy.stats import binomtest

from ..exceptions import DomainError, StateError
from ..logger import get_logger
from ..pipeline.trace import GenerationTrace
from ..synthio.corpus import Corpus

logger = get_logger()


@dataclass
class UsageHistograms:
    """Where selected candidates came from.

    ``step_counts[k]`` counts selections sourced k steps behind the step being
    generated; ``latent_counts[t]`` counts selections seeded from iteration t.
    The ``*_usage`` views divide by the number of traces.
    """

    n_traces: int
    step_counts: Dict[int, int] = field(default_factory=dict)
    latent_counts: Dict[int, int] = field(default_factory=dict)

    @property
    def total_selections(self) -> int:
        return sum(self.step_counts.values())

    @property
    def step_usage(self) -> Dict[int, float]:
        return {k: count / self.n_traces for k, count in sorted(self.step_counts.items())}

    @property
    def latent_usage(self) -> Dict[int, float]:
        return {t: count / self.n_traces for t, count in sorted(self.latent_counts.items())}

    @property
    def step_shares(self) -> Dict[int, float]:
        total = self.total_selections
        return {k: count / total for k, count in sorted(self.step_counts.items())} if total else {}


@dataclass
class NonlinearityReport:
    decisions: int
    hits: int
    baseline_hits: int
    p_value: float

    @property
    def hit_rate(self) -> float:
        return self.hits / self.decisions if self.decisions else 0.0

    @property
    def baseline_hit_rate(self) -> float:
        return self.baseline_hits / self.decisions if self.decisions else 0.0


def usage_histograms(traces: Sequence[GenerationTrace]) -> UsageHistograms:
    if not traces:
        raise DomainError("usage_histograms", "no traces")
    step_counts: Counter = Counter()
    latent_counts: Counter = Counter()
    for trace in traces:
        for entry in trace.steps[1:]:
            chosen = entry.chosen
            if chosen.source_step < 1:
                continue
            step_counts[entry.step - chosen.source_step] += 1
            latent_counts[chosen.source_iter] += 1
    histograms = UsageHistograms(len(traces), dict(step_counts), dict(latent_counts))
    logger.debug("Usage over %d traces: %d selections", len(traces), histograms.total_selections)
    return histograms


def nonlinearity_score(traces: Sequence[GenerationTrace], corpus: Corpus, min_step: int = 2) -> NonlinearityReport:
    """Compare chosen source steps with the planted antecedents, against a
    baseline that always picks the preceding step.

    ``p_value`` is a one-sided binomial test of the selector's hit count
    against the baseline hit rate.
    """
    decisions = hits = baseline_hits = 0
    for trace in traces:
        try:
            task = corpus.task(trace.task_id)
        except KeyError as e:
            raise StateError(f"trace {trace.task_id} has no task in the corpus") from e
        for entry in trace.steps:
            if entry.step < max(min_step, 2):
                continue
            antecedent = task.step(entry.step).antecedent
            decisions += 1
            hits += int(entry.chosen.source_step == antecedent)
            baseline_hits += int(antecedent == entry.step - 1)

    p_value = 1.0
    if decisions:
        baseline_rate = baseline_hits / decisions
        p_value = float(binomtest(hits, decisions, baseline_rate, alternative="greater").pvalue)
    report = NonlinearityReport(decisions, hits, baseline_hits, p_value)
    logger.debug(
        "Non-linearity: hit rate %.3f vs baseline %.3f over %d decisions (p=%.3g)",
        report.hit_rate, report.baseline_hit_rate, decisions, p_value,
    )
    return report


def usage_rows(histograms: UsageHistograms) -> List[Dict[str, float]]:
    return [
        {"offset": k, "count": histograms.step_counts[k], "mean": mean, "share": histograms.step_shares[k]}
        for k, mean in histograms.step_usage.items()
    ]


__all__ = ["UsageHistograms", "NonlinearityReport", "usage_histograms", "nonlinearity_score", "usage_rows"]
