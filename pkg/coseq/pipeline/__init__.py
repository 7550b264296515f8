from .models import ModelBundle
from .trace import CandidateRecord, StepTrace, GenerationTrace, save_trace, load_trace
from .synthesis import (
    StepOutcome,
    SynthesisResult,
    ReplayReport,
    synthesize_first,
    synthesize_task,
    synthesize_corpus,
    replay_trace,
)
from .emit import crossfade, emit_sequence, load_sequence

__all__ = [
    "ModelBundle",
    "CandidateRecord",
    "StepTrace",
    "GenerationTrace",
    "save_trace",
    "load_trace",
    "StepOutcome",
    "SynthesisResult",
    "ReplayReport",
    "synthesize_first",
    "synthesize_task",
    "synthesize_corpus",
    "replay_trace",
    "crossfade",
    "emit_sequence",
    "load_sequence",
]
