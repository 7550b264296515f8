import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ..constants import TRACE_FORMAT
from ..exceptions import TraceFormatError
from ..logger import get_logger

logger = get_logger()

PathLike = Union[str, Path]


@dataclass
class CandidateRecord:
    source_step: int
    source_iter: int
    score: float
    prob: float
    seed: List[int] = field(default_factory=list)

    @property
    def tag(self) -> Tuple[int, int]:
        return self.source_step, self.source_iter


@dataclass
class StepTrace:
    """One synthesis step. Source step 0 marks a Gaussian initialization."""

    step: int
    raw_text: str
    caption: str
    candidates: List[CandidateRecord]
    chosen_index: int
    image: Optional[str] = None

    @property
    def chosen(self) -> CandidateRecord:
        return self.candidates[self.chosen_index]


@dataclass
class GenerationTrace:
    task_id: str
    task_index: int
    mode: str
    w: int
    B: int  # pylint: disable=invalid-name
    T: int  # pylint: disable=invalid-name
    seed: int
    config: Dict[str, Any] = field(default_factory=dict)
    steps: List[StepTrace] = field(default_factory=list)

    @property
    def chosen_indices(self) -> List[int]:
        return [entry.chosen_index for entry in self.steps]

    def expected_candidates(self, n: int) -> int:
        if n == 1:
            return self.B
        if self.mode == "cosed":
            return (n - 1) * (self.w + 1)
        if self.mode == "previous":
            return self.w + 1
        return 1

    def validate(self) -> None:
        for position, entry in enumerate(self.steps, start=1):
            if entry.step != position:
                raise TraceFormatError(f"step {entry.step} found at position {position}")
            if len(entry.candidates) != self.expected_candidates(entry.step):
                raise TraceFormatError(
                    f"step {entry.step} has {len(entry.candidates)} candidates, "
                    f"{self.mode} mode expects {self.expected_candidates(entry.step)}"
                )
            if not 0 <= entry.chosen_index < len(entry.candidates):
                raise TraceFormatError(f"step {entry.step} chose index {entry.chosen_index} out of range")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["format"] = TRACE_FORMAT
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GenerationTrace":
        if data.get("format") != TRACE_FORMAT:
            raise TraceFormatError(f"expected format '{TRACE_FORMAT}', got '{data.get('format')}'")
        try:
            steps = [
                StepTrace(
                    step=int(entry["step"]),
                    raw_text=entry["raw_text"],
                    caption=entry["caption"],
                    candidates=[
                        CandidateRecord(
                            source_step=int(c["source_step"]),
                            source_iter=int(c["source_iter"]),
                            score=float(c["score"]),
                            prob=float(c["prob"]),
                            seed=[int(s) for s in c.get("seed", [])],
                        )
                        for c in entry["candidates"]
                    ],
                    chosen_index=int(entry["chosen_index"]),
                    image=entry.get("image"),
                )
                for entry in data["steps"]
            ]
            trace = cls(
                task_id=data["task_id"],
                task_index=int(data["task_index"]),
                mode=data["mode"],
                w=int(data["w"]),
                B=int(data["B"]),
                T=int(data["T"]),
                seed=int(data["seed"]),
                config=dict(data.get("config", {})),
                steps=steps,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise TraceFormatError(f"malformed trace: {e}") from e
        trace.validate()
        return trace


def save_trace(trace: GenerationTrace, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(trace.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    logger.debug("Wrote trace of %s (%d steps) to %s", trace.task_id, len(trace.steps), path)
    return path


def load_trace(path: PathLike) -> GenerationTrace:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise TraceFormatError(f"{path} does not exist") from e
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"{path} is not valid JSON: {e}") from e
    return GenerationTrace.from_dict(data)


__all__ = ["CandidateRecord", "StepTrace", "GenerationTrace", "save_trace", "load_trace"]
