import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from .trace import GenerationTrace, save_trace
from ..constants import SEQUENCE_FORMAT, TRACE_FILE_NAME
from ..exceptions import DimensionError, TraceFormatError
from ..logger import get_logger
from ..synthio.corpus_io import load_ppm, save_ppm

logger = get_logger()

PathLike = Union[str, Path]

SEQUENCE_MANIFEST_NAME = "sequence.json"
STEPS_DIR = "steps"
FRAMES_DIR = "frames"


def crossfade(a: np.ndarray, b: np.ndarray, k: int) -> List[np.ndarray]:
    """K frames strictly between ``a`` and ``b``, frame j blending j/(K+1) of ``b``."""
    if a.shape != b.shape:
        raise DimensionError("crossfade", a.shape, b.shape)
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    frames = []
    for j in range(1, k + 1):
        alpha = j / (k + 1)
        frames.append(((1.0 - alpha) * a64 + alpha * b64).astype(np.float32))
    return frames


def emit_sequence(
    images: Sequence[np.ndarray],
    trace: GenerationTrace,
    out_dir: PathLike,
    crossfade_frames: int = 0,
) -> Path:
    """Write one PPM per step, optional cross-fade frames, the trace and a
    ``sequence.json`` manifest listing them."""
    if len(images) != len(trace.steps):
        raise TraceFormatError(f"{len(images)} images for a trace of {len(trace.steps)} steps")
    out_dir = Path(out_dir)
    (out_dir / STEPS_DIR).mkdir(parents=True, exist_ok=True)

    steps: List[Dict[str, Any]] = []
    for entry, image in zip(trace.steps, images):
        relative = f"{STEPS_DIR}/step_{entry.step:02d}.ppm"
        save_ppm(out_dir / relative, image)
        entry.image = relative
        steps.append({"step": entry.step, "caption": entry.caption, "image": relative})

    frames: List[str] = []
    if crossfade_frames > 0 and len(images) > 1:
        (out_dir / FRAMES_DIR).mkdir(parents=True, exist_ok=True)
        for n in range(len(images) - 1):
            for j, frame in enumerate(crossfade(images[n], images[n + 1], crossfade_frames), start=1):
                relative = f"{FRAMES_DIR}/step_{n + 1:02d}_{j:02d}.ppm"
                save_ppm(out_dir / relative, frame)
                frames.append(relative)

    save_trace(trace, out_dir / TRACE_FILE_NAME)
    manifest = {
        "format": SEQUENCE_FORMAT,
        "task_id": trace.task_id,
        "steps": steps,
        "crossfade_frames": crossfade_frames,
        "frames": frames,
        "trace": TRACE_FILE_NAME,
    }
    manifest_path = out_dir / SEQUENCE_MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    logger.success("Wrote %d steps and %d cross-fade frames of %s to %s", len(steps), len(frames), trace.task_id, out_dir)
    return manifest_path


def load_sequence(out_dir: PathLike) -> Tuple[List[np.ndarray], Dict[str, Any]]:
    out_dir = Path(out_dir)
    try:
        manifest = json.loads((out_dir / SEQUENCE_MANIFEST_NAME).read_text(encoding="utf-8"))
    except (FileNotFoundError, json.JSONDecodeError) as e:
        raise TraceFormatError(f"cannot read {SEQUENCE_MANIFEST_NAME} in {out_dir}: {e}") from e
    if manifest.get("format") != SEQUENCE_FORMAT:
        raise TraceFormatError(f"expected format '{SEQUENCE_FORMAT}', got '{manifest.get('format')}'")
    images = [load_ppm(out_dir / step["image"]) for step in manifest["steps"]]
    return images, manifest


__all__ = ["crossfade", "emit_sequence", "load_sequence", "SEQUENCE_MANIFEST_NAME"]
