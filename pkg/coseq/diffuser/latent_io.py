import struct
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from .sampling import Latent
from ..constants import LATENT_DUMP_MAGIC
from ..exceptions import CheckpointFormatError

PathLike = Union[str, Path]


def save_latents(path: PathLike, latents: Sequence[Latent]) -> Path:
    """Flat little-endian dump: magic, u32 count, then per latent
    i32 source step, u32 iteration, u32 rank, dims, float32 payload."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chunks = [LATENT_DUMP_MAGIC, struct.pack("<I", len(latents))]
    for latent in latents:
        array = np.ascontiguousarray(latent.tensor, dtype="<f4")
        chunks.append(struct.pack("<iII", latent.source_step, latent.iteration, array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(array.tobytes())
    path.write_bytes(b"".join(chunks))
    return path


def load_latents(path: PathLike) -> List[Latent]:
    path = Path(path)
    payload = path.read_bytes()
    if payload[: len(LATENT_DUMP_MAGIC)] != LATENT_DUMP_MAGIC:
        raise CheckpointFormatError(path, "bad magic string for a latent dump")
    offset = len(LATENT_DUMP_MAGIC)
    try:
        (count,) = struct.unpack_from("<I", payload, offset)
        offset += 4
        latents = []
        for _ in range(count):
            source_step, iteration, rank = struct.unpack_from("<iII", payload, offset)
            offset += 12
            dims = struct.unpack_from(f"<{rank}I", payload, offset)
            offset += 4 * rank
            size = int(np.prod(dims)) if rank else 1
            if offset + 4 * size > len(payload):
                raise CheckpointFormatError(path, "truncated latent dump")
            array = np.frombuffer(payload, dtype="<f4", count=size, offset=offset).reshape(dims)
            offset += 4 * size
            latents.append(Latent(source_step, iteration, array.astype(np.float32)))
    except struct.error as e:
        raise CheckpointFormatError(path, f"truncated latent dump: {e}") from e
    if offset != len(payload):
        raise CheckpointFormatError(path, "trailing bytes after last latent")
    return latents


__all__ = ["save_latents", "load_latents"]
