"""COSEQ1 checkpoint container shared by every trainable module.

Layout, little endian:

    magic      b"COSEQ1"
    count      u32, number of records that follow
    records    count x (u32 name length, utf-8 name, u32 rank, rank x u32 dims, float32 payload)

The record count sits between the magic and the first record. A loader reads
exactly ``count`` records and rejects a file with bytes left over or missing,
so a checkpoint cut at a record boundary is still detected. Metadata (kind,
config, training flags) lives in a ``<file>.json`` sidecar.
"""
import json
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..constants import CHECKPOINT_MAGIC
from ..exceptions import CheckpointFormatError
from ..logger import get_logger

logger = get_logger()

PathLike = Union[str, Path]


def meta_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def save_checkpoint(
    path: PathLike,
    tensors: Mapping[str, np.ndarray],
    meta: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write ``tensors`` to the COSEQ1 container, and ``meta`` to a JSON sidecar.

    Layout (little endian): magic, u32 record count, then per record
    u32 name length, utf-8 name, u32 rank, rank x u32 dims, float32 payload.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chunks = [CHECKPOINT_MAGIC, struct.pack("<I", len(tensors))]
    for name, value in tensors.items():
        array = np.ascontiguousarray(value, dtype="<f4")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(array.tobytes())
    path.write_bytes(b"".join(chunks))
    if meta is not None:
        meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
    logger.debug("Wrote checkpoint with %d tensors to %s", len(tensors), path)
    return path


class _Reader:
    def __init__(self, path: Path, payload: bytes) -> None:
        self.path = path
        self.payload = payload
        self.offset = 0

    def take(self, count: int) -> bytes:
        end = self.offset + count
        if end > len(self.payload):
            raise CheckpointFormatError(self.path, "truncated file")
        chunk = self.payload[self.offset:end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def load_checkpoint(path: PathLike) -> Tuple["OrderedDict[str, np.ndarray]", Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        raise CheckpointFormatError(path, "file does not exist")
    reader = _Reader(path, path.read_bytes())
    if reader.take(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(path, "bad magic string")

    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for _ in range(reader.u32()):
        try:
            name = reader.take(reader.u32()).decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointFormatError(path, "record name is not utf-8") from e
        rank = reader.u32()
        dims = struct.unpack(f"<{rank}I", reader.take(4 * rank))
        count = int(np.prod(dims)) if rank else 1
        array = np.frombuffer(reader.take(4 * count), dtype="<f4").reshape(dims)
        tensors[name] = array.astype(np.float32)
    if reader.offset != len(reader.payload):
        raise CheckpointFormatError(path, "trailing bytes after last record")

    meta: Dict[str, Any] = {}
    sidecar = meta_path(path)
    if sidecar.exists():
        try:
            meta = json.loads(sidecar.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise CheckpointFormatError(sidecar, f"invalid metadata: {e}") from e
    logger.debug("Loaded checkpoint with %d tensors from %s", len(tensors), path)
    return tensors, meta


__all__ = ["save_checkpoint", "load_checkpoint", "meta_path"]
