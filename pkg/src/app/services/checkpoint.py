"""
Binary pool checkpoints.

Layout (little-endian):

    magic      6 bytes  b"HPPOOL"
    version    uint16
    meta_len   uint32, then meta_len bytes of JSON header
               (params, disorder, level, count, meta)
    samples    count * float64
    rng_len    uint32, then rng_len bytes of JSON RngLineage (0 when absent)
"""

import logging
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from src.app.config.settings import settings
from src.app.models.params import DisorderModel, ModelParams
from src.app.models.traces import Pool, RngLineage
from src.app.utils.errors import ConfigParseError

log = logging.getLogger(__name__)

_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")


class CheckpointHeader(BaseModel):
    params: ModelParams
    disorder: DisorderModel
    level: int = Field(ge=0)
    count: int = Field(ge=0)
    meta: Dict[str, Any] = Field(default_factory=dict)


def checkpoint_pool(pool: Pool, path: Union[str, Path]) -> Path:
    """Write `pool` to `path`; the samples are stored bit-exactly."""
    path = Path(path)
    header = CheckpointHeader(
        params=pool.params,
        disorder=pool.disorder,
        level=pool.level,
        count=pool.size,
        meta=dict(pool.meta),
    )
    meta = header.model_dump_json().encode("utf-8")
    lineage = pool.lineage.model_dump_json().encode("utf-8") if pool.lineage else b""
    samples = np.ascontiguousarray(pool.log_samples, dtype="<f8")

    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(settings.output.CHECKPOINT_MAGIC)
        f.write(_U16.pack(settings.output.CHECKPOINT_VERSION))
        f.write(_U32.pack(len(meta)))
        f.write(meta)
        f.write(samples.tobytes())
        f.write(_U32.pack(len(lineage)))
        f.write(lineage)
    log.info(f"Checkpointed level-{pool.level} pool of {pool.size} samples to {path}")
    return path


class _Reader:
    def __init__(self, data: bytes, path: str) -> None:
        self.data = data
        self.path = path
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        end = self.pos + count
        if end > len(self.data):
            raise ConfigParseError(
                f"truncated checkpoint while reading {what}", path=self.path, field=what
            )
        chunk = self.data[self.pos : end]
        self.pos = end
        return chunk

    def u16(self, what: str) -> int:
        return int(_U16.unpack(self.take(_U16.size, what))[0])

    def u32(self, what: str) -> int:
        return int(_U32.unpack(self.take(_U32.size, what))[0])


def restore_pool(path: Union[str, Path]) -> Pool:
    """Read a pool written by checkpoint_pool.

    Raises ConfigParseError naming the offending block for malformed files.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ConfigParseError(f"cannot read checkpoint: {e}", path=str(path)) from e
    reader = _Reader(data, str(path))

    magic = settings.output.CHECKPOINT_MAGIC
    if reader.take(len(magic), "magic") != magic:
        raise ConfigParseError("not a pool checkpoint", path=str(path), field="magic")
    version = reader.u16("version")
    if version != settings.output.CHECKPOINT_VERSION:
        raise ConfigParseError(
            f"unsupported checkpoint version {version}", path=str(path), field="version"
        )

    meta = reader.take(reader.u32("meta_len"), "meta")
    try:
        header = CheckpointHeader.model_validate_json(meta)
    except ValidationError as e:
        raise ConfigParseError(str(e), path=str(path), field="meta") from e

    samples = np.frombuffer(reader.take(8 * header.count, "samples"), dtype="<f8")

    lineage: Optional[RngLineage] = None
    raw = reader.take(reader.u32("rng_len"), "rng")
    if raw:
        try:
            lineage = RngLineage.model_validate_json(raw)
        except ValidationError as e:
            raise ConfigParseError(str(e), path=str(path), field="rng") from e
    if reader.pos != len(data):
        raise ConfigParseError(
            f"{len(data) - reader.pos} trailing bytes", path=str(path), field="rng"
        )

    return Pool(
        level=header.level,
        log_samples=samples.astype(np.float64),
        params=header.params,
        disorder=header.disorder,
        lineage=lineage,
        meta=header.meta,
    )
