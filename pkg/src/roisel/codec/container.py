"""RSEL container: a fixed little-endian header followed by length-prefixed frames.

See ``docs/container_format.md`` for the byte layout.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field

from ..encryptor import EncryptionLevel
from .config import CodecConfig

MAGIC = b"RSEL"
VERSION = 1
_HEAD = struct.Struct("<4sHIIIHHBBBBBBBQB")
_LEN = struct.Struct("<I")


class ContainerError(ValueError):
    pass


@dataclass
class Container:
    width: int
    height: int
    config: CodecConfig
    level: EncryptionLevel
    nonce: int
    payloads: list[bytes] = field(default_factory=list)
    version: int = VERSION

    @property
    def frame_count(self) -> int:
        return len(self.payloads)

    @property
    def payload_bytes(self) -> int:
        return sum(len(p) for p in self.payloads)

    def header_bytes(self) -> bytes:
        c = self.config
        gop = c.gop.encode("ascii")
        if len(gop) > 255:
            raise ContainerError("GOP pattern longer than 255 characters")
        return _HEAD.pack(MAGIC, self.version, self.width, self.height, self.frame_count,
                          c.tile_w, c.tile_h, c.qp, int(self.level), c.max_dqp, c.cu_size,
                          c.tu_size, c.search_range, c.max_ref_frames, self.nonce, len(gop)) + gop

    def to_bytes(self) -> bytes:
        parts = [self.header_bytes()]
        for p in self.payloads:
            parts.append(_LEN.pack(len(p)))
            parts.append(p)
        return b"".join(parts)

    @property
    def size(self) -> int:
        return len(self.header_bytes()) + 4 * self.frame_count + self.payload_bytes

    @classmethod
    def from_bytes(cls, data: bytes) -> "Container":
        if len(data) < _HEAD.size:
            raise ContainerError("file shorter than the container header")
        (magic, version, width, height, count, tile_w, tile_h, qp, level, max_dqp, cu, tu, sr,
         max_ref, nonce, gop_len) = _HEAD.unpack_from(data)
        if magic != MAGIC:
            raise ContainerError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ContainerError(f"unsupported container version {version}")
        pos = _HEAD.size
        gop = data[pos:pos + gop_len].decode("ascii")
        pos += gop_len
        try:
            config = CodecConfig(qp=qp, tile_w=tile_w, tile_h=tile_h, cu_size=cu, tu_size=tu,
                                 gop=gop, search_range=sr, max_ref_frames=max_ref,
                                 max_dqp=max_dqp)
            level = EncryptionLevel(level)
        except ValueError as e:
            raise ContainerError(f"invalid header: {e}") from e
        payloads = []
        for n in range(count):
            if pos + 4 > len(data):
                raise ContainerError(f"truncated before frame {n}")
            (ln,) = _LEN.unpack_from(data, pos)
            pos += 4
            if pos + ln > len(data):
                raise ContainerError(f"frame {n} payload truncated")
            payloads.append(bytes(data[pos:pos + ln]))
            pos += ln
        if pos != len(data):
            raise ContainerError(f"{len(data) - pos} trailing bytes after the last frame")
        return cls(width, height, config, level, nonce, payloads, version)

    def save(self, path: str | os.PathLike) -> int:
        data = self.to_bytes()
        with open(path, "wb") as f:
            f.write(data)
        return len(data)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Container":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())
