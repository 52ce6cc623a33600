"""Codec configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class CodecConfig:
    qp: int = 24
    tile_w: int = 32
    tile_h: int = 32
    cu_size: int = 16
    tu_size: int = 4
    gop: str = "IBBB"
    search_range: int = 8
    max_ref_frames: int = 4
    max_dqp: int = 12

    def __post_init__(self):
        if not 0 <= self.qp <= 51:
            raise ValueError(f"qp {self.qp} outside [0, 51]")
        if self.cu_size != 16:
            raise ValueError("only 16x16 coding units are supported")
        if self.tu_size not in (4, 8):
            raise ValueError("tu_size must be 4 or 8")
        for name in ("tile_w", "tile_h"):
            v = getattr(self, name)
            if v < self.cu_size or v % self.cu_size:
                raise ValueError(f"{name}={v} must be a positive multiple of cu_size")
        if not self.gop or self.gop[0] != "I" or set(self.gop) - {"I", "P", "B"}:
            raise ValueError(f"GOP {self.gop!r} must start with I and use only I/P/B")
        if not 0 <= self.search_range <= 64:
            raise ValueError("search_range must be in [0, 64]")
        if not 1 <= self.max_ref_frames <= 4:
            raise ValueError("max_ref_frames must be in [1, 4]")
        if not 1 <= self.max_dqp <= 26:
            raise ValueError("max_dqp must be in [1, 26]")

    def frame_is_intra(self, frame_idx: int) -> bool:
        return self.gop[frame_idx % len(self.gop)] == "I"

    def as_dict(self) -> dict:
        return asdict(self)
