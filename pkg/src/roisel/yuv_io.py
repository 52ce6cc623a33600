"""Raw planar I420 (8-bit 4:2:0) video files.

There is no header: dimensions and frame count come from the caller.  Each
frame is stored as the full Y plane followed by the quarter-size U and V
planes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np


class TruncatedFileError(ValueError):
    def __init__(self, path, expected: int, actual: int):
        super().__init__(
            f"{path}: expected {expected} bytes for the given dimensions, found {actual}"
        )
        self.expected = expected
        self.actual = actual


class Plane(str, Enum):
    Y = "Y"
    U = "U"
    V = "V"


@dataclass(frozen=True)
class VideoSpec:
    width: int
    height: int
    frame_count: int
    fps: float = 30.0

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError(f"frame must be at least 16x16, got {self.width}x{self.height}")
        if self.width % 2 or self.height % 2:
            raise ValueError("4:2:0 requires even width and height")
        if self.frame_count < 1:
            raise ValueError("frame_count >= 1 violated")

    @property
    def frame_bytes(self) -> int:
        return self.width * self.height * 3 // 2

    @property
    def total_bytes(self) -> int:
        return self.frame_bytes * self.frame_count


@dataclass(frozen=True)
class PixelRegion:
    """Half-open rectangle ``[x1, x2) x [y1, y2)`` in pixel coordinates."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        if self.x2 <= self.x1 or self.y2 <= self.y1:
            raise ValueError(f"degenerate region {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x1, self.y1, self.x2, self.y2)

    @property
    def area(self) -> int:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def intersects(self, other: "PixelRegion") -> bool:
        return (
            self.x1 < other.x2 and other.x1 < self.x2
            and self.y1 < other.y2 and other.y1 < self.y2
        )

    def within(self, width: int, height: int) -> bool:
        return 0 <= self.x1 and self.x2 <= width and 0 <= self.y1 and self.y2 <= height

    def chroma(self) -> "PixelRegion":
        # floor the top-left, ceil the bottom-right: never drop chroma covering ROI luma
        return PixelRegion(self.x1 // 2, self.y1 // 2, -(-self.x2 // 2), -(-self.y2 // 2))


@dataclass(frozen=True, eq=False)
class Frame:
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        h, w = self.y.shape
        for name, p in (("u", self.u), ("v", self.v)):
            if p.shape != (h // 2, w // 2):
                raise ValueError(f"{name} plane has shape {p.shape}, expected {(h // 2, w // 2)}")
        for p in (self.y, self.u, self.v):
            if p.dtype != np.uint8:
                raise ValueError("only 8-bit samples are supported")
            p.setflags(write=False)

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def height(self) -> int:
        return self.y.shape[0]

    def plane(self, which: Plane | str) -> np.ndarray:
        return {"Y": self.y, "U": self.u, "V": self.v}[Plane(which).value]

    def tobytes(self) -> bytes:
        return self.y.tobytes() + self.u.tobytes() + self.v.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.y.shape == other.y.shape and self.tobytes() == other.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int) -> "Frame":
        buf = np.frombuffer(data, dtype=np.uint8)
        ny = width * height
        nc = ny // 4
        y = buf[:ny].reshape(height, width).copy()
        u = buf[ny:ny + nc].reshape(height // 2, width // 2).copy()
        v = buf[ny + nc:ny + 2 * nc].reshape(height // 2, width // 2).copy()
        return cls(y, u, v)


@dataclass
class VideoSequence:
    spec: VideoSpec
    frames: list[Frame] = field(default_factory=list)

    def __post_init__(self):
        if not self.frames:
            raise ValueError("frame_count >= 1 violated")
        if len(self.frames) != self.spec.frame_count:
            raise ValueError(
                f"spec declares {self.spec.frame_count} frames, got {len(self.frames)}"
            )
        for i, f in enumerate(self.frames):
            if (f.width, f.height) != (self.spec.width, self.spec.height):
                raise ValueError(f"frame {i} is {f.width}x{f.height}, spec says "
                                 f"{self.spec.width}x{self.spec.height}")

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, i: int) -> Frame:
        return self.frames[i]

    def __iter__(self):
        return iter(self.frames)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VideoSequence) or self.spec != other.spec:
            return False
        return all(a.tobytes() == b.tobytes() for a, b in zip(self.frames, other.frames))

    @classmethod
    def from_planes(cls, ys, us, vs, fps: float = 30.0) -> "VideoSequence":
        frames = [Frame(np.ascontiguousarray(y, dtype=np.uint8),
                        np.ascontiguousarray(u, dtype=np.uint8),
                        np.ascontiguousarray(v, dtype=np.uint8)) for y, u, v in zip(ys, us, vs)]
        if not frames:
            raise ValueError("frame_count >= 1 violated")
        h, w = frames[0].y.shape
        return cls(VideoSpec(w, h, len(frames), fps), frames)


def read_sequence(path: str | os.PathLike, spec: VideoSpec) -> VideoSequence:
    path = Path(path)
    data = path.read_bytes()
    if len(data) == 2 * spec.total_bytes:
        raise ValueError(f"{path}: size matches 16-bit samples; only 8-bit 4:2:0 is supported")
    if len(data) != spec.total_bytes:
        raise TruncatedFileError(path, spec.total_bytes, len(data))
    fb = spec.frame_bytes
    frames = [Frame.from_bytes(data[i * fb:(i + 1) * fb], spec.width, spec.height)
              for i in range(spec.frame_count)]
    return VideoSequence(spec, frames)


def write_sequence(seq: VideoSequence, path: str | os.PathLike) -> int:
    if len(seq.frames) == 0:
        raise ValueError("frame_count >= 1 violated")
    data = b"".join(f.tobytes() for f in seq.frames)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
    return len(data)


def extract_region(frame: Frame, r: PixelRegion, plane: Plane | str = Plane.Y) -> np.ndarray:
    """Row-major samples of ``r`` from one plane.

    ``r`` is always given in luma coordinates; for U/V it is mapped onto the
    half-resolution grid with :meth:`PixelRegion.chroma`.
    """
    plane = Plane(plane)
    p = frame.plane(plane)
    rr = r if plane is Plane.Y else r.chroma()
    if not rr.within(p.shape[1], p.shape[0]):
        raise IndexError(f"region {rr.as_tuple()} outside {plane.value} plane {p.shape[::-1]}")
    return p[rr.y1:rr.y2, rr.x1:rr.x2].reshape(-1).copy()
