"""Binarization and the two-mode binary arithmetic coder."""

from .binarization import (
    Binarization,
    BitstreamCorruptError,
    eg_decode,
    eg_encode,
    fl_decode,
    fl_encode,
    tr_decode,
    tr_encode,
)
from .cabac import BYPASS, ContextModel, Payload, decode_bins, encode_bins

__all__ = [
    "BYPASS", "Binarization", "BitstreamCorruptError", "ContextModel", "Payload",
    "decode_bins", "encode_bins", "eg_decode", "eg_encode", "fl_decode", "fl_encode",
    "tr_decode", "tr_encode",
]
