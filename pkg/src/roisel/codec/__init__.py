"""Tile-based block codec with selective-encryption hooks."""

from .analysis import SequenceAnalysis, analyze_sequence
from .config import CodecConfig
from .container import Container, ContainerError
from .decoder import DecodeResult, decode_container, decode_sequence
from .encoder import EdgeParams, encode_sequence, serialise
from .inter import inter_search
from .intra import build_mpm_list, intra_predict
from .transform import inverse_transform, transform_quantize

__all__ = [
    "CodecConfig", "Container", "EdgeParams", "ContainerError", "DecodeResult", "SequenceAnalysis",
    "analyze_sequence", "build_mpm_list", "decode_container", "decode_sequence",
    "encode_sequence", "inter_search", "intra_predict", "inverse_transform", "serialise",
    "transform_quantize",
]
