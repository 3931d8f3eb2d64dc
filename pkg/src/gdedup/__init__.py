"""Generalized deduplication: Hamming-code base mapping, bounds and simulation."""

from .code import CodeSpec
from .codec import EncodedStream, Encoder, decode, encode
from .source import SourceConfig, build_source

__version__ = "0.1.0"

__all__ = ["CodeSpec", "EncodedStream", "Encoder", "SourceConfig", "build_source", "decode", "encode"]
