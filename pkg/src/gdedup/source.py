"""Synthetic chunk source: active bases ``X`` XOR-ed with deviations ``Y``.

Chunks are drawn uniformly from ``Z = X + Y`` by drawing a base index and a
deviation index independently; because the Hamming spheres are disjoint this
is the same as a uniform draw over ``Z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .code import CodeSpec, InvalidBaseError, expand_base, is_codeword
from .rng import SELECTION_KEY, SplitMix64

MAX_ENUMERATION = 1 << 20


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class SourceConfig:
    spec: CodeSpec
    active_bases: tuple[int, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.active_bases:
            raise ConfigurationError("at least one active base is required")
        if len(set(self.active_bases)) != len(self.active_bases):
            raise ConfigurationError("active bases must be distinct")
        for b in self.active_bases:
            if not is_codeword(self.spec, b):
                raise InvalidBaseError(f"active base {b:#x} is not a codeword")

    @property
    def x_size(self) -> int:
        return len(self.active_bases)

    @property
    def y_size(self) -> int:
        return self.spec.deviation_count

    @property
    def z_size(self) -> int:
        return self.x_size * self.y_size


def from_bases(spec: CodeSpec, bases: Iterable[int], seed: int = 0) -> SourceConfig:
    return SourceConfig(spec, tuple(bases), seed)


def select_indices(population: int, count: int, rng: SplitMix64) -> list[int]:
    """Partial Fisher-Yates over ``range(population)`` without materializing it.

    Only swapped slots are stored, so the population may be astronomically
    large (``2**65519`` codewords at ``m = 16``).
    """
    if not 0 <= count <= population:
        raise ConfigurationError(f"cannot pick {count} of {population}")
    swapped: dict[int, int] = {}
    picked = []
    for i in range(count):
        j = i + rng.below(population - i)
        vi = swapped.get(i, i)
        vj = swapped.get(j, j)
        swapped[j] = vi
        picked.append(vj)
    return picked


def build_source(m: int, active_count: int, seed: int = 0, k_mode: str = "full") -> SourceConfig:
    """Pick ``active_count`` distinct codewords of the ``m``-parity-bit Hamming code."""
    spec = CodeSpec.hamming(m, k_mode)  # type: ignore[arg-type]
    if not 1 <= active_count <= spec.base_count:
        raise ConfigurationError(
            f"active_count must be in [1, {spec.base_count}], got {active_count}"
        )
    rng = SplitMix64(seed ^ SELECTION_KEY)
    indices = select_indices(spec.base_count, active_count, rng)
    return SourceConfig(spec, tuple(expand_base(spec, i) for i in indices), seed)


def sample_indices(cfg: SourceConfig, rng: SplitMix64) -> tuple[int, int]:
    """Draw ``(base position in X, deviation index)`` independently."""
    return rng.below(cfg.x_size), rng.below(cfg.y_size)


def sample_chunk(cfg: SourceConfig, rng: SplitMix64) -> int:
    b, d = sample_indices(cfg, rng)
    return cfg.active_bases[b] ^ (1 << (d - 1) if d else 0)


def entropy(cfg: SourceConfig) -> float:
    """``H(Z) = log2 |Z|`` in bits per chunk."""
    return math.log2(cfg.z_size)


def enumerate_chunks(cfg: SourceConfig) -> list[int]:
    if cfg.z_size > MAX_ENUMERATION:
        raise ConfigurationError(f"|Z| = {cfg.z_size} exceeds {MAX_ENUMERATION}")
    devs = [0] + [1 << i for i in range(cfg.y_size - 1)]
    return [b ^ d for b in cfg.active_bases for d in devs]
