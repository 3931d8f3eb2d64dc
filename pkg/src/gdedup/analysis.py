"""Closed-form bounds on expected coded length and convergence quantities.

All sums run term by term with Neumaier-compensated accumulation. The
convention ``0 * log 0 = 0`` is used wherever a term vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

MAX_CHUNKS = 10**7


@dataclass(frozen=True)
class BoundParams:
    C: int
    X_size: int
    Y_size: int
    k: int
    n: int

    def __post_init__(self) -> None:
        if self.C < 0:
            raise ValueError("C must be non-negative")
        if self.C > MAX_CHUNKS:
            raise ValueError(f"C={self.C} exceeds the supported {MAX_CHUNKS}")
        if self.X_size < 1 or self.Y_size < 1:
            raise ValueError("set sizes must be positive")
        if not 0 < self.k <= self.n:
            raise ValueError(f"need 0 < k <= n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class BoundResult:
    lower: float
    upper: float


class _Neumaier:
    __slots__ = ("s", "c")

    def __init__(self) -> None:
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


def p_miss(c: int, X_size: int) -> float:
    """Probability that the base of chunk ``c`` (1-based) is not yet stored."""
    if c < 1 or X_size < 1:
        raise ValueError("need c >= 1 and X_size >= 1")
    return (1.0 - 1.0 / X_size) ** (c - 1)


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def theta_lower_series(C: int, X_size: int, Y_size: int, k: int) -> list[float]:
    """Lower bound on expected length for every prefix ``1..C``."""
    _check_c(C)
    fixed = math.log2(Y_size) + 1.0
    acc = _Neumaier()
    out = []
    for c in range(1, C + 1):
        p = p_miss(c, X_size)
        hit = 1.0 - p
        # (1 - p) log(|X| (1 - p)) = |X|^-1 * E|D| log E|D|
        acc.add(fixed + k * p + (hit * math.log2(X_size * hit) if hit > 0 else 0.0))
        out.append(acc.value)
    return out


def theta_upper_series(C: int, X_size: int, Y_size: int, k: int) -> list[float]:
    """Upper bound on expected length for every prefix ``1..C``."""
    _check_c(C)
    fixed = math.log2(Y_size) + 3.0
    cap = _xlog2x(float(X_size))
    acc = _Neumaier()
    out = []
    for c in range(1, C + 1):
        acc.add(fixed + k * p_miss(c, X_size) + min(_xlog2x(float(c - 1)), cap) / X_size)
        out.append(acc.value)
    return out


def _check_c(C: int) -> None:
    if C < 0:
        raise ValueError("C must be non-negative")
    if C > MAX_CHUNKS:
        raise ValueError(f"C={C} exceeds the supported {MAX_CHUNKS}; no closed form is used")


def theta_lower(p: BoundParams) -> float:
    s = theta_lower_series(p.C, p.X_size, p.Y_size, p.k)
    return s[-1] if s else 0.0


def theta_upper(p: BoundParams) -> float:
    s = theta_upper_series(p.C, p.X_size, p.Y_size, p.k)
    return s[-1] if s else 0.0


def generalized_bounds(p: BoundParams) -> BoundResult:
    return BoundResult(theta_lower(p), theta_upper(p))


def dedup_bounds(C: int, Z_size: int, n: int) -> BoundResult:
    """Classic bounds: ``Y`` is the zero chunk, ``X`` is all of ``Z``, ``k = n``."""
    p = BoundParams(C, Z_size, 1, n, n)
    return BoundResult(theta_lower(p), theta_upper(p) - C)


def dedup_bounds_series(C: int, Z_size: int, n: int) -> tuple[list[float], list[float]]:
    lower = theta_lower_series(C, Z_size, 1, n)
    upper = [u - c for c, u in enumerate(theta_upper_series(C, Z_size, 1, n), start=1)]
    return lower, upper


def asymptotic_cost(H_Z: float, mode: Literal["classic", "generalized"]) -> BoundResult:
    """Per-chunk cost limits as the number of chunks grows."""
    if H_Z < 0:
        raise ValueError("entropy must be non-negative")
    if mode == "generalized":
        return BoundResult(H_Z + 1.0, H_Z + 3.0)
    if mode == "classic":
        return BoundResult(H_Z + 1.0, H_Z + 2.0)
    raise ValueError(f"unknown mode {mode!r}")


def convergence_rate(mode: Literal["classic", "generalized"], X_size: int, Z_size: int) -> float:
    """Linear rate ``1 - 1/|X|`` (generalized) or ``1 - 1/|Z|`` (classic)."""
    if X_size < 1 or Z_size < 1:
        raise ValueError("set sizes must be positive")
    if mode == "generalized":
        return 1.0 - 1.0 / X_size
    if mode == "classic":
        return 1.0 - 1.0 / Z_size
    raise ValueError(f"unknown mode {mode!r}")


def ratio_bounds(C: int, X_size: int, Y_size: int, k: int, n: int) -> BoundResult:
    """Envelope on the generalization ratio from the two pairs of length bounds."""
    if C < 1:
        raise ValueError("C must be at least 1")
    gen = generalized_bounds(BoundParams(C, X_size, Y_size, k, n))
    dd = dedup_bounds(C, X_size * Y_size, n)
    return BoundResult(dd.lower / gen.upper, dd.upper / gen.lower)
