"""Exact normal-ordering combinatorics for photon-number operators.

``(a†a)^n = Σ_k S(n, k) a†^k a^k`` with ``S`` the Stirling numbers of the
second kind.  The inverse map, ``a†^m a^m = Σ_k s(m, k) (a†a)^k``, uses the
signed Stirling numbers of the first kind.  Everything here is exact integer
arithmetic; values are bounded by the int64 range so the tables can be used
as numpy integer arrays downstream.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

INT64_MAX = 2**63 - 1


def _check(value: int, n: int, k: int) -> int:
    if abs(value) > INT64_MAX:
        raise OverflowError(f"Stirling number ({n}, {k}) = {value} exceeds int64")
    return value


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def _stirling1_signed(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return _stirling1_signed(n - 1, k - 1) - (n - 1) * _stirling1_signed(n - 1, k)


def stirling(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k).

    Raises ``OverflowError`` if the exact value does not fit in int64.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    return _check(_stirling2(n, k), n, k)


def stirling_first(n: int, k: int) -> int:
    """Signed Stirling number of the first kind s(n, k)."""
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    return _check(_stirling1_signed(n, k), n, k)


@dataclass(frozen=True)
class StirlingTable:
    """Lower-triangular table ``entries[n, k] = S(n, k)`` for ``n, k ≤ max_order``."""

    max_order: int
    entries: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.max_order < 0:
            raise ValueError("max_order must be non-negative")
        size = self.max_order + 1
        table = np.zeros((size, size), dtype=np.int64)
        for n in range(size):
            for k in range(n + 1):
                table[n, k] = stirling(n, k)
        table.setflags(write=False)
        object.__setattr__(self, "entries", table)

    def __call__(self, n: int, k: int) -> int:
        if not 0 <= k <= n <= self.max_order:
            if 0 <= n <= self.max_order and k > n:
                return 0
            raise ValueError(f"({n}, {k}) outside table of order {self.max_order}")
        return int(self.entries[n, k])

    def inverse(self) -> np.ndarray:
        """Signed first-kind table, the exact integer inverse of ``entries``."""
        size = self.max_order + 1
        out = np.zeros((size, size), dtype=np.int64)
        for n in range(size):
            for k in range(n + 1):
                out[n, k] = stirling_first(n, k)
        return out


def falling_factorial_coefficients(m: int) -> np.ndarray:
    """Coefficients c_k with ``a†^m a^m = Σ_k c_k (a†a)^k``."""
    return np.array([stirling_first(m, k) for k in range(m + 1)], dtype=np.int64)


def number_moment_decomposition(m: int, n: int) -> np.ndarray:
    """Table ``C[k, l]`` with ⟨a†^m a^m b†^n b^n⟩ = Σ C[k, l] ⟨(a†a)^k (b†b)^l⟩.

    Cross-mode operators commute, so the table is the outer product of the
    single-mode falling-factorial expansions.
    """
    if m < 0 or n < 0:
        raise ValueError("orders must be non-negative")
    return np.outer(falling_factorial_coefficients(m), falling_factorial_coefficients(n))


def power_moment_expansion(k: int) -> np.ndarray:
    """Coefficients of ``(a†a)^k = Σ_j S(k, j) a†^j a^j`` as an int64 vector."""
    return np.array([stirling(k, j) for j in range(k + 1)], dtype=np.int64)
