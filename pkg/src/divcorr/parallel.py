"""Deterministic block parallelism.

Work is split into blocks whose boundaries depend only on the problem size,
never on the thread count, and results are returned in block order. Callers
reduce with exact or correctly rounded sums, so output is identical for any
number of threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "DIVCORR_THREADS"


def default_threads() -> int:
    """Thread count from ``DIVCORR_THREADS``, else 1."""
    raw = os.environ.get(ENV_THREADS, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def fixed_blocks(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    """Split ``[lo, hi)`` into consecutive ranges of length ``size`` (last may be short)."""
    return [(s, min(s + size, hi)) for s in range(lo, hi, size)]


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """``[fn(item) for item in items]``, optionally evaluated on a thread pool."""
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def exact_sum(values: Iterable):
    """Order-independent sum: ``fsum`` on real and imaginary parts, plain sum otherwise.

    ``math.fsum`` is correctly rounded, so the float result does not depend on
    how partial results were grouped.
    """
    values = list(values)
    if any(isinstance(v, (complex, float)) for v in values):
        re = math.fsum(complex(v).real for v in values)
        im = math.fsum(complex(v).imag for v in values)
        return complex(re, im)
    total = 0
    for v in values:
        total += v
    return total
