"""Order-preserving thread map capped by ``Q4S_THREADS`` (0 or unset = auto)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    raw = os.environ.get("Q4S_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"Q4S_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError("Q4S_THREADS must be >= 0")
    return n or min(8, os.cpu_count() or 1)


def ordered_map(fn, items):
    """``list(map(fn, items))``, possibly concurrent; result order matches input."""
    items = list(items)
    n = max_workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
