"""Deterministic worker pool: results are placed by index, so any thread
count reproduces the serial output bit for bit (each item is independent)."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

__all__ = ["pmap"]


def pmap(fn, items, threads: int = 1):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    out = [None] * len(items)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(fn, it): i for i, it in enumerate(items)}
        for fut, i in futures.items():
            out[i] = fut.result()
    return out
