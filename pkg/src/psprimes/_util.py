"""Shared plumbing: deterministic parallel mapping and chunked reductions."""

import math
from concurrent.futures import ThreadPoolExecutor

# Chunk size for data-parallel reductions.  Fixed independently of the
# worker count so results are byte-identical for any --threads value.
CHUNK = 1 << 18


def ordered_map(fn, items, threads=1):
    """Map preserving input order; thread count never affects the result."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def chunk_slices(n, chunk=CHUNK):
    return [(i, min(i + chunk, n)) for i in range(0, n, chunk)]


def chunked_sum(partial_fn, n, threads=1, chunk=CHUNK):
    """fsum of partial_fn(i0, i1) over fixed chunks of range(n)."""
    parts = ordered_map(lambda s: partial_fn(*s), chunk_slices(n, chunk), threads)
    return math.fsum(parts)


def chunked_complex_sum(partial_fn, n, threads=1, chunk=CHUNK):
    parts = ordered_map(lambda s: partial_fn(*s), chunk_slices(n, chunk), threads)
    return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
