"""Kernel selection.

The compiled ``_kernels`` extension is used when it imports; otherwise (or
when ``GRAPHCODES_PURE_PYTHON=1``) the pure-Python implementations run.
Both backends take and return Python-int bitsets at this layer.
"""

import os

import numpy as np

from graphcodes import _purepy

_compiled = None
if os.environ.get("GRAPHCODES_PURE_PYTHON") != "1":
    try:
        from graphcodes import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def _pack(rows, nbits):
    nwords = max(1, (nbits + 63) // 64)
    buf = b"".join(r.to_bytes(nwords * 8, "little") for r in rows)
    return np.frombuffer(buf, dtype="<u8").reshape(len(rows), nwords).astype(np.uint64)


def _unpack(words):
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")


def min_weight(basis, nbits, backend=None):
    """(min weight, combination mask) over nonzero spans of ``basis``."""
    if not basis:
        return -1, 0
    if _use_compiled(backend):
        w, mask = _compiled.min_weight(_pack(basis, nbits))
        return int(w), int(mask)
    return _purepy.min_weight(list(basis))


def max_independent_set(adj, backend=None):
    """(alpha, witness bitset) for the graph with neighbour bitsets ``adj``."""
    nv = len(adj)
    if nv == 0:
        return 0, 0
    if _use_compiled(backend):
        alpha, words = _compiled.max_independent_set(_pack(adj, nv))
        return int(alpha), _unpack(words)
    return _purepy.max_independent_set(list(adj), nv)


def _use_compiled(backend):
    if backend is None:
        return _compiled is not None
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return True
    if backend == "python":
        return False
    raise ValueError(f"unknown backend {backend!r}")
